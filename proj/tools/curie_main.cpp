// curie: experiment driver for the sCA / CURIE stream learners.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "CLI11.hpp"
#include "curie/error.hpp"
#include "curie/experiment.hpp"

namespace fs = std::filesystem;

namespace {

enum ExitCode : int {
  kOk = 0,
  kUnexpected = 1,
  kConfigError = 2,
  kDataError = 3,
  kRuntimeError = 4,
};

int exit_code_for(curie::ErrorKind kind) {
  using curie::ErrorKind;
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::Comparison:
      return kConfigError;
    case ErrorKind::Schema:
    case ErrorKind::Row:
    case ErrorKind::Io:
    case ErrorKind::Input:
      return kDataError;
    default:
      return kRuntimeError;
  }
}

std::map<std::string, std::string> parse_assignments(const std::vector<std::string>& items) {
  std::map<std::string, std::string> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      curie::raise(curie::ErrorKind::Config, "--set expects section.key=value, got '" + item + "'");
    }
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

struct RunArgs {
  std::string config_file;
  std::string preset_name;
  std::vector<std::string> settings;
  std::string out_dir;
  std::string seeds;
  bool dry_run = false;
};

int do_run(const RunArgs& args) {
  curie::ExperimentConfig config;
  if (!args.preset_name.empty()) config = curie::preset(args.preset_name);
  if (!args.config_file.empty()) {
    config = curie::apply_settings(config, curie::read_ini_file(args.config_file));
  }
  auto overrides = parse_assignments(args.settings);
  if (!args.out_dir.empty()) overrides["output.directory"] = args.out_dir;
  if (!args.seeds.empty()) overrides["evaluation.seeds"] = args.seeds;
  config = curie::apply_settings(config, overrides);
  config.validate();

  if (args.dry_run) {
    std::cout << config.to_ini();
    return kOk;
  }
  const auto result = curie::run_experiment(config);
  for (const auto& run : result.runs) {
    std::printf("%s seed=%llu rep=%zu mean_preACC=%.4f drift_events=%zu seconds=%.2f\n",
                config.output.name.c_str(), static_cast<unsigned long long>(run.seed),
                run.repetition, run.report.mean_preacc, run.report.drift_events.size(),
                run.seconds);
    for (const auto& c : run.report.checkpoints) {
      std::printf("  preACC@%zu=%.4f\n", c.t, c.preacc);
    }
  }
  std::printf("reports: %s\n", result.directory.string().c_str());
  return kOk;
}

int do_compare(const std::vector<std::string>& reports, const std::string& json_out) {
  std::vector<fs::path> paths(reports.begin(), reports.end());
  const auto rows = curie::compare_reports(paths);
  std::cout << curie::comparison_table(rows);
  if (!json_out.empty()) {
    std::ofstream out(json_out, std::ios::binary);
    if (!out) curie::raise(curie::ErrorKind::Io, "cannot write " + json_out);
    out << curie::comparison_json(rows);
  }
  return kOk;
}

struct DatasetSource {
  const char* file;
  const char* preset;
  const char* source;
  const char* download;  // direct URL, empty when manual
  const char* layout;
};

constexpr DatasetSource kSources[] = {
    {"elec2.csv", "elec2-curie", "https://www.openml.org/d/151 (electricity, normalized)", "",
     "header date,day,period,nswprice,nswdemand,vicprice,vicdemand,transfer,class; class UP/DOWN"},
    {"gmsc.csv", "gmsc-curie", "https://www.kaggle.com/c/GiveMeSomeCredit (cs-training.csv)", "",
     "header as in cs-training.csv; label SeriousDlqin2yrs; NA marks missing income"},
    {"poker.csv", "poker-curie",
     "https://archive.ics.uci.edu/ml/datasets/Poker+Hand (poker-hand-training-true.data)",
     "https://archive.ics.uci.edu/ml/machine-learning-databases/poker/"
     "poker-hand-training-true.data",
     "no header; S1,C1,...,S5,C5,CLASS"},
};

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) curie::raise(curie::ErrorKind::Io, "cannot read " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  char byte[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(byte, sizeof byte, "%02x", digest[i]);
    hex += byte;
  }
  return hex;
}

std::map<std::string, std::string> read_checksums(const fs::path& file) {
  std::map<std::string, std::string> out;
  std::ifstream in(file);
  std::string hash, name;
  while (in >> hash >> name) out[name] = hash;
  return out;
}

int do_fetch(const std::string& dir_arg, bool download) {
  const fs::path dir = dir_arg.empty() ? curie::dataset_directory() : fs::path(dir_arg);
  fs::create_directories(dir);
  const fs::path checksum_file = dir / "checksums.sha256";
  auto known = read_checksums(checksum_file);
  bool mismatch = false;
  bool changed = false;

  std::printf("dataset directory: %s\n", dir.string().c_str());
  for (const auto& s : kSources) {
    const fs::path file = dir / s.file;
    std::printf("\n%s (preset %s)\n  source: %s\n  layout: %s\n", s.file, s.preset, s.source,
                s.layout);
    if (!fs::exists(file) && download && *s.download) {
      const std::string cmd = "curl -fsSL --max-time 120 -o '" + file.string() + "' '" +
                              s.download + "'";
      std::printf("  downloading %s\n", s.download);
      if (std::system(cmd.c_str()) != 0) {
        fs::remove(file);
        std::printf("  download failed\n");
      }
    }
    if (!fs::exists(file)) {
      std::printf("  status: missing (place the file at %s)\n", file.string().c_str());
      continue;
    }
    const std::string hash = sha256_file(file);
    const auto it = known.find(s.file);
    if (it == known.end()) {
      known[s.file] = hash;
      changed = true;
      std::printf("  status: present, sha256 %s recorded\n", hash.c_str());
    } else if (it->second == hash) {
      std::printf("  status: present, sha256 verified\n");
    } else {
      mismatch = true;
      std::printf("  status: CHECKSUM MISMATCH (recorded %s, found %s)\n", it->second.c_str(),
                  hash.c_str());
    }
  }
  if (changed) {
    std::ofstream out(checksum_file, std::ios::trunc);
    for (const auto& [name, hash] : known) out << hash << "  " << name << "\n";
  }
  return mismatch ? kDataError : kOk;
}

int do_presets(const std::string& show) {
  if (!show.empty()) {
    std::cout << curie::preset(show).to_ini();
    return kOk;
  }
  for (const auto& name : curie::preset_names()) std::cout << name << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streamified cellular automata (sCA) and CURIE experiment driver"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run an experiment and write reports");
  run->add_option("-c,--config", run_args.config_file, "INI config file")->check(CLI::ExistingFile);
  run->add_option("-p,--preset", run_args.preset_name, "Start from a named preset");
  run->add_option("-s,--set", run_args.settings, "Override a key: section.key=value");
  run->add_option("-o,--out", run_args.out_dir, "Report directory (output.directory)");
  run->add_option("--seeds", run_args.seeds, "Comma-separated seeds (evaluation.seeds)");
  run->add_flag("--dry-run", run_args.dry_run, "Print the resolved config and exit");

  std::vector<std::string> reports;
  std::string compare_json;
  auto* compare = app.add_subcommand("compare", "Tabulate summary.json/aggregate.json reports");
  compare->add_option("reports", reports, "Report files")->required();
  compare->add_option("--json", compare_json, "Also write the table as JSON");

  std::string fetch_dir;
  bool fetch_download = false;
  auto* fetch = app.add_subcommand("fetch-datasets", "Show dataset sources and verify checksums");
  fetch->add_option("-d,--dir", fetch_dir, "Dataset directory (default $CURIE_DATA_DIR or ./data)");
  fetch->add_flag("--download", fetch_download, "Download files that have a direct URL");

  std::string show;
  auto* presets = app.add_subcommand("presets", "List presets or print one as INI");
  presets->add_option("--show", show, "Preset to print");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) return do_run(run_args);
    if (*compare) return do_compare(reports, compare_json);
    if (*fetch) return do_fetch(fetch_dir, fetch_download);
    if (*presets) return do_presets(show);
  } catch (const curie::Error& e) {
    std::cerr << "curie: " << curie::to_string(e.kind()) << " error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "curie: " << e.what() << "\n";
    return kUnexpected;
  }
  return kOk;
}
