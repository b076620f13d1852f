#include "curie/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include "json.hpp"

#include "curie/error.hpp"
#include "curie/stream_learners.hpp"

namespace curie {

namespace {

using Json = nlohmann::ordered_json;

// Value parsing. Failures throw std::invalid_argument with a short reason
// that apply_settings() collects per key.

std::string trimmed(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::size_t to_size(const std::string& text) {
  const std::string s = trimmed(text);
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("expected a non-negative integer, got '" + text + "'");
  }
  return value;
}

std::uint64_t to_u64(const std::string& text) {
  const std::string s = trimmed(text);
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("expected a non-negative integer, got '" + text + "'");
  }
  return value;
}

double to_real(const std::string& text) {
  const std::string s = trimmed(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) {
    throw std::invalid_argument("expected a finite number, got '" + text + "'");
  }
  return value;
}

bool to_bool(const std::string& text) {
  const std::string s = trimmed(text);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw std::invalid_argument("expected true or false, got '" + text + "'");
}

// Comma-separated; an empty value is an empty list, empty items survive.
std::vector<std::string> to_list(const std::string& text) {
  std::vector<std::string> out;
  if (trimmed(text).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.push_back(trimmed(std::string_view(text).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T, typename F>
std::vector<T> to_list_of(const std::string& text, F convert) {
  std::vector<T> out;
  for (const auto& item : to_list(text)) out.push_back(convert(item));
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += items[i];
  }
  return out;
}

template <typename T, typename F>
std::string join_of(const std::vector<T>& items, F format) {
  std::vector<std::string> text;
  for (const auto& v : items) text.push_back(format(v));
  return join(text);
}

std::string size_text(std::size_t v) { return std::to_string(v); }

template <typename E>
struct EnumName {
  E value;
  const char* name;
};

constexpr EnumName<DatasetKind> kDatasetKinds[] = {{DatasetKind::Synthetic, "synthetic"},
                                                   {DatasetKind::Csv, "csv"}};
constexpr EnumName<LearnerKind> kLearnerKinds[] = {{LearnerKind::Sca, "sca"},
                                                   {LearnerKind::ScaAdaptive, "sca-adaptive"},
                                                   {LearnerKind::Curie, "curie"},
                                                   {LearnerKind::KnnPaired, "knn-paired"}};
constexpr EnumName<NeighborhoodKind> kNeighborhoods[] = {
    {NeighborhoodKind::VonNeumann, "von-neumann"}, {NeighborhoodKind::Moore, "moore"}};
constexpr EnumName<Normalization> kNormalizations[] = {
    {Normalization::None, "none"}, {Normalization::MinMaxFromPreparatory, "minmax"}};
constexpr EnumName<MissingPolicy> kMissingPolicies[] = {
    {MissingPolicy::Fail, "fail"},
    {MissingPolicy::Drop, "drop"},
    {MissingPolicy::ImputePreparatoryMedian, "impute-median"}};
constexpr EnumName<RowErrorPolicy> kRowPolicies[] = {{RowErrorPolicy::Fail, "fail"},
                                                    {RowErrorPolicy::Skip, "skip"}};

template <typename E, std::size_t N>
std::string enum_text(const EnumName<E> (&table)[N], E value) {
  for (const auto& e : table) {
    if (e.value == value) return e.name;
  }
  return "?";
}

template <typename E, std::size_t N>
E enum_value(const EnumName<E> (&table)[N], const std::string& text) {
  const std::string s = trimmed(text);
  std::string allowed;
  for (const auto& e : table) {
    if (s == e.name) return e.value;
    allowed += allowed.empty() ? "" : "|";
    allowed += e.name;
  }
  throw std::invalid_argument("expected one of " + allowed + ", got '" + text + "'");
}

struct Field {
  const char* key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {"dataset.kind", [](const auto& c) { return enum_text(kDatasetKinds, c.dataset.kind); },
       [](auto& c, const auto& v) { c.dataset.kind = enum_value(kDatasetKinds, v); }},
      {"dataset.name", [](const auto& c) { return c.dataset.name; },
       [](auto& c, const auto& v) { c.dataset.name = trimmed(v); }},
      {"dataset.family", [](const auto& c) { return std::string(to_string(c.dataset.family)); },
       [](auto& c, const auto& v) {
         const auto f = parse_concept_family(trimmed(v));
         if (!f) throw std::invalid_argument("expected circle|line|sinev|sineh, got '" + v + "'");
         c.dataset.family = *f;
       }},
      {"dataset.old_params", [](const auto& c) { return join_of(c.dataset.old_params, format_real); },
       [](auto& c, const auto& v) { c.dataset.old_params = to_list_of<double>(v, to_real); }},
      {"dataset.new_params", [](const auto& c) { return join_of(c.dataset.new_params, format_real); },
       [](auto& c, const auto& v) { c.dataset.new_params = to_list_of<double>(v, to_real); }},
      {"dataset.length", [](const auto& c) { return size_text(c.dataset.length); },
       [](auto& c, const auto& v) { c.dataset.length = to_size(v); }},
      {"dataset.drift_at", [](const auto& c) { return size_text(c.dataset.drift_at); },
       [](auto& c, const auto& v) { c.dataset.drift_at = to_size(v); }},
      {"dataset.drift_width", [](const auto& c) { return size_text(c.dataset.drift_width); },
       [](auto& c, const auto& v) { c.dataset.drift_width = to_size(v); }},
      {"dataset.path", [](const auto& c) { return c.dataset.path; },
       [](auto& c, const auto& v) { c.dataset.path = trimmed(v); }},
      {"dataset.limit", [](const auto& c) { return size_text(c.dataset.limit); },
       [](auto& c, const auto& v) { c.dataset.limit = to_size(v); }},
      {"dataset.feature_columns", [](const auto& c) { return join(c.dataset.schema.feature_columns); },
       [](auto& c, const auto& v) { c.dataset.schema.feature_columns = to_list(v); }},
      {"dataset.label_column", [](const auto& c) { return c.dataset.schema.label_column; },
       [](auto& c, const auto& v) { c.dataset.schema.label_column = trimmed(v); }},
      {"dataset.class_count", [](const auto& c) { return size_text(c.dataset.schema.class_count); },
       [](auto& c, const auto& v) { c.dataset.schema.class_count = to_size(v); }},
      {"dataset.label_values", [](const auto& c) { return join(c.dataset.schema.label_values); },
       [](auto& c, const auto& v) { c.dataset.schema.label_values = to_list(v); }},
      {"dataset.has_header",
       [](const auto& c) { return std::string(c.dataset.schema.has_header ? "true" : "false"); },
       [](auto& c, const auto& v) { c.dataset.schema.has_header = to_bool(v); }},
      {"dataset.column_names", [](const auto& c) { return join(c.dataset.schema.column_names); },
       [](auto& c, const auto& v) { c.dataset.schema.column_names = to_list(v); }},
      {"dataset.missing_markers", [](const auto& c) { return join(c.dataset.schema.missing_markers); },
       [](auto& c, const auto& v) { c.dataset.schema.missing_markers = to_list(v); }},
      {"dataset.missing",
       [](const auto& c) { return enum_text(kMissingPolicies, c.dataset.schema.missing); },
       [](auto& c, const auto& v) { c.dataset.schema.missing = enum_value(kMissingPolicies, v); }},
      {"dataset.row_errors",
       [](const auto& c) { return enum_text(kRowPolicies, c.dataset.schema.row_errors); },
       [](auto& c, const auto& v) { c.dataset.schema.row_errors = enum_value(kRowPolicies, v); }},
      {"dataset.normalization",
       [](const auto& c) { return enum_text(kNormalizations, c.dataset.schema.normalization); },
       [](auto& c, const auto& v) {
         c.dataset.schema.normalization = enum_value(kNormalizations, v);
       }},
      {"dataset.delimiter",
       [](const auto& c) {
         return c.dataset.schema.delimiter == '\t' ? std::string("tab")
                                                   : std::string(1, c.dataset.schema.delimiter);
       },
       [](auto& c, const auto& v) {
         const std::string s = trimmed(v);
         if (s == "tab") {
           c.dataset.schema.delimiter = '\t';
         } else if (s.size() == 1) {
           c.dataset.schema.delimiter = s[0];
         } else {
           throw std::invalid_argument("expected a single character or 'tab', got '" + v + "'");
         }
       }},
      {"learner.kind", [](const auto& c) { return enum_text(kLearnerKinds, c.learner.kind); },
       [](auto& c, const auto& v) { c.learner.kind = enum_value(kLearnerKinds, v); }},
      {"learner.bins", [](const auto& c) { return size_text(c.learner.bins); },
       [](auto& c, const auto& v) { c.learner.bins = to_size(v); }},
      {"learner.neighborhood",
       [](const auto& c) { return enum_text(kNeighborhoods, c.learner.neighborhood); },
       [](auto& c, const auto& v) { c.learner.neighborhood = enum_value(kNeighborhoods, v); }},
      {"learner.radius", [](const auto& c) { return size_text(c.learner.radius); },
       [](auto& c, const auto& v) { c.learner.radius = to_size(v); }},
      {"learner.margin_fraction", [](const auto& c) { return format_real(c.learner.margin_fraction); },
       [](auto& c, const auto& v) { c.learner.margin_fraction = to_real(v); }},
      {"learner.max_generations", [](const auto& c) { return size_text(c.learner.max_generations); },
       [](auto& c, const auto& v) { c.learner.max_generations = to_size(v); }},
      {"learner.window", [](const auto& c) { return size_text(c.learner.window); },
       [](auto& c, const auto& v) { c.learner.window = to_size(v); }},
      {"learner.threshold", [](const auto& c) { return format_real(c.learner.threshold); },
       [](auto& c, const auto& v) { c.learner.threshold = to_real(v); }},
      {"learner.rebuild_every", [](const auto& c) { return size_text(c.learner.rebuild_every); },
       [](auto& c, const auto& v) { c.learner.rebuild_every = to_size(v); }},
      {"learner.k", [](const auto& c) { return size_text(c.learner.k); },
       [](auto& c, const auto& v) { c.learner.k = to_size(v); }},
      {"learner.adapt_at",
       [](const auto& c) { return c.learner.adapt_at ? size_text(*c.learner.adapt_at) : ""; },
       [](auto& c, const auto& v) {
         if (trimmed(v).empty()) {
           c.learner.adapt_at.reset();
         } else {
           c.learner.adapt_at = to_size(v);
         }
       }},
      {"evaluation.preparatory_fraction",
       [](const auto& c) { return format_real(c.evaluation.preparatory_fraction); },
       [](auto& c, const auto& v) { c.evaluation.preparatory_fraction = to_real(v); }},
      {"evaluation.checkpoints", [](const auto& c) { return join_of(c.evaluation.checkpoints, size_text); },
       [](auto& c, const auto& v) { c.evaluation.checkpoints = to_list_of<Timestamp>(v, to_size); }},
      {"evaluation.resets", [](const auto& c) { return join_of(c.evaluation.resets, size_text); },
       [](auto& c, const auto& v) { c.evaluation.resets = to_list_of<Timestamp>(v, to_size); }},
      {"evaluation.smoothing", [](const auto& c) { return size_text(c.evaluation.smoothing); },
       [](auto& c, const auto& v) { c.evaluation.smoothing = to_size(v); }},
      {"evaluation.seeds",
       [](const auto& c) {
         return join_of(c.evaluation.seeds, [](std::uint64_t s) { return std::to_string(s); });
       },
       [](auto& c, const auto& v) { c.evaluation.seeds = to_list_of<std::uint64_t>(v, to_u64); }},
      {"evaluation.repetitions", [](const auto& c) { return size_text(c.evaluation.repetitions); },
       [](auto& c, const auto& v) { c.evaluation.repetitions = to_size(v); }},
      {"output.directory", [](const auto& c) { return c.output.directory; },
       [](auto& c, const auto& v) { c.output.directory = trimmed(v); }},
      {"output.name", [](const auto& c) { return c.output.name; },
       [](auto& c, const auto& v) { c.output.name = trimmed(v); }},
  };
  return table;
}

std::size_t feature_dims(const ExperimentConfig& c) {
  return c.dataset.kind == DatasetKind::Synthetic ? 2 : c.dataset.schema.feature_columns.size();
}

std::size_t class_count_of(const ExperimentConfig& c) {
  return c.dataset.kind == DatasetKind::Synthetic ? 2 : c.dataset.schema.class_count;
}

std::size_t preparatory_count(double fraction, std::size_t n) {
  const auto p = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
  return std::max<std::size_t>(p, 1);
}

ScaConfig sca_config(const ExperimentConfig& c, std::size_t dims, std::size_t class_count) {
  ScaConfig s;
  s.dims = dims;
  s.bins_per_dim = c.learner.bins;
  s.neighborhood = {c.learner.neighborhood, c.learner.radius};
  s.class_count = class_count;
  s.margin_fraction = c.learner.margin_fraction;
  s.max_generations = c.learner.max_generations;
  return s;
}

ConceptSpec concept_of(ConceptFamily family, const std::vector<double>& params, bool is_new) {
  if (params.empty()) return is_new ? default_new_concept(family) : default_old_concept(family);
  return {family, params};
}

}  // namespace

void ExperimentConfig::validate() const {
  std::vector<std::string> problems;
  const auto check = [&](bool ok, const std::string& message) {
    if (!ok) problems.push_back(message);
  };

  if (dataset.kind == DatasetKind::Synthetic) {
    for (bool is_new : {false, true}) {
      try {
        concept_of(dataset.family, is_new ? dataset.new_params : dataset.old_params, is_new)
            .validate();
      } catch (const Error& e) {
        problems.push_back(std::string(is_new ? "dataset.new_params: " : "dataset.old_params: ") +
                           e.what());
      }
    }
    check(dataset.length >= 2, "dataset.length must be at least 2");
    check(dataset.drift_width >= 1, "dataset.drift_width must be at least 1");
    check(dataset.drift_at + dataset.drift_width <= dataset.length,
          "dataset.drift_at + dataset.drift_width must not exceed dataset.length");
  } else {
    const auto& s = dataset.schema;
    check(!dataset.path.empty(), "dataset.path is required for csv datasets");
    check(!s.feature_columns.empty(), "dataset.feature_columns must name at least one column");
    check(!s.label_column.empty(), "dataset.label_column is required");
    check(s.class_count >= 2, "dataset.class_count must be at least 2");
    check(s.label_values.empty() || s.label_values.size() == s.class_count,
          "dataset.label_values must be empty or list dataset.class_count labels");
    check(s.has_header || !s.column_names.empty(),
          "dataset.column_names is required when dataset.has_header is false");
  }

  check(learner.bins >= 2, "learner.bins must be at least 2");
  check(learner.radius >= 1, "learner.radius must be at least 1");
  check(learner.margin_fraction >= 0.0, "learner.margin_fraction must be non-negative");
  check(learner.window >= 1, "learner.window must be at least 1");
  check(learner.threshold > 0.0 && learner.threshold < 1.0,
        "learner.threshold must lie in (0, 1)");
  check(learner.rebuild_every >= 1, "learner.rebuild_every must be at least 1");
  if (learner.kind == LearnerKind::KnnPaired) {
    check(learner.k >= 1 && learner.k <= learner.window, "learner.k must lie in [1, learner.window]");
  }
  if (learner.kind != LearnerKind::KnnPaired && learner.bins >= 2 && feature_dims(*this) >= 1) {
    try {
      GridShape(feature_dims(*this), learner.bins);
    } catch (const Error& e) {
      problems.push_back(std::string("learner.bins: ") + e.what());
    }
  }

  check(evaluation.preparatory_fraction > 0.0 && evaluation.preparatory_fraction < 1.0,
        "evaluation.preparatory_fraction must lie in (0, 1)");
  check(!evaluation.seeds.empty(), "evaluation.seeds must list at least one seed");
  check(evaluation.repetitions >= 1, "evaluation.repetitions must be at least 1");
  if (dataset.kind == DatasetKind::Synthetic && dataset.length >= 2 &&
      evaluation.preparatory_fraction > 0.0 && evaluation.preparatory_fraction < 1.0) {
    const std::size_t p = preparatory_count(evaluation.preparatory_fraction, dataset.length);
    for (Timestamp t : evaluation.checkpoints) {
      check(t > p && t <= dataset.length,
            "evaluation.checkpoints: " + std::to_string(t) + " outside the test phase");
    }
    for (Timestamp t : evaluation.resets) {
      check(t > p && t < dataset.length,
            "evaluation.resets: " + std::to_string(t) + " outside the test phase");
    }
  }

  check(!output.name.empty() && output.name.find('/') == std::string::npos,
        "output.name must be a non-empty file name");

  if (!problems.empty()) {
    std::string message = "invalid configuration:";
    for (const auto& p : problems) message += "\n  - " + p;
    raise(ErrorKind::Config, message);
  }
}

std::map<std::string, std::string> ExperimentConfig::to_map() const {
  std::map<std::string, std::string> out;
  for (const auto& f : fields()) out.emplace(f.key, f.get(*this));
  return out;
}

std::string ExperimentConfig::to_ini() const {
  std::string text;
  std::string section;
  for (const auto& f : fields()) {
    const std::string key = f.key;
    const auto dot = key.find('.');
    const std::string s = key.substr(0, dot);
    if (s != section) {
      if (!section.empty()) text += '\n';
      text += "[" + s + "]\n";
      section = s;
    }
    text += key.substr(dot + 1) + " = " + f.get(*this) + "\n";
  }
  return text;
}

ExperimentConfig apply_settings(ExperimentConfig base,
                                const std::map<std::string, std::string>& settings) {
  std::vector<std::string> problems;
  for (const auto& [key, value] : settings) {
    const auto it = std::find_if(fields().begin(), fields().end(),
                                 [&](const Field& f) { return key == f.key; });
    if (it == fields().end()) {
      problems.push_back("unknown key '" + key + "'");
      continue;
    }
    try {
      it->set(base, value);
    } catch (const std::invalid_argument& e) {
      problems.push_back(key + ": " + e.what());
    }
  }
  if (!problems.empty()) {
    std::string message = "invalid configuration:";
    for (const auto& p : problems) message += "\n  - " + p;
    raise(ErrorKind::Config, message);
  }
  return base;
}

std::map<std::string, std::string> read_ini_text(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    raise(ErrorKind::Config, std::string("malformed config: ") + e.what());
  }
  std::map<std::string, std::string> out;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      out[section] = body.data();
      continue;
    }
    for (const auto& [key, value] : body) out[section + "." + key] = value.data();
  }
  return out;
}

std::map<std::string, std::string> read_ini_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::Io, "cannot open config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return read_ini_text(buffer.str());
}

ExperimentConfig parse_config_text(const std::string& text, const ExperimentConfig& base) {
  return apply_settings(base, read_ini_text(text));
}

namespace {

struct SyntheticPreset {
  ConceptFamily family;
  bool gradual;
  std::size_t bins;
  bool adaptive;
};

std::string synthetic_preset_name(const SyntheticPreset& p) {
  return std::string(to_string(p.family)) + (p.gradual ? "-gradual" : "-abrupt") + "-2x" +
         std::to_string(p.bins) + (p.adaptive ? "-adaptive" : "-nonadaptive");
}

std::vector<SyntheticPreset> synthetic_presets() {
  std::vector<SyntheticPreset> out;
  for (auto family : {ConceptFamily::Circle, ConceptFamily::Line, ConceptFamily::SineV,
                      ConceptFamily::SineH}) {
    for (bool gradual : {false, true}) {
      for (std::size_t bins : {5, 10, 20}) {
        for (bool adaptive : {true, false}) out.push_back({family, gradual, bins, adaptive});
      }
    }
  }
  return out;
}

ExperimentConfig make_synthetic(const SyntheticPreset& p) {
  ExperimentConfig c;
  c.dataset.kind = DatasetKind::Synthetic;
  c.dataset.family = p.family;
  c.dataset.name = std::string(to_string(p.family)) + (p.gradual ? "-gradual" : "-abrupt");
  c.dataset.length = 2000;
  c.dataset.drift_at = 1000;
  c.dataset.drift_width = p.gradual ? kGradualWidth : kAbruptWidth;
  c.learner.kind = p.adaptive ? LearnerKind::ScaAdaptive : LearnerKind::Sca;
  c.learner.bins = p.bins;
  c.learner.window = p.gradual ? 100 : 25;
  const Timestamp detection = p.gradual ? 1600 : 1025;
  if (p.adaptive) c.learner.adapt_at = detection;
  c.evaluation.preparatory_fraction = 0.05;
  c.evaluation.checkpoints = {1000, detection + c.learner.window, 2000};
  c.evaluation.seeds = {0};
  c.output.name = synthetic_preset_name(p);
  return c;
}

enum class RealData { Elec2, Gmsc, Poker };

ExperimentConfig make_real(RealData data, LearnerKind kind) {
  ExperimentConfig c;
  c.dataset.kind = DatasetKind::Csv;
  c.dataset.limit = 20000;
  c.dataset.schema.normalization = Normalization::MinMaxFromPreparatory;
  c.learner.kind = kind;
  c.learner.neighborhood = NeighborhoodKind::VonNeumann;
  c.learner.radius = 1;
  c.evaluation.preparatory_fraction = 0.5;
  c.evaluation.smoothing = 500;
  auto& s = c.dataset.schema;
  const bool knn = kind == LearnerKind::KnnPaired;
  switch (data) {
    case RealData::Elec2:
      c.dataset.name = "elec2";
      c.dataset.path = "elec2.csv";
      s.feature_columns = {"day", "period", "nswdemand", "vicdemand", "transfer"};
      s.label_column = "class";
      s.label_values = {"DOWN", "UP"};
      s.class_count = 2;
      s.missing = MissingPolicy::Drop;
      c.learner.bins = 5;
      c.learner.window = 50;
      c.learner.threshold = knn ? 0.1 : 0.05;
      break;
    case RealData::Gmsc:
      c.dataset.name = "gmsc";
      c.dataset.path = "gmsc.csv";
      s.feature_columns = {"RevolvingUtilizationOfUnsecuredLines",
                           "age",
                           "NumberOfTime30-59DaysPastDueNotWorse",
                           "DebtRatio",
                           "MonthlyIncome",
                           "NumberOfOpenCreditLinesAndLoans",
                           "NumberOfTimes90DaysLate",
                           "NumberRealEstateLoansOrLines",
                           "NumberOfTime60-89DaysPastDueNotWorse",
                           "NumberOfDependents"};
      s.label_column = "SeriousDlqin2yrs";
      s.class_count = 2;
      s.missing = MissingPolicy::ImputePreparatoryMedian;
      c.learner.bins = 3;
      c.learner.window = 250;
      c.learner.threshold = knn ? 0.001 : 0.01;
      break;
    case RealData::Poker:
      c.dataset.name = "poker";
      c.dataset.path = "poker.csv";
      s.has_header = false;
      s.column_names = {"S1", "C1", "S2", "C2", "S3", "C3", "S4", "C4", "S5", "C5", "CLASS"};
      s.feature_columns = {"S1", "C1", "S2", "C2", "S3", "C3", "S4", "C4", "S5", "C5"};
      s.label_column = "CLASS";
      s.class_count = 10;
      s.missing = MissingPolicy::Drop;
      c.learner.bins = 3;
      c.learner.window = 250;
      c.learner.threshold = 0.001;
      break;
  }
  c.output.name = c.dataset.name + (knn ? "-knn-paired" : "-curie");
  return c;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const char* data : {"elec2", "gmsc", "poker"}) {
    names.push_back(std::string(data) + "-curie");
    names.push_back(std::string(data) + "-knn-paired");
  }
  for (const auto& p : synthetic_presets()) names.push_back(synthetic_preset_name(p));
  return names;
}

ExperimentConfig preset(const std::string& name) {
  const std::pair<const char*, RealData> real[] = {
      {"elec2", RealData::Elec2}, {"gmsc", RealData::Gmsc}, {"poker", RealData::Poker}};
  for (const auto& [data, id] : real) {
    if (name == std::string(data) + "-curie") return make_real(id, LearnerKind::Curie);
    if (name == std::string(data) + "-knn-paired") return make_real(id, LearnerKind::KnnPaired);
  }
  for (const auto& p : synthetic_presets()) {
    if (name == synthetic_preset_name(p)) return make_synthetic(p);
  }
  raise(ErrorKind::Config, "unknown preset '" + name + "' (see `curie presets`)");
}

std::filesystem::path dataset_directory() {
  const char* dir = std::getenv("CURIE_DATA_DIR");
  return dir && *dir ? std::filesystem::path(dir) : std::filesystem::path("data");
}

std::filesystem::path resolve_dataset_path(const std::string& path) {
  const std::filesystem::path p(path);
  if (p.is_absolute() || std::filesystem::exists(p)) return p;
  return dataset_directory() / p;
}

LoadedStream load_stream(const ExperimentConfig& config, std::uint64_t seed) {
  LoadedStream out;
  const double fraction = config.evaluation.preparatory_fraction;
  if (config.dataset.kind == DatasetKind::Synthetic) {
    DriftScenario scenario;
    scenario.old_concept = concept_of(config.dataset.family, config.dataset.old_params, false);
    scenario.new_concept = concept_of(config.dataset.family, config.dataset.new_params, true);
    scenario.length = config.dataset.length;
    scenario.drift_at = config.dataset.drift_at;
    scenario.drift_width = config.dataset.drift_width;
    scenario.seed = seed;
    out.instances = generate_stream(scenario);
    out.preparatory = preparatory_count(fraction, out.instances.size());
    return out;
  }
  CsvLoad load = load_csv(resolve_dataset_path(config.dataset.path), config.dataset.schema,
                          config.dataset.limit);
  if (load.instances.size() < 2) {
    raise(ErrorKind::Row, config.dataset.path + ": fewer than two usable rows");
  }
  out.preparatory = preparatory_count(fraction, load.instances.size());
  out.preprocessing =
      preprocess(load.instances, out.preparatory,
                 config.dataset.schema.missing == MissingPolicy::ImputePreparatoryMedian,
                 config.dataset.schema.normalization);
  out.instances = std::move(load.instances);
  load.instances.clear();
  out.csv = std::move(load);
  return out;
}

std::unique_ptr<StreamLearner> make_learner(const ExperimentConfig& config, std::size_t dims,
                                            std::size_t class_count) {
  const auto& l = config.learner;
  switch (l.kind) {
    case LearnerKind::Sca:
      return std::make_unique<ScaStream>(sca_config(config, dims, class_count));
    case LearnerKind::ScaAdaptive:
      return std::make_unique<OracleAdaptiveStream>(sca_config(config, dims, class_count),
                                                    l.adapt_at, l.window);
    case LearnerKind::Curie:
      return std::make_unique<CurieStream>(
          "curie", make_curie(sca_config(config, dims, class_count), l.window, l.threshold,
                              l.rebuild_every));
    case LearnerKind::KnnPaired: {
      PairedOptions options;
      options.window = l.window;
      options.threshold = l.threshold;
      options.rebuild_every = l.rebuild_every;
      options.reseed_on_drift = true;
      return std::make_unique<KnnPairedStream>(
          "knn-paired",
          PairedLearner<KnnWindow>(KnnWindow(l.window, l.k, class_count),
                                   KnnWindow(l.window, l.k, class_count), options));
    }
  }
  raise(ErrorKind::Config, "unknown learner kind");
}

std::string summary_json(const ExperimentConfig& config, const RunResult& run) {
  Json j;
  j["learner"] = run.report.learner;
  j["dataset"] = config.dataset.name;
  j["seed"] = run.seed;
  j["repetition"] = run.repetition;
  j["instances"] = run.instances;
  j["preparatory"] = run.report.preparatory;
  j["test_instances"] = run.report.per_step.size();
  j["mean_preacc"] = run.report.mean_preacc;
  j["final_accuracy"] = run.report.final_accuracy;
  Json checkpoints = Json::array();
  for (const auto& c : run.report.checkpoints) checkpoints.push_back({{"t", c.t}, {"preacc", c.preacc}});
  j["checkpoints"] = checkpoints;
  Json events = Json::array();
  for (const auto& e : run.report.drift_events) {
    events.push_back({{"t", e.t}, {"proportion", e.proportion}});
  }
  j["drift_events"] = events;
  if (run.csv) {
    Json data;
    data["rows_dropped_missing"] = run.csv->rows_dropped_missing;
    data["rows_skipped_malformed"] = run.csv->rows_skipped_malformed;
    if (run.preprocessing) {
      data["imputed_cells"] = run.preprocessing->imputed_cells;
      data["imputation_medians"] = run.preprocessing->medians;
      data["scaling_minimum"] = run.preprocessing->minimum;
      data["scaling_maximum"] = run.preprocessing->maximum;
    }
    j["data"] = data;
  }
  Json echo = Json::object();
  for (const auto& [key, value] : config.to_map()) echo[key] = value;
  j["config"] = echo;
  return j.dump(2) + "\n";
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorKind::Io, "cannot write " + path.string());
  out << text;
  if (!out) raise(ErrorKind::Io, "failed writing " + path.string());
}

std::string aggregate_json(const ExperimentConfig& config, const std::vector<RunResult>& runs) {
  Json j;
  j["name"] = config.output.name;
  j["learner"] = runs.front().report.learner;
  j["dataset"] = config.dataset.name;
  j["runs"] = runs.size();
  double mean = 0.0;
  for (const auto& r : runs) mean += r.report.mean_preacc;
  j["mean_preacc"] = mean / static_cast<double>(runs.size());
  Json checkpoints = Json::array();
  for (std::size_t i = 0; i < runs.front().report.checkpoints.size(); ++i) {
    double sum = 0.0;
    for (const auto& r : runs) sum += r.report.checkpoints[i].preacc;
    checkpoints.push_back({{"t", runs.front().report.checkpoints[i].t},
                           {"preacc", sum / static_cast<double>(runs.size())}});
  }
  j["checkpoints"] = checkpoints;
  Json per_run = Json::array();
  for (const auto& r : runs) {
    per_run.push_back({{"seed", r.seed},
                       {"repetition", r.repetition},
                       {"mean_preacc", r.report.mean_preacc},
                       {"drift_events", r.report.drift_events.size()}});
  }
  j["per_run"] = per_run;
  return j.dump(2) + "\n";
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, bool write_reports) {
  config.validate();
  ExperimentResult result;
  std::filesystem::path root;
  if (write_reports) {
    root = std::filesystem::path(config.output.directory) / config.output.name;
    std::filesystem::create_directories(root);
    result.directory = root;
  }

  std::optional<LoadedStream> shared;  // csv data does not depend on the seed
  for (std::size_t rep = 0; rep < config.evaluation.repetitions; ++rep) {
    for (std::uint64_t seed : config.evaluation.seeds) {
      const bool synthetic = config.dataset.kind == DatasetKind::Synthetic;
      if (synthetic || !shared) shared = load_stream(config, seed);
      const LoadedStream& data = *shared;
      auto learner = make_learner(config, feature_dims(config), class_count_of(config));

      RunOptions options;
      options.preparatory = data.preparatory;
      options.checkpoints = config.evaluation.checkpoints;
      options.resets = config.evaluation.resets;

      RunResult run;
      run.seed = seed;
      run.repetition = rep;
      run.instances = data.instances.size();
      run.csv = data.csv;
      run.preprocessing = data.preprocessing;
      const auto start = std::chrono::steady_clock::now();
      run.report = run_test_then_train(*learner, data.instances, options);
      run.seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

      if (write_reports) {
        std::string leaf = "seed-" + std::to_string(seed);
        if (config.evaluation.repetitions > 1) leaf += "-rep-" + std::to_string(rep);
        const auto dir = root / leaf;
        std::filesystem::create_directories(dir);
        std::ostringstream trace;
        write_trace_csv(trace, run.report, config.evaluation.smoothing);
        write_text(dir / "trace.csv", trace.str());
        write_text(dir / "summary.json", summary_json(config, run));
        write_text(dir / "config.ini", config.to_ini());
        Json timing{{"seconds", run.seconds},
                    {"per_instance_seconds",
                     run.seconds / static_cast<double>(run.report.per_step.size())}};
        write_text(dir / "timing.json", timing.dump(2) + "\n");
      }
      result.runs.push_back(std::move(run));
    }
  }
  if (write_reports) write_text(root / "aggregate.json", aggregate_json(config, result.runs));
  return result;
}

std::vector<ComparisonRow> compare_reports(const std::vector<std::filesystem::path>& reports) {
  if (reports.size() < 2) raise(ErrorKind::Comparison, "comparison needs at least two reports");
  std::vector<ComparisonRow> rows;
  for (const auto& path : reports) {
    std::ifstream in(path);
    if (!in) raise(ErrorKind::Io, "cannot open report " + path.string());
    Json j;
    try {
      j = Json::parse(in);
      ComparisonRow row;
      row.source = path.string();
      row.learner = j.at("learner").get<std::string>();
      row.dataset = j.at("dataset").get<std::string>();
      row.mean_preacc = j.at("mean_preacc").get<double>();
      for (const auto& c : j.at("checkpoints")) {
        row.checkpoints.push_back({c.at("t").get<Timestamp>(), c.at("preacc").get<double>()});
      }
      rows.push_back(std::move(row));
    } catch (const Json::exception& e) {
      raise(ErrorKind::Comparison, path.string() + " is not a run report: " + e.what());
    }
  }
  for (auto& row : rows) {
    if (row.checkpoints.size() != rows.front().checkpoints.size() ||
        !std::equal(row.checkpoints.begin(), row.checkpoints.end(),
                    rows.front().checkpoints.begin(),
                    [](const auto& a, const auto& b) { return a.t == b.t; })) {
      raise(ErrorKind::Comparison, "checkpoints of " + row.source + " differ from those of " +
                                       rows.front().source);
    }
    row.delta = row.mean_preacc - rows.front().mean_preacc;
  }
  return rows;
}

std::string comparison_table(const std::vector<ComparisonRow>& rows) {
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> header = {"learner", "dataset", "mean preACC"};
  for (const auto& c : rows.front().checkpoints) header.push_back("@" + std::to_string(c.t));
  header.push_back("delta");
  header.push_back("source");
  cells.push_back(header);
  const auto fixed = [](double v, bool sign) {
    char buf[32];
    std::snprintf(buf, sizeof buf, sign ? "%+.4f" : "%.4f", v);
    return std::string(buf);
  };
  for (const auto& r : rows) {
    std::vector<std::string> line = {r.learner, r.dataset, fixed(r.mean_preacc, false)};
    for (const auto& c : r.checkpoints) line.push_back(fixed(c.preacc, false));
    line.push_back(fixed(r.delta, true));
    line.push_back(r.source);
    cells.push_back(line);
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& line : cells) {
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  }
  std::string out;
  for (const auto& line : cells) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      out += line[i];
      if (i + 1 < line.size()) out += std::string(width[i] - line[i].size() + 2, ' ');
    }
    out += '\n';
  }
  return out;
}

std::string comparison_json(const std::vector<ComparisonRow>& rows) {
  Json out = Json::array();
  for (const auto& r : rows) {
    Json checkpoints = Json::array();
    for (const auto& c : r.checkpoints) checkpoints.push_back({{"t", c.t}, {"preacc", c.preacc}});
    out.push_back({{"source", r.source},
                   {"learner", r.learner},
                   {"dataset", r.dataset},
                   {"mean_preacc", r.mean_preacc},
                   {"checkpoints", checkpoints},
                   {"delta_mean_preacc", r.delta}});
  }
  return out.dump(2) + "\n";
}

}  // namespace curie
