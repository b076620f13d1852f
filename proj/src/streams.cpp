#include "curie/streams.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <string>
#include <unordered_map>

#include <boost/tokenizer.hpp>

#include "curie/error.hpp"

namespace curie {

std::string_view to_string(ConceptFamily family) noexcept {
  switch (family) {
    case ConceptFamily::Circle:
      return "circle";
    case ConceptFamily::Line:
      return "line";
    case ConceptFamily::SineV:
      return "sinev";
    case ConceptFamily::SineH:
      return "sineh";
  }
  return "circle";
}

std::optional<ConceptFamily> parse_concept_family(std::string_view name) noexcept {
  for (auto f : {ConceptFamily::Circle, ConceptFamily::Line, ConceptFamily::SineV,
                 ConceptFamily::SineH}) {
    if (to_string(f) == name) return f;
  }
  return std::nullopt;
}

namespace {

std::size_t param_count(ConceptFamily family) { return family == ConceptFamily::Circle ? 3 : 1; }

}  // namespace

void ConceptSpec::validate() const {
  if (params.size() != param_count(family)) {
    raise(ErrorKind::Config, std::string(to_string(family)) + " concept expects " +
                                 std::to_string(param_count(family)) + " parameters");
  }
  for (double p : params) {
    if (!std::isfinite(p)) raise(ErrorKind::Config, "concept parameters must be finite");
  }
  switch (family) {
    case ConceptFamily::Circle:
      if (params[0] < 0 || params[0] > 1 || params[1] < 0 || params[1] > 1 || params[2] <= 0) {
        raise(ErrorKind::Config, "circle needs a centre in [0,1]^2 and a positive radius");
      }
      break;
    case ConceptFamily::Line:
      if (params[0] < 0 || params[0] > 2) raise(ErrorKind::Config, "line intercept must lie in [0,2]");
      break;
    case ConceptFamily::SineV:
      if (params[0] < 0 || params[0] > 1) raise(ErrorKind::Config, "sine offset must lie in [0,1]");
      break;
    case ConceptFamily::SineH:
      break;
  }
}

ConceptSpec default_old_concept(ConceptFamily family) {
  switch (family) {
    case ConceptFamily::Circle:
      return {family, {0.4, 0.5, 0.35}};
    case ConceptFamily::Line:
      return {family, {0.9}};
    case ConceptFamily::SineV:
      return {family, {0.4}};
    case ConceptFamily::SineH:
      return {family, {0.0}};
  }
  return {};
}

ConceptSpec default_new_concept(ConceptFamily family) {
  switch (family) {
    case ConceptFamily::Circle:
      return {family, {0.6, 0.5, 0.4}};
    case ConceptFamily::Line:
      return {family, {1.1}};
    case ConceptFamily::SineV:
      return {family, {0.6}};
    case ConceptFamily::SineH:
      return {family, {std::numbers::pi}};
  }
  return {};
}

Label concept_label(const ConceptSpec& concept_spec, std::span<const double> x) {
  concept_spec.validate();
  if (x.size() != 2) raise(ErrorKind::Input, "synthetic concepts take exactly 2 features");
  for (double v : x) {
    if (!(v >= 0.0 && v <= 1.0)) raise(ErrorKind::Input, "synthetic features must lie in [0,1]");
  }
  const auto& p = concept_spec.params;
  constexpr double kThreePi = 3.0 * std::numbers::pi;
  bool positive = false;
  switch (concept_spec.family) {
    case ConceptFamily::Circle: {
      const double dx = x[0] - p[0];
      const double dy = x[1] - p[1];
      positive = dx * dx + dy * dy <= p[2] * p[2];
      break;
    }
    case ConceptFamily::Line:
      positive = x[1] <= -x[0] + p[0];
      break;
    case ConceptFamily::SineV:
      positive = x[1] <= p[0] + 0.1 * std::sin(kThreePi * x[0]);
      break;
    case ConceptFamily::SineH:
      positive = x[1] <= 0.5 + 0.3 * std::sin(kThreePi * x[0] + p[0]);
      break;
  }
  return positive ? 1 : 0;
}

void DriftScenario::validate() const {
  old_concept.validate();
  new_concept.validate();
  if (drift_width < 1) raise(ErrorKind::Config, "drift_width must be at least 1");
  if (drift_at + drift_width > length) {
    raise(ErrorKind::Config, "drift window extends past the end of the stream");
  }
}

DriftScenario DriftScenario::standard(ConceptFamily family, std::size_t drift_width,
                                      std::uint64_t seed) {
  DriftScenario s;
  s.old_concept = default_old_concept(family);
  s.new_concept = default_new_concept(family);
  s.drift_width = drift_width;
  s.seed = seed;
  return s;
}

namespace {

// Top 53 bits of a 64-bit draw; unlike std::uniform_real_distribution the
// result is the same on every standard library.
double unit_draw(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

constexpr std::uint64_t kScheduleStream = 0x9E3779B97F4A7C15ULL;

}  // namespace

std::vector<bool> concept_schedule(const DriftScenario& scenario) {
  scenario.validate();
  std::mt19937_64 engine(scenario.seed ^ kScheduleStream);
  std::vector<bool> from_new(scenario.length, false);
  for (std::size_t t = scenario.drift_at; t < scenario.length; ++t) {
    if (t >= scenario.drift_at + scenario.drift_width) {
      from_new[t] = true;
      continue;
    }
    const double p = static_cast<double>(t - scenario.drift_at + 1) /
                     static_cast<double>(scenario.drift_width);
    from_new[t] = unit_draw(engine) < p;
  }
  return from_new;
}

std::vector<LabeledInstance> generate_stream(const DriftScenario& scenario) {
  const std::vector<bool> from_new = concept_schedule(scenario);
  std::mt19937_64 engine(scenario.seed);
  std::vector<LabeledInstance> out;
  out.reserve(scenario.length);
  for (std::size_t t = 0; t < scenario.length; ++t) {
    LabeledInstance inst;
    inst.features = {unit_draw(engine), unit_draw(engine)};
    inst.label = concept_label(from_new[t] ? scenario.new_concept : scenario.old_concept,
                               inst.features);
    out.push_back(std::move(inst));
  }
  return out;
}

namespace {

using Tokenizer = boost::tokenizer<boost::escaped_list_separator<char>>;

std::vector<std::string> split_row(const std::string& line, char delimiter) {
  boost::escaped_list_separator<char> sep('\\', delimiter, '"');
  Tokenizer tok(line, sep);
  std::vector<std::string> cells;
  for (const auto& cell : tok) cells.push_back(cell);
  return cells;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::optional<double> parse_number(const std::string& text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) return std::nullopt;
  return value;
}

}  // namespace

CsvLoad load_csv(const std::filesystem::path& path, const StreamSchema& schema,
                 std::size_t limit) {
  if (schema.feature_columns.empty()) raise(ErrorKind::Schema, "schema lists no feature columns");
  if (schema.label_column.empty()) raise(ErrorKind::Schema, "schema names no label column");
  if (schema.class_count < 2) raise(ErrorKind::Schema, "schema needs at least two classes");
  if (!schema.label_values.empty() && schema.label_values.size() != schema.class_count) {
    raise(ErrorKind::Schema, "label_values must list exactly class_count labels");
  }
  std::ifstream in(path);
  if (!in) raise(ErrorKind::Io, "cannot open " + path.string());

  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  if (schema.has_header) {
    if (!std::getline(in, line)) raise(ErrorKind::Schema, path.string() + " is empty");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    for (auto& h : split_row(line, schema.delimiter)) header.push_back(trim(h));
  } else {
    header = schema.column_names;
    if (header.empty()) raise(ErrorKind::Schema, "headerless file needs column_names");
  }

  const auto column_of = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      raise(ErrorKind::Schema, path.string() + ": missing column '" + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  std::vector<std::size_t> feature_cols;
  for (const auto& name : schema.feature_columns) feature_cols.push_back(column_of(name));
  const std::size_t label_col = column_of(schema.label_column);

  std::unordered_map<std::string, Label> label_index;
  for (std::size_t i = 0; i < schema.label_values.size(); ++i) {
    label_index.emplace(schema.label_values[i], static_cast<Label>(i));
  }
  const auto is_missing = [&](const std::string& cell) {
    return std::find(schema.missing_markers.begin(), schema.missing_markers.end(), cell) !=
           schema.missing_markers.end();
  };

  CsvLoad result;
  const auto reject = [&](const std::string& why) {
    if (schema.row_errors == RowErrorPolicy::Skip) {
      ++result.rows_skipped_malformed;
      return;
    }
    raise(ErrorKind::Row, path.string() + ":" + std::to_string(line_no) + ": " + why);
  };

  while ((limit == 0 || result.instances.size() < limit) && std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    std::vector<std::string> cells;
    try {
      cells = split_row(line, schema.delimiter);
    } catch (const boost::escaped_list_error& e) {
      reject(std::string("unparseable row: ") + e.what());
      continue;
    }
    for (auto& c : cells) c = trim(std::move(c));
    if (cells.size() != header.size()) {
      reject("expected " + std::to_string(header.size()) + " fields, found " +
             std::to_string(cells.size()));
      continue;
    }

    const std::string& label_text = cells[label_col];
    std::optional<Label> label;
    if (!label_index.empty()) {
      if (auto it = label_index.find(label_text); it != label_index.end()) label = it->second;
    } else if (auto v = parse_number(label_text);
               v && *v >= 0 && *v == std::floor(*v) && *v < static_cast<double>(schema.class_count)) {
      label = static_cast<Label>(*v);
    }
    if (!label) {
      if (is_missing(label_text) && schema.missing != MissingPolicy::Fail) {
        ++result.rows_dropped_missing;
        continue;
      }
      reject("unknown label '" + label_text + "'");
      continue;
    }

    LabeledInstance inst;
    inst.label = *label;
    inst.features.reserve(feature_cols.size());
    bool has_missing = false;
    bool malformed = false;
    for (std::size_t col : feature_cols) {
      const std::string& cell = cells[col];
      if (is_missing(cell)) {
        has_missing = true;
        inst.features.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      const auto v = parse_number(cell);
      if (!v) {
        reject("malformed numeric value '" + cell + "' in column '" + header[col] + "'");
        malformed = true;
        break;
      }
      inst.features.push_back(*v);
    }
    if (malformed) continue;
    if (has_missing) {
      if (schema.missing == MissingPolicy::Drop) {
        ++result.rows_dropped_missing;
        continue;
      }
      if (schema.missing == MissingPolicy::Fail) {
        raise(ErrorKind::Row, path.string() + ":" + std::to_string(line_no) + ": missing value");
      }
    }
    result.instances.push_back(std::move(inst));
    result.source_lines.push_back(line_no);
  }
  return result;
}

PreprocessReport preprocess(std::vector<LabeledInstance>& instances, std::size_t preparatory,
                            bool impute_median, Normalization normalization) {
  if (preparatory == 0 || preparatory > instances.size()) {
    raise(ErrorKind::Config, "preprocessing needs 1..N preparatory instances");
  }
  const std::size_t dims = instances.front().features.size();
  PreprocessReport report;
  report.medians.assign(dims, 0.0);
  report.minimum.assign(dims, 0.0);
  report.maximum.assign(dims, 0.0);

  for (std::size_t n = 0; n < dims; ++n) {
    std::vector<double> seen;
    seen.reserve(preparatory);
    for (std::size_t i = 0; i < preparatory; ++i) {
      const double v = instances[i].features.at(n);
      if (!std::isnan(v)) seen.push_back(v);
    }
    if (!seen.empty()) {
      std::sort(seen.begin(), seen.end());
      const std::size_t mid = seen.size() / 2;
      report.medians[n] = seen.size() % 2 == 1 ? seen[mid] : 0.5 * (seen[mid - 1] + seen[mid]);
    } else if (impute_median) {
      raise(ErrorKind::Row, "feature " + std::to_string(n) +
                                " has no observed value in the preparatory segment");
    }
  }

  for (auto& inst : instances) {
    for (std::size_t n = 0; n < dims; ++n) {
      if (std::isnan(inst.features[n])) {
        if (!impute_median) raise(ErrorKind::Row, "missing value without an imputation policy");
        inst.features[n] = report.medians[n];
        ++report.imputed_cells;
      }
    }
  }

  for (std::size_t n = 0; n < dims; ++n) {
    double lo = instances[0].features[n];
    double hi = lo;
    for (std::size_t i = 1; i < preparatory; ++i) {
      lo = std::min(lo, instances[i].features[n]);
      hi = std::max(hi, instances[i].features[n]);
    }
    report.minimum[n] = lo;
    report.maximum[n] = hi;
  }

  if (normalization == Normalization::MinMaxFromPreparatory) {
    for (auto& inst : instances) {
      for (std::size_t n = 0; n < dims; ++n) {
        const double span = report.maximum[n] - report.minimum[n];
        inst.features[n] = span > 0 ? (inst.features[n] - report.minimum[n]) / span
                                    : inst.features[n] - report.minimum[n];
      }
    }
  }
  return report;
}

}  // namespace curie
