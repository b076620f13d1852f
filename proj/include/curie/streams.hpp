#pragma once

// Synthetic two-feature drifting streams and CSV ingestion of real datasets.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "curie/sca.hpp"

namespace curie {

enum class ConceptFamily { Circle, Line, SineV, SineH };

std::string_view to_string(ConceptFamily family) noexcept;
std::optional<ConceptFamily> parse_concept_family(std::string_view name) noexcept;

/// Labeling function over [0,1]^2.
///   Circle {a, b, r}: 1 iff (x1-a)^2 + (x2-b)^2 <= r^2
///   Line   {b}:       1 iff x2 <= -x1 + b
///   SineV  {a}:       1 iff x2 <= a + 0.1 sin(3 pi x1)
///   SineH  {phi}:     1 iff x2 <= 0.5 + 0.3 sin(3 pi x1 + phi)
struct ConceptSpec {
  ConceptFamily family = ConceptFamily::Circle;
  std::vector<double> params;

  void validate() const;
  bool operator==(const ConceptSpec&) const = default;
};

ConceptSpec default_old_concept(ConceptFamily family);
ConceptSpec default_new_concept(ConceptFamily family);

Label concept_label(const ConceptSpec& concept_spec, std::span<const double> features);

struct DriftScenario {
  ConceptSpec old_concept;
  ConceptSpec new_concept;
  std::size_t length = 2000;
  std::size_t drift_at = 1000;
  /// 1 = abrupt; larger values ramp the new concept in linearly.
  std::size_t drift_width = 1;
  std::uint64_t seed = 0;

  void validate() const;

  static DriftScenario standard(ConceptFamily family, std::size_t drift_width,
                                std::uint64_t seed);
};

inline constexpr std::size_t kAbruptWidth = 1;
inline constexpr std::size_t kGradualWidth = 500;

/// Per instance: whether its label comes from the new concept. Inside the
/// drift window the new concept is drawn with probability
/// (t - drift_at + 1) / drift_width.
std::vector<bool> concept_schedule(const DriftScenario& scenario);

/// Features uniform on [0,1]^2; deterministic for a given scenario.
std::vector<LabeledInstance> generate_stream(const DriftScenario& scenario);

enum class Normalization { None, MinMaxFromPreparatory };
enum class MissingPolicy { Fail, Drop, ImputePreparatoryMedian };
enum class RowErrorPolicy { Fail, Skip };

struct StreamSchema {
  std::vector<std::string> feature_columns;
  std::string label_column;
  std::size_t class_count = 2;
  /// Label text of class 0, 1, ...; empty means integer labels.
  std::vector<std::string> label_values;
  Normalization normalization = Normalization::None;
  /// Headerless files name their columns here.
  bool has_header = true;
  std::vector<std::string> column_names;
  std::vector<std::string> missing_markers = {"?", "NA", "", "nan", "NaN"};
  MissingPolicy missing = MissingPolicy::Drop;
  RowErrorPolicy row_errors = RowErrorPolicy::Fail;
  char delimiter = ',';
};

struct CsvLoad {
  std::vector<LabeledInstance> instances;
  /// 1-based file line of every instance.
  std::vector<std::size_t> source_lines;
  std::size_t rows_dropped_missing = 0;
  std::size_t rows_skipped_malformed = 0;
};

/// Reads the first `limit` accepted rows (0 = all) in file order. With
/// MissingPolicy::ImputePreparatoryMedian missing cells become NaN for
/// preprocess() to fill.
CsvLoad load_csv(const std::filesystem::path& path, const StreamSchema& schema,
                 std::size_t limit);

struct PreprocessReport {
  std::vector<double> medians;
  std::vector<double> minimum;
  std::vector<double> maximum;
  std::size_t imputed_cells = 0;
};

/// Fits imputation medians and min-max scaling on the first `preparatory`
/// instances only and applies them to the whole sequence.
PreprocessReport preprocess(std::vector<LabeledInstance>& instances, std::size_t preparatory,
                            bool impute_median, Normalization normalization);

}  // namespace curie
