#pragma once

// Declarative experiment configuration, presets, the experiment driver and
// report comparison.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "curie/eval.hpp"
#include "curie/lattice.hpp"
#include "curie/streams.hpp"

namespace curie {

enum class DatasetKind { Synthetic, Csv };
enum class LearnerKind { Sca, ScaAdaptive, Curie, KnnPaired };

struct DatasetConfig {
  DatasetKind kind = DatasetKind::Synthetic;
  /// Free-form label carried into reports.
  std::string name = "circle-abrupt";

  ConceptFamily family = ConceptFamily::Circle;
  /// Empty selects the family defaults.
  std::vector<double> old_params;
  std::vector<double> new_params;
  std::size_t length = 2000;
  std::size_t drift_at = 1000;
  std::size_t drift_width = kAbruptWidth;

  /// Relative paths not found as given are looked up in the dataset
  /// directory (see dataset_directory()).
  std::string path;
  StreamSchema schema;
  /// 0 reads the whole file.
  std::size_t limit = 0;
};

struct LearnerConfig {
  LearnerKind kind = LearnerKind::Curie;
  std::size_t bins = 10;
  NeighborhoodKind neighborhood = NeighborhoodKind::VonNeumann;
  std::size_t radius = 1;
  double margin_fraction = kDefaultMarginFraction;
  std::size_t max_generations = 0;
  std::size_t window = 50;
  double threshold = 0.05;
  std::size_t rebuild_every = 1;
  std::size_t k = 5;
  /// Detection time of the oracle-adaptive sCA; unset disables adaptation.
  std::optional<Timestamp> adapt_at;
};

struct EvaluationConfig {
  double preparatory_fraction = 0.05;
  std::vector<Timestamp> checkpoints;
  std::vector<Timestamp> resets;
  /// Moving-average window of the exported preACC_smoothed column; 0 = off.
  std::size_t smoothing = 0;
  std::vector<std::uint64_t> seeds = {0};
  std::size_t repetitions = 1;
};

struct OutputConfig {
  std::string directory = "out";
  std::string name = "run";
};

struct ExperimentConfig {
  DatasetConfig dataset;
  LearnerConfig learner;
  EvaluationConfig evaluation;
  OutputConfig output;

  /// Raises a Config error listing every violation found.
  void validate() const;

  /// Flat "section.key" -> value view; every field appears.
  std::map<std::string, std::string> to_map() const;
  /// INI text of to_map(); parse_config_text() reads it back unchanged.
  std::string to_ini() const;
};

/// Applies "section.key" -> value assignments on top of `base`. Unknown
/// keys and unparseable values are all reported in one Config error.
ExperimentConfig apply_settings(ExperimentConfig base,
                                const std::map<std::string, std::string>& settings);

std::map<std::string, std::string> read_ini_text(const std::string& text);
std::map<std::string, std::string> read_ini_file(const std::filesystem::path& path);

ExperimentConfig parse_config_text(const std::string& text,
                                   const ExperimentConfig& base = ExperimentConfig{});

std::vector<std::string> preset_names();
/// Raises a Config error for unknown names.
ExperimentConfig preset(const std::string& name);

/// $CURIE_DATA_DIR, or "data" when unset.
std::filesystem::path dataset_directory();
std::filesystem::path resolve_dataset_path(const std::string& path);

struct LoadedStream {
  std::vector<LabeledInstance> instances;
  std::size_t preparatory = 0;
  std::optional<CsvLoad> csv;
  std::optional<PreprocessReport> preprocessing;
};

/// Builds the instance sequence of one run (the seed only affects
/// synthetic data).
LoadedStream load_stream(const ExperimentConfig& config, std::uint64_t seed);

std::unique_ptr<StreamLearner> make_learner(const ExperimentConfig& config, std::size_t dims,
                                            std::size_t class_count);

struct RunResult {
  std::uint64_t seed = 0;
  std::size_t repetition = 0;
  std::size_t instances = 0;
  RunReport report;
  double seconds = 0.0;
  std::optional<CsvLoad> csv;
  std::optional<PreprocessReport> preprocessing;
};

struct ExperimentResult {
  std::vector<RunResult> runs;
  /// Empty when nothing was written.
  std::filesystem::path directory;
};

/// Executes repetitions x seeds runs. With write_reports each run gets
/// trace.csv, summary.json, timing.json and config.ini under
/// <output.directory>/<output.name>/, plus aggregate.json.
ExperimentResult run_experiment(const ExperimentConfig& config, bool write_reports = true);

/// Summary document of one run (no wall-clock; see timing.json).
std::string summary_json(const ExperimentConfig& config, const RunResult& run);

struct ComparisonRow {
  std::string source;
  std::string learner;
  std::string dataset;
  double mean_preacc = 0.0;
  std::vector<CheckpointValue> checkpoints;
  double delta = 0.0;
};

/// Reads summary.json or aggregate.json files. Needs at least two reports
/// with identical checkpoint timestamps; delta is relative to the first.
std::vector<ComparisonRow> compare_reports(const std::vector<std::filesystem::path>& reports);
std::string comparison_table(const std::vector<ComparisonRow>& rows);
std::string comparison_json(const std::vector<ComparisonRow>& rows);

}  // namespace curie
