#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "curie/error.hpp"
#include "curie/experiment.hpp"

using namespace curie;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("curie_experiment_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ExperimentConfig small_curie(const fs::path& out) {
  ExperimentConfig c;
  c.dataset.family = ConceptFamily::SineV;
  c.dataset.name = "sinev-abrupt";
  c.dataset.length = 600;
  c.dataset.drift_at = 300;
  c.learner.kind = LearnerKind::Curie;
  c.learner.bins = 10;
  c.evaluation.checkpoints = {300, 600};
  c.evaluation.seeds = {1, 2};
  c.output.directory = out.string();
  c.output.name = "small";
  return c;
}

}  // namespace

TEST(Presets, RealDataParameters) {
  const auto elec = preset("elec2-curie");
  EXPECT_EQ(elec.learner.kind, LearnerKind::Curie);
  EXPECT_EQ(elec.learner.bins, 5u);
  EXPECT_EQ(elec.learner.window, 50u);
  EXPECT_DOUBLE_EQ(elec.learner.threshold, 0.05);
  EXPECT_EQ(elec.dataset.schema.feature_columns.size(), 5u);
  EXPECT_DOUBLE_EQ(preset("elec2-knn-paired").learner.threshold, 0.1);

  const auto gmsc = preset("gmsc-curie");
  EXPECT_EQ(gmsc.learner.bins, 3u);
  EXPECT_EQ(gmsc.learner.window, 250u);
  EXPECT_DOUBLE_EQ(gmsc.learner.threshold, 0.01);
  EXPECT_EQ(gmsc.dataset.schema.feature_columns.size(), 10u);
  EXPECT_EQ(gmsc.dataset.schema.missing, MissingPolicy::ImputePreparatoryMedian);
  EXPECT_DOUBLE_EQ(preset("gmsc-knn-paired").learner.threshold, 0.001);

  const auto poker = preset("poker-curie");
  EXPECT_EQ(poker.learner.bins, 3u);
  EXPECT_EQ(poker.learner.window, 250u);
  EXPECT_DOUBLE_EQ(poker.learner.threshold, 0.001);
  EXPECT_EQ(poker.dataset.schema.class_count, 10u);
  EXPECT_FALSE(poker.dataset.schema.has_header);

  for (const auto& name : {"elec2-curie", "gmsc-knn-paired", "poker-curie"}) {
    const auto c = preset(name);
    EXPECT_EQ(c.dataset.limit, 20000u);
    EXPECT_DOUBLE_EQ(c.evaluation.preparatory_fraction, 0.5);
    EXPECT_EQ(c.evaluation.smoothing, 500u);
    EXPECT_EQ(c.learner.neighborhood, NeighborhoodKind::VonNeumann);
    EXPECT_EQ(c.learner.radius, 1u);
    EXPECT_EQ(c.learner.k, 5u);
    EXPECT_EQ(c.output.name, name);
  }
}

TEST(Presets, SyntheticGrid) {
  const auto names = preset_names();
  EXPECT_EQ(names.size(), 6u + 48u);
  const auto abrupt = preset("circle-abrupt-2x20-adaptive");
  EXPECT_EQ(abrupt.learner.kind, LearnerKind::ScaAdaptive);
  EXPECT_EQ(abrupt.learner.bins, 20u);
  EXPECT_EQ(abrupt.learner.window, 25u);
  EXPECT_EQ(abrupt.learner.adapt_at, Timestamp{1025});
  EXPECT_EQ(abrupt.evaluation.checkpoints, (std::vector<Timestamp>{1000, 1050, 2000}));
  const auto gradual = preset("sineh-gradual-2x5-nonadaptive");
  EXPECT_EQ(gradual.learner.kind, LearnerKind::Sca);
  EXPECT_EQ(gradual.dataset.drift_width, 500u);
  EXPECT_EQ(gradual.evaluation.checkpoints, (std::vector<Timestamp>{1000, 1700, 2000}));
  for (const auto& n : names) EXPECT_NO_THROW(preset(n).validate()) << n;
  try {
    preset("nope");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Config);
  }
}

TEST(Config, IniRoundTripIsExact) {
  for (const auto& name : {"elec2-knn-paired", "poker-curie", "line-gradual-2x10-adaptive"}) {
    const auto c = preset(name);
    const auto back = parse_config_text(c.to_ini());
    EXPECT_EQ(back.to_map(), c.to_map()) << name;
    EXPECT_EQ(back.to_ini(), c.to_ini());
  }
}

TEST(Config, SettingsOverrideAndUnknownKeysAreAllReported) {
  auto c = apply_settings(ExperimentConfig{}, {{"learner.bins", "7"}, {"learner.kind", "sca"}});
  EXPECT_EQ(c.learner.bins, 7u);
  EXPECT_EQ(c.learner.kind, LearnerKind::Sca);
  try {
    apply_settings(ExperimentConfig{}, {{"learner.binz", "7"}, {"learner.window", "x"}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Config);
    const std::string what = e.what();
    EXPECT_NE(what.find("learner.binz"), std::string::npos);
    EXPECT_NE(what.find("learner.window"), std::string::npos);
  }
}

TEST(Config, ValidationListsEveryViolation) {
  ExperimentConfig c;
  c.learner.bins = 1;
  c.learner.threshold = 1.5;
  c.evaluation.seeds.clear();
  c.evaluation.checkpoints = {5000};
  try {
    c.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Config);
    const std::string what = e.what();
    for (const char* key : {"learner.bins", "learner.threshold", "evaluation.seeds",
                            "evaluation.checkpoints"}) {
      EXPECT_NE(what.find(key), std::string::npos) << key;
    }
  }
  ExperimentConfig big;
  big.dataset.kind = DatasetKind::Csv;
  big.dataset.path = "x.csv";
  big.dataset.schema.feature_columns = {"a", "b", "c", "d", "e", "f", "g", "h"};
  big.dataset.schema.label_column = "y";
  big.learner.bins = 10;
  EXPECT_THROW(big.validate(), Error);
}

TEST(Experiment, ReportsAreCompleteAndDeterministic) {
  const auto dir_a = scratch("a");
  const auto dir_b = scratch("b");
  const auto a = run_experiment(small_curie(dir_a));
  const auto b = run_experiment(small_curie(dir_b));
  ASSERT_EQ(a.runs.size(), 2u);
  for (const char* seed : {"seed-1", "seed-2"}) {
    for (const char* file : {"trace.csv", "summary.json", "timing.json", "config.ini"}) {
      ASSERT_TRUE(fs::exists(dir_a / "small" / seed / file)) << file;
    }
    // Only the echoed output directory may differ.
    EXPECT_EQ(slurp(dir_a / "small" / seed / "trace.csv"),
              slurp(dir_b / "small" / seed / "trace.csv"));
    auto summary_b = slurp(dir_b / "small" / seed / "summary.json");
    summary_b.replace(summary_b.find(dir_b.string()), dir_b.string().size(), dir_a.string());
    EXPECT_EQ(slurp(dir_a / "small" / seed / "summary.json"), summary_b);
  }
  EXPECT_EQ(slurp(dir_a / "small" / "aggregate.json"), slurp(dir_b / "small" / "aggregate.json"));

  const auto& r = a.runs[0].report;
  EXPECT_EQ(r.preparatory, 30u);
  EXPECT_EQ(r.per_step.size(), 570u);
  EXPECT_EQ(r.checkpoints.size(), 2u);
  const std::string summary = slurp(dir_a / "small" / "seed-1" / "summary.json");
  for (const char* key : {"\"mean_preacc\"", "\"checkpoints\"", "\"drift_events\"",
                          "\"learner\": \"curie\"", "\"config\""}) {
    EXPECT_NE(summary.find(key), std::string::npos) << key;
  }

  // The echoed config reproduces the run.
  const auto echoed = parse_config_text(slurp(dir_a / "small" / "seed-1" / "config.ini"));
  auto again = echoed;
  again.output.directory = scratch("c").string();
  run_experiment(again);
  EXPECT_EQ(slurp(dir_a / "small" / "seed-2" / "trace.csv"),
            slurp(fs::path(again.output.directory) / "small" / "seed-2" / "trace.csv"));
}

TEST(Experiment, MissingDatasetIsAnIoError) {
  auto c = preset("elec2-curie");
  c.dataset.path = "/nonexistent/elec2.csv";
  try {
    run_experiment(c, false);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Io);
  }
}

TEST(Compare, NeedsTwoReportsWithMatchingCheckpoints) {
  const auto dir = scratch("cmp");
  auto c = small_curie(dir);
  c.evaluation.seeds = {0};
  run_experiment(c);
  c.learner.kind = LearnerKind::Sca;
  c.output.name = "plain";
  run_experiment(c);
  const auto s1 = dir / "small" / "aggregate.json";
  const auto s2 = dir / "plain" / "seed-0" / "summary.json";

  try {
    compare_reports({s1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Comparison);
  }
  const auto rows = compare_reports({s1, s2});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].delta, 0.0);
  EXPECT_DOUBLE_EQ(rows[1].delta, rows[1].mean_preacc - rows[0].mean_preacc);
  EXPECT_NE(comparison_table(rows).find("@600"), std::string::npos);
  EXPECT_NE(comparison_json(rows).find("delta_mean_preacc"), std::string::npos);

  c.evaluation.checkpoints = {400};
  c.output.name = "other";
  run_experiment(c);
  EXPECT_THROW(compare_reports({s1, dir / "other" / "aggregate.json"}), Error);
}
