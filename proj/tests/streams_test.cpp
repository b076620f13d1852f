#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <string>

#include "curie/error.hpp"
#include "curie/streams.hpp"
#include "support/poker_surrogate.hpp"

using namespace curie;
namespace fs = std::filesystem;

namespace {

Label label_of(const ConceptSpec& c, double x1, double x2) {
  return concept_label(c, std::vector<double>{x1, x2});
}

double positive_share(const ConceptSpec& c) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int positive = 0;
  for (int i = 0; i < 10000; ++i) positive += label_of(c, u(rng), u(rng));
  return positive / 10000.0;
}

fs::path write_file(const std::string& name, const std::string& text) {
  const fs::path p = fs::temp_directory_path() / ("curie_streams_" + name);
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST(Concepts, BoundaryFunctions) {
  const ConceptSpec circle{ConceptFamily::Circle, {0.5, 0.5, 0.3}};
  EXPECT_EQ(label_of(circle, 0.5, 0.5), 1);
  EXPECT_EQ(label_of(circle, 0.0, 0.0), 0);
  EXPECT_EQ(label_of({ConceptFamily::Line, {0.5}}, 0.2, 0.2), 1);
  EXPECT_EQ(label_of({ConceptFamily::Line, {0.5}}, 0.4, 0.2), 0);
  EXPECT_EQ(label_of({ConceptFamily::SineV, {0.4}}, 0.5, 0.2), 1);
  EXPECT_EQ(label_of({ConceptFamily::SineH, {0.0}}, 1.0 / 6.0, 0.79), 1);
  EXPECT_EQ(label_of({ConceptFamily::SineH, {std::numbers::pi}}, 1.0 / 6.0, 0.79), 0);
}

TEST(Concepts, RejectFeaturesOutsideUnitSquareAndBadParams) {
  try {
    label_of({ConceptFamily::Line, {0.5}}, 1.2, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Input);
  }
  EXPECT_THROW(label_of({ConceptFamily::Circle, {0.5, 0.5}}, 0.1, 0.1), Error);
  EXPECT_THROW(label_of({ConceptFamily::Circle, {0.5, 0.5, -1.0}}, 0.1, 0.1), Error);
}

TEST(Concepts, DefaultsAreBalanced) {
  for (auto f : {ConceptFamily::Circle, ConceptFamily::Line, ConceptFamily::SineV,
                 ConceptFamily::SineH}) {
    for (const auto& c : {default_old_concept(f), default_new_concept(f)}) {
      const double share = positive_share(c);
      EXPECT_GE(share, 0.35) << to_string(f);
      EXPECT_LE(share, 0.65) << to_string(f);
    }
    EXPECT_NE(default_old_concept(f), default_new_concept(f));
    EXPECT_EQ(parse_concept_family(to_string(f)), f);
  }
}

TEST(Scenario, ValidationAndDefaults) {
  auto s = DriftScenario::standard(ConceptFamily::Circle, kGradualWidth, 1);
  EXPECT_EQ(s.length, 2000u);
  EXPECT_EQ(s.drift_at, 1000u);
  EXPECT_NO_THROW(s.validate());
  s.drift_width = 1001;
  EXPECT_THROW(s.validate(), Error);
  s.drift_width = 0;
  EXPECT_THROW(s.validate(), Error);
}

TEST(Streams, AbruptSwitchesWhollyAtDriftPoint) {
  const auto s = DriftScenario::standard(ConceptFamily::SineH, kAbruptWidth, 4);
  const auto schedule = concept_schedule(s);
  const auto stream = generate_stream(s);
  ASSERT_EQ(stream.size(), 2000u);
  for (std::size_t t = 0; t < stream.size(); ++t) {
    EXPECT_EQ(schedule[t], t >= 1000);
    const auto& c = t >= 1000 ? s.new_concept : s.old_concept;
    EXPECT_EQ(stream[t].label, concept_label(c, stream[t].features));
  }
}

TEST(Streams, GradualRampMixesAboutHalfOverTheWindow) {
  double share = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto schedule =
        concept_schedule(DriftScenario::standard(ConceptFamily::Circle, kGradualWidth, seed));
    int fresh = 0;
    for (std::size_t t = 1000; t < 1500; ++t) fresh += schedule[t];
    share += fresh / 500.0;
    for (std::size_t t = 0; t < 1000; ++t) ASSERT_FALSE(schedule[t]);
    for (std::size_t t = 1500; t < 2000; ++t) ASSERT_TRUE(schedule[t]);
  }
  EXPECT_NEAR(share / 10.0, 0.5, 0.05);
}

TEST(Streams, DeterministicPerSeedAndFeaturesShared) {
  const auto a = generate_stream(DriftScenario::standard(ConceptFamily::Line, 1, 7));
  const auto b = generate_stream(DriftScenario::standard(ConceptFamily::Line, 1, 7));
  const auto c = generate_stream(DriftScenario::standard(ConceptFamily::Line, 500, 7));
  const auto d = generate_stream(DriftScenario::standard(ConceptFamily::Line, 1, 8));
  EXPECT_EQ(a, b);
  EXPECT_NE(a, d);
  for (std::size_t t = 0; t < a.size(); ++t) {
    ASSERT_EQ(a[t].features, c[t].features);
    for (double v : a[t].features) ASSERT_TRUE(v >= 0.0 && v < 1.0);
  }
}

TEST(LoadCsv, HeaderLabelsAndOrder) {
  const auto path = write_file("elec.csv",
                               "date,day,period,nswprice,class\n"
                               "0,2,0.0,0.05,UP\n"
                               "0,2,0.02,0.04,DOWN\n"
                               "0,3,0.04,?,UP\n"
                               "0,3,0.06,0.03,DOWN\n");
  StreamSchema s;
  s.feature_columns = {"day", "nswprice"};
  s.label_column = "class";
  s.label_values = {"DOWN", "UP"};
  const auto load = load_csv(path, s, 0);
  ASSERT_EQ(load.instances.size(), 3u);
  EXPECT_EQ(load.rows_dropped_missing, 1u);
  EXPECT_EQ(load.instances[0].features, (std::vector<double>{2.0, 0.05}));
  EXPECT_EQ(load.instances[0].label, 1);
  EXPECT_EQ(load.instances[1].label, 0);
  EXPECT_EQ(load.source_lines, (std::vector<std::size_t>{2, 3, 5}));

  const auto first_two = load_csv(path, s, 2);
  EXPECT_EQ(first_two.instances.size(), 2u);
}

TEST(LoadCsv, SchemaAndRowErrors) {
  const auto path = write_file("bad.csv", "a,b,y\n1,2,0\n1,x,1\n3,4,1\n");
  StreamSchema s;
  s.feature_columns = {"a", "b"};
  s.label_column = "y";
  try {
    load_csv(path, s, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Row);
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos);
  }
  s.row_errors = RowErrorPolicy::Skip;
  const auto load = load_csv(path, s, 0);
  EXPECT_EQ(load.instances.size(), 2u);
  EXPECT_EQ(load.rows_skipped_malformed, 1u);

  s.feature_columns = {"a", "missing"};
  try {
    load_csv(path, s, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Schema);
  }
  EXPECT_THROW(load_csv(fs::temp_directory_path() / "curie_no_such_file.csv", s, 0), Error);
}

TEST(LoadCsv, IntegerLabelsOutOfRangeAreRowErrors) {
  const auto path = write_file("range.csv", "a,y\n0.5,1\n0.5,2\n");
  StreamSchema s;
  s.feature_columns = {"a"};
  s.label_column = "y";
  EXPECT_THROW(load_csv(path, s, 0), Error);
  s.class_count = 3;
  EXPECT_EQ(load_csv(path, s, 0).instances.size(), 2u);
}

TEST(LoadCsv, HeaderlessWithColumnNames) {
  const auto path = write_file("poker.data", "1,10,1,11,1,13,1,12,1,1,9\n2,2,3,2,4,5,1,7,2,9,1\n");
  StreamSchema s;
  s.has_header = false;
  s.column_names = {"S1", "C1", "S2", "C2", "S3", "C3", "S4", "C4", "S5", "C5", "CLASS"};
  s.feature_columns = {"S1", "C1", "S2", "C2", "S3", "C3", "S4", "C4", "S5", "C5"};
  s.label_column = "CLASS";
  s.class_count = 10;
  const auto load = load_csv(path, s, 0);
  ASSERT_EQ(load.instances.size(), 2u);
  EXPECT_EQ(load.instances[0].features.size(), 10u);
  EXPECT_EQ(load.instances[0].label, 9);
}

TEST(Preprocess, MedianImputationAndScalingFitOnPreparatoryOnly) {
  const auto path = write_file("gmsc.csv",
                               ",y,income,age\n"
                               "1,0,10,20\n"
                               "2,0,NA,30\n"
                               "3,1,30,40\n"
                               "4,0,100,50\n"
                               "5,1,NA,60\n");
  StreamSchema s;
  s.feature_columns = {"income", "age"};
  s.label_column = "y";
  s.missing = MissingPolicy::ImputePreparatoryMedian;
  auto load = load_csv(path, s, 0);
  ASSERT_EQ(load.instances.size(), 5u);
  const auto report =
      preprocess(load.instances, 3, true, Normalization::MinMaxFromPreparatory);
  EXPECT_DOUBLE_EQ(report.medians[0], 20.0);
  EXPECT_EQ(report.imputed_cells, 2u);
  EXPECT_DOUBLE_EQ(report.minimum[0], 10.0);
  EXPECT_DOUBLE_EQ(report.maximum[0], 30.0);
  EXPECT_DOUBLE_EQ(load.instances[1].features[0], 0.5);
  EXPECT_DOUBLE_EQ(load.instances[3].features[0], 4.5);  // stream values may leave [0,1]
  EXPECT_DOUBLE_EQ(load.instances[4].features[0], 0.5);
  EXPECT_DOUBLE_EQ(load.instances[4].features[1], 2.0);
}

TEST(PokerSurrogate, HandClasses) {
  using surrogate::poker_class;
  EXPECT_EQ(poker_class({1, 1, 1, 1, 1}, {10, 11, 12, 13, 1}), 9);
  EXPECT_EQ(poker_class({2, 2, 2, 2, 2}, {5, 6, 7, 8, 9}), 8);
  EXPECT_EQ(poker_class({1, 2, 3, 4, 1}, {7, 7, 7, 7, 2}), 7);
  EXPECT_EQ(poker_class({1, 2, 3, 4, 1}, {7, 7, 7, 2, 2}), 6);
  EXPECT_EQ(poker_class({3, 3, 3, 3, 3}, {2, 5, 9, 11, 13}), 5);
  EXPECT_EQ(poker_class({1, 2, 3, 4, 1}, {1, 2, 3, 4, 5}), 4);
  EXPECT_EQ(poker_class({1, 2, 3, 4, 1}, {10, 11, 12, 13, 1}), 4);
  EXPECT_EQ(poker_class({1, 2, 3, 4, 1}, {9, 9, 9, 4, 5}), 3);
  EXPECT_EQ(poker_class({1, 2, 3, 4, 1}, {9, 9, 4, 4, 5}), 2);
  EXPECT_EQ(poker_class({1, 2, 3, 4, 1}, {9, 9, 4, 3, 5}), 1);
  EXPECT_EQ(poker_class({1, 2, 3, 4, 1}, {9, 2, 4, 3, 13}), 0);

  const auto stream = surrogate::poker_stream(20000, 1);
  std::size_t nothing = 0;
  for (const auto& x : stream) nothing += x.label == 0;
  EXPECT_NEAR(nothing / 20000.0, 0.501, 0.02);
}
