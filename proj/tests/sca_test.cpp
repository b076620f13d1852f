#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "curie/error.hpp"
#include "curie/sca.hpp"
#include "curie/streams.hpp"
#include "support/oracles.hpp"

using namespace curie;

namespace {

ScaConfig grid(std::size_t dims, std::size_t bins, std::size_t classes = 2) {
  ScaConfig c;
  c.dims = dims;
  c.bins_per_dim = bins;
  c.class_count = classes;
  return c;
}

LabeledInstance inst(std::vector<double> x, Label y) { return {std::move(x), y}; }

}  // namespace

TEST(ScaConfig, DefaultGenerationBudgetIsDiameterPlusOne) {
  EXPECT_EQ(grid(2, 10).resolved_max_generations(), 19u);
  EXPECT_EQ(grid(10, 3).resolved_max_generations(), 21u);
  auto c = grid(2, 10);
  c.max_generations = 5;
  EXPECT_EQ(c.resolved_max_generations(), 5u);
}

TEST(ScaLearner, SeedLocatesWithBoundsSeenSoFar) {
  auto c = grid(1, 4);
  c.margin_fraction = 0.0;
  ScaLearner learner(c);
  const std::vector<LabeledInstance> prep = {inst({0.0}, 0), inst({1.0}, 1), inst({0.3}, 1)};
  learner.seed(prep);
  // First instance: degenerate range [-0.5, 0.5) puts 0.0 in bin 2.
  EXPECT_EQ(learner.lattice().hits(2), (std::vector<Label>{0}));
  EXPECT_EQ(learner.lattice().hits(3), (std::vector<Label>{1}));
  EXPECT_EQ(learner.lattice().hits(1), (std::vector<Label>{1}));
  EXPECT_TRUE(learner.lattice().hits(0).empty());
}

TEST(ScaLearner, CollidingHitsAppendInOrder) {
  ScaLearner learner(grid(2, 5));
  learner.seed(std::vector<LabeledInstance>{inst({0.0, 0.0}, 1), inst({1.0, 1.0}, 0),
                                            inst({0.01, 0.01}, 1), inst({0.02, 0.02}, 0)});
  EXPECT_EQ(learner.lattice().hits(0), (std::vector<Label>{1, 0}));
}

TEST(ScaLearner, PrepareLeavesNoEmptyCell) {
  const auto stream = generate_stream(DriftScenario::standard(ConceptFamily::Circle, 1, 3));
  for (std::size_t bins : {5u, 10u, 20u}) {
    ScaLearner learner(grid(2, bins));
    const auto gens = learner.prepare(std::span(stream).first(100));
    EXPECT_TRUE(learner.prepared());
    EXPECT_EQ(learner.lattice().unassigned_count(), 0u);
    EXPECT_LE(gens, learner.config().resolved_max_generations());
  }
}

TEST(ScaLearner, FewInstancesNeedSeveralGenerations) {
  // Sparse seeding (20 instances) leaves wide gaps to fill; counts must agree
  // with the synchronous oracle.
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto stream = generate_stream(DriftScenario::standard(ConceptFamily::Circle, 1, seed));
    ScaLearner learner(grid(2, 10));
    learner.seed(std::span(stream).first(20));
    learner.resolve_hits();
    const std::vector<Label> seeded(learner.lattice().states().begin(),
                                    learner.lattice().states().end());
    const auto expected = oracle::synchronous_fill(seeded, 2, 10, {}, 2);
    EXPECT_EQ(learner.fill_generations(), expected.generations);
    EXPECT_GE(expected.generations, 3u);
    EXPECT_LE(expected.generations, 5u);
  }
}

TEST(ScaLearner, SingleInstanceFloodsTheLattice) {
  ScaLearner learner(grid(3, 4, 3));
  learner.prepare(std::vector<LabeledInstance>{inst({0.2, 0.4, 0.9}, 2)});
  for (Label s : learner.lattice().states()) EXPECT_EQ(s, 2);
  EXPECT_EQ(learner.predict(std::vector<double>{100.0, -5.0, 0.0}), 2);
}

TEST(ScaLearner, ElecSizedLatticeHas3125Cells) {
  ScaLearner learner(grid(5, 5));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<LabeledInstance> prep;
  for (int i = 0; i < 200; ++i) {
    prep.push_back(inst({u(rng), u(rng), u(rng), u(rng), u(rng)}, static_cast<Label>(rng() % 2)));
  }
  learner.prepare(prep);
  EXPECT_EQ(learner.lattice().cell_count(), 3125u);
  EXPECT_EQ(learner.lattice().unassigned_count(), 0u);
}

TEST(ScaLearner, ErrorsBeforePreparationAndOnBadInput) {
  ScaLearner learner(grid(2, 5));
  try {
    learner.predict(std::vector<double>{0.5, 0.5});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::State);
  }
  EXPECT_THROW(learner.learn_one(inst({0.5, 0.5}, 0)), Error);
  try {
    learner.prepare({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Config);
  }
  EXPECT_THROW(learner.prepare(std::vector<LabeledInstance>{inst({0.5}, 0)}), Error);
  EXPECT_THROW(learner.prepare(std::vector<LabeledInstance>{inst({0.5, 0.5}, 2)}), Error);
}

TEST(ScaLearner, PredictClampsOutOfBoundsToEdgeCell) {
  auto c = grid(1, 4);
  c.margin_fraction = 0.0;
  ScaLearner learner(c);
  learner.prepare(std::vector<LabeledInstance>{inst({0.0}, 0), inst({0.1}, 0), inst({0.9}, 1),
                                               inst({1.0}, 1)});
  EXPECT_EQ(learner.predict(std::vector<double>{5.0}), 1);
  EXPECT_EQ(learner.predict(std::vector<double>{-5.0}), 0);
}

TEST(ScaLearner, LearnOneTouchesOnlyTheEnclosingCell) {
  const auto stream = generate_stream(DriftScenario::standard(ConceptFamily::SineH, 1, 4));
  ScaLearner learner(grid(2, 10));
  learner.prepare(std::span(stream).first(100));
  const std::vector<Label> before(learner.lattice().states().begin(),
                                  learner.lattice().states().end());

  // Inside the current bounds, so the bounds cannot move.
  LabeledInstance x = inst({0.5, 0.5}, 0);
  const std::size_t cell = locate_flat(x.features, learner.bounds(), learner.lattice().shape());
  x.label = before[cell] == 0 ? 1 : 0;
  learner.learn_one(x);
  for (std::size_t f = 0; f < before.size(); ++f) {
    EXPECT_EQ(learner.lattice().state(f), f == cell ? x.label : before[f]);
  }
  learner.learn_one(x);
  EXPECT_EQ(learner.lattice().state(cell), x.label);
}

TEST(ScaLearner, ExtendingTheBoundsRelocatesOldPoints) {
  auto c = grid(1, 4);
  c.margin_fraction = 0.0;
  ScaLearner learner(c);
  learner.prepare(std::vector<LabeledInstance>{inst({0.0}, 0), inst({1.0}, 1)});
  const std::vector<double> probe{0.6};
  EXPECT_EQ(locate_cell(probe, learner.bounds(), learner.lattice().shape()).indices[0], 2u);
  learner.learn_one(inst({2.0}, 1));
  EXPECT_DOUBLE_EQ(learner.bounds().high()[0], 2.0);
  EXPECT_EQ(locate_cell(probe, learner.bounds(), learner.lattice().shape()).indices[0], 1u);
  // The new point itself was written under the widened bounds.
  EXPECT_EQ(learner.lattice().state(3), 1);
}

TEST(ScaLearner, RetrainWindowForgetsEarlierKnowledge) {
  ScaLearner learner(grid(2, 5));
  learner.prepare(std::vector<LabeledInstance>{inst({0.1, 0.1}, 0), inst({0.9, 0.9}, 0)});
  learner.retrain_window(std::vector<LabeledInstance>{inst({0.5, 0.5}, 1)});
  for (Label s : learner.lattice().states()) EXPECT_EQ(s, 1);
  EXPECT_DOUBLE_EQ(learner.bounds().low()[0], 0.5);
}

TEST(KnowledgeTransfer, CopiesStatesAndBounds) {
  const auto stream = generate_stream(DriftScenario::standard(ConceptFamily::Line, 1, 9));
  ScaLearner source(grid(2, 10));
  ScaLearner target(grid(2, 10));
  source.prepare(std::span(stream).first(100));
  target.prepare(std::span(stream).subspan(500, 25));
  knowledge_transfer(source, target);
  EXPECT_TRUE(std::equal(source.lattice().states().begin(), source.lattice().states().end(),
                         target.lattice().states().begin()));
  EXPECT_EQ(source.bounds(), target.bounds());

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.2, 1.2);
  for (int i = 0; i < 1000; ++i) {
    const std::vector<double> x{u(rng), u(rng)};
    ASSERT_EQ(source.predict(x), target.predict(x));
  }

  ScaLearner other(grid(2, 5));
  other.prepare(std::span(stream).first(10));
  EXPECT_THROW(knowledge_transfer(source, other), Error);
}

TEST(KnowledgeTransfer, UniformSourceGivesUniformTarget) {
  ScaLearner source(grid(2, 4));
  ScaLearner target(grid(2, 4));
  source.prepare(std::vector<LabeledInstance>{inst({0.3, 0.3}, 1)});
  target.prepare(std::vector<LabeledInstance>{inst({0.3, 0.3}, 0)});
  target.clone_knowledge_from(source);
  for (Label s : target.lattice().states()) EXPECT_EQ(s, 1);
}
