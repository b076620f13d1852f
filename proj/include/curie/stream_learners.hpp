#pragma once

// StreamLearner adapters for the concrete learners.

#include <optional>
#include <string>
#include <utility>

#include "curie/drift.hpp"
#include "curie/eval.hpp"
#include "curie/knn.hpp"
#include "curie/sca.hpp"

namespace curie {

/// Plain sCA without any drift handling.
class ScaStream final : public StreamLearner {
 public:
  explicit ScaStream(ScaConfig config) : learner_(std::move(config)) {}

  std::string name() const override { return "sca"; }
  void prepare(std::span<const LabeledInstance> preparatory) override {
    learner_.prepare(preparatory);
  }
  Label predict(std::span<const double> features) override { return learner_.predict(features); }
  void learn(const LabeledInstance& instance, Timestamp) override { learner_.learn_one(instance); }

  const ScaLearner& learner() const noexcept { return learner_; }

 private:
  ScaLearner learner_;
};

/// sCA reseeded from a window at a known detection time.
class OracleAdaptiveStream final : public StreamLearner {
 public:
  OracleAdaptiveStream(ScaConfig config, std::optional<Timestamp> adapt_at, std::size_t window)
      : learner_(std::move(config), adapt_at, window) {}

  std::string name() const override { return "sca-adaptive"; }
  void prepare(std::span<const LabeledInstance> preparatory) override {
    learner_.prepare(preparatory);
  }
  Label predict(std::span<const double> features) override { return learner_.predict(features); }
  void learn(const LabeledInstance& instance, Timestamp t) override {
    learner_.learn(instance, t);
  }
  std::vector<DriftEvent> drift_events() const override {
    if (learner_.reseed_count() == 0 || !learner_.adapt_at()) return {};
    return {DriftEvent{*learner_.adapt_at(), 0.0}};
  }

  const OracleAdaptiveSca& learner() const noexcept { return learner_; }

 private:
  OracleAdaptiveSca learner_;
};

/// Stable/reactive pair driven by the drift monitor.
template <OnlineLearner L>
class PairedStream final : public StreamLearner {
 public:
  PairedStream(std::string name, PairedLearner<L> paired)
      : name_(std::move(name)), paired_(std::move(paired)) {}

  std::string name() const override { return name_; }
  void prepare(std::span<const LabeledInstance> preparatory) override {
    paired_.prepare(preparatory);
  }
  Label predict(std::span<const double> features) override { return paired_.predict(features); }
  void learn(const LabeledInstance& instance, Timestamp t) override { paired_.step(instance, t); }
  std::vector<DriftEvent> drift_events() const override { return paired_.drift_events(); }

  PairedLearner<L>& paired() noexcept { return paired_; }
  const PairedLearner<L>& paired() const noexcept { return paired_; }

 private:
  std::string name_;
  PairedLearner<L> paired_;
};

using CurieStream = PairedStream<ScaLearner>;
using KnnPairedStream = PairedStream<KnnWindow>;

}  // namespace curie
