#include "curie/sca.hpp"

#include <string>

#include "curie/error.hpp"

namespace curie {

void ScaConfig::validate() const {
  if (class_count < 2) raise(ErrorKind::Config, "class_count must be at least 2");
  if (class_count >= kUnassigned) raise(ErrorKind::Config, "class_count is too large");
  if (neighborhood.radius == 0) raise(ErrorKind::Config, "neighborhood radius must be positive");
  if (!(margin_fraction >= 0.0)) raise(ErrorKind::Config, "margin_fraction must be >= 0");
  (void)shape();  // dims, bins and cell cap
}

ScaLearner::ScaLearner(ScaConfig config)
    : config_((config.validate(), config)),
      stencil_(std::make_shared<NeighborhoodStencil>(config_.neighborhood, config_.shape())),
      lattice_(config_.shape(), config_.class_count),
      bounds_(config_.dims, config_.margin_fraction) {}

void ScaLearner::check_instance(const LabeledInstance& instance) const {
  if (instance.features.size() != config_.dims) {
    raise(ErrorKind::Input, "expected " + std::to_string(config_.dims) + " features, got " +
                                std::to_string(instance.features.size()));
  }
  if (instance.label >= config_.class_count) {
    raise(ErrorKind::Input, "label " + std::to_string(instance.label) + " outside [0, " +
                                std::to_string(config_.class_count) + ")");
  }
}

void ScaLearner::seed(std::span<const LabeledInstance> preparatory) {
  if (preparatory.empty()) {
    raise(ErrorKind::Config, "at least one preparatory instance required");
  }
  for (const LabeledInstance& inst : preparatory) check_instance(inst);
  const GridShape& shape = lattice_.shape();
  for (const LabeledInstance& inst : preparatory) {
    bounds_.update(inst.features);
    lattice_.add_hit(locate_flat(inst.features, bounds_, shape), inst.label);
  }
}

void ScaLearner::resolve_hits() { lattice_.resolve_hits(); }

std::size_t ScaLearner::fill_generations() {
  return lattice_.fill_generations(*stencil_, config_.resolved_max_generations());
}

std::size_t ScaLearner::prepare(std::span<const LabeledInstance> preparatory) {
  prepared_ = false;
  lattice_.clear();
  bounds_ = FeatureBounds(config_.dims, config_.margin_fraction);
  seed(preparatory);
  resolve_hits();
  last_generations_ = fill_generations();
  resolve_hits();
  prepared_ = true;
  return last_generations_;
}

Label ScaLearner::predict(std::span<const double> features) const {
  if (!prepared_) raise(ErrorKind::State, "predict called on an unprepared learner");
  return lattice_.state(locate_flat(features, bounds_, lattice_.shape()));
}

void ScaLearner::learn_one(const LabeledInstance& instance) {
  if (!prepared_) raise(ErrorKind::State, "learn_one called on an unprepared learner");
  check_instance(instance);
  bounds_.update(instance.features);
  lattice_.set_state(locate_flat(instance.features, bounds_, lattice_.shape()), instance.label);
}

void ScaLearner::clone_knowledge_from(const ScaLearner& other) { knowledge_transfer(other, *this); }

void knowledge_transfer(const ScaLearner& source, ScaLearner& target) {
  if (&source == &target) return;
  if (!(source.lattice_.shape() == target.lattice_.shape()) ||
      source.config_.class_count != target.config_.class_count) {
    raise(ErrorKind::Config, "knowledge transfer between learners of different grid shape");
  }
  target.lattice_.copy_states_from(source.lattice_);
  target.bounds_ = source.bounds_;
  target.prepared_ = source.prepared_;
}

}  // namespace curie
