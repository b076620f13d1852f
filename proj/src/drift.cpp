#include "curie/drift.hpp"

#include <algorithm>
#include <cmath>

namespace curie {

DriftMonitor::DriftMonitor(std::size_t window, double threshold)
    : bits_(window, 0), threshold_(threshold) {
  if (window == 0) raise(ErrorKind::Config, "drift window must hold at least one bit");
  if (!(threshold > 0.0 && threshold < 1.0)) {
    raise(ErrorKind::Config, "drift threshold must lie in (0, 1)");
  }
}

bool DriftMonitor::update(bool stable_correct, bool reactive_correct) {
  const std::uint8_t bit = (!stable_correct && reactive_correct) ? 1 : 0;
  count_ -= bits_[head_];
  bits_[head_] = bit;
  count_ += bit;
  head_ = (head_ + 1) % bits_.size();
  return proportion() > threshold_;
}

void DriftMonitor::reset() {
  std::fill(bits_.begin(), bits_.end(), 0);
  count_ = 0;
  head_ = 0;
}

std::vector<bool> DriftMonitor::bits() const {
  std::vector<bool> out;
  out.reserve(bits_.size());
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    out.push_back(bits_[(head_ + i) % bits_.size()] != 0);
  }
  return out;
}

InstanceWindow::InstanceWindow(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) raise(ErrorKind::Config, "window capacity must be positive");
  items_.reserve(capacity);
}

void InstanceWindow::push(LabeledInstance instance) {
  if (items_.size() == capacity_) {
    std::move(items_.begin() + 1, items_.end(), items_.begin());
    items_.back() = std::move(instance);
  } else {
    items_.push_back(std::move(instance));
  }
}

void PairedOptions::validate() const {
  if (window == 0) raise(ErrorKind::Config, "window must be positive");
  if (!(threshold > 0.0 && threshold < 1.0)) raise(ErrorKind::Config, "threshold must lie in (0, 1)");
  if (rebuild_every == 0) raise(ErrorKind::Config, "rebuild_every must be positive");
}

CurieLearner make_curie(const ScaConfig& config, std::size_t window, double threshold,
                        std::size_t rebuild_every) {
  PairedOptions options;
  options.window = window;
  options.threshold = threshold;
  options.rebuild_every = rebuild_every;
  options.reseed_on_drift = true;
  return CurieLearner(ScaLearner(config), ScaLearner(config), options);
}

OracleAdaptiveSca::OracleAdaptiveSca(ScaConfig config, std::optional<Timestamp> adapt_at,
                                     std::size_t window)
    : learner_(std::move(config)), adapt_at_(adapt_at), window_(window) {}

void OracleAdaptiveSca::prepare(std::span<const LabeledInstance> preparatory) {
  learner_.prepare(preparatory);
  window_.clear();
  stream_start_ = preparatory.size();
  reseeds_ = 0;
}

void OracleAdaptiveSca::learn(const LabeledInstance& instance, Timestamp t) {
  if (!learner_.prepared()) raise(ErrorKind::State, "learner used before preparation");
  if (t < stream_start_) {
    raise(ErrorKind::State, "timestamp falls inside the preparatory segment");
  }
  window_.push(instance);
  if (adapt_at_ && t == *adapt_at_) {
    learner_.prepare(window_.view());
    ++reseeds_;
  } else {
    learner_.learn_one(instance);
  }
}

Label OracleAdaptiveSca::step(const LabeledInstance& instance, Timestamp t) {
  const Label prediction = predict(instance.features);
  learn(instance, t);
  return prediction;
}

}  // namespace curie
