#pragma once

// Drift detection and adaptation with a stable/reactive learner pair.
//
// The stable learner accumulates everything it has seen and provides the
// system's predictions; the reactive learner only knows the most recent W
// instances. A circular list of W bits records the steps where the stable
// learner was wrong while the reactive learner was right. Once the share of
// such steps exceeds the threshold, the reactive knowledge replaces the
// stable one.

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "curie/error.hpp"
#include "curie/sca.hpp"

namespace curie {

class DriftMonitor {
 public:
  DriftMonitor(std::size_t window, double threshold);

  /// Shifts in one bit, set iff the stable learner was wrong and the
  /// reactive learner right. Returns whether the share of set bits now
  /// exceeds the threshold; the caller is expected to reset() on a firing.
  bool update(bool stable_correct, bool reactive_correct);
  void reset();

  std::size_t window() const noexcept { return bits_.size(); }
  double threshold() const noexcept { return threshold_; }
  std::size_t count() const noexcept { return count_; }
  double proportion() const noexcept {
    return static_cast<double>(count_) / static_cast<double>(bits_.size());
  }
  /// Oldest bit first.
  std::vector<bool> bits() const;

 private:
  std::vector<std::uint8_t> bits_;
  std::size_t head_ = 0;  // slot of the oldest bit
  std::size_t count_ = 0;
  double threshold_;
};

/// FIFO of the most recent instances, contiguous in arrival order.
class InstanceWindow {
 public:
  explicit InstanceWindow(std::size_t capacity);

  void push(LabeledInstance instance);
  void clear() noexcept { items_.clear(); }

  std::span<const LabeledInstance> view() const noexcept { return items_; }
  std::size_t size() const noexcept { return items_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }

 private:
  std::vector<LabeledInstance> items_;
  std::size_t capacity_;
};

template <typename L>
concept OnlineLearner = std::copy_constructible<L> &&
    requires(L learner, const L& other, std::span<const double> x,
             const LabeledInstance& instance, std::span<const LabeledInstance> batch) {
  { other.predict(x) } -> std::same_as<Label>;
  learner.learn_one(instance);
  learner.retrain_window(batch);
  learner.clone_knowledge_from(other);
  learner.prepare(batch);
};

struct DriftEvent {
  Timestamp t = 0;
  double proportion = 0.0;

  bool operator==(const DriftEvent&) const = default;
};

struct PairedOptions {
  std::size_t window = 50;
  double threshold = 0.05;
  /// Rebuild the reactive learner every this many steps (1 = every step).
  std::size_t rebuild_every = 1;
  /// Rebuild the reactive learner from the window right after a transfer.
  bool reseed_on_drift = false;

  void validate() const;
};

struct StepOutcome {
  Label prediction = 0;
  bool drift_fired = false;
};

template <OnlineLearner L>
class PairedLearner {
 public:
  /// Called right after the reactive knowledge has been copied into the
  /// stable learner, before the reactive learner is touched again.
  using TransferObserver = std::function<void(Timestamp, const L& stable, const L& reactive)>;

  PairedLearner(L stable, L reactive, PairedOptions options)
      : stable_(std::move(stable)),
        reactive_(std::move(reactive)),
        options_((options.validate(), options)),
        monitor_(options_.window, options_.threshold),
        window_(options_.window) {}

  void prepare(std::span<const LabeledInstance> preparatory) {
    stable_.prepare(preparatory);
    reactive_.prepare(preparatory);
    monitor_.reset();
    window_.clear();
    events_.clear();
    steps_ = 0;
    last_t_.reset();
    prepared_ = true;
  }

  Label predict(std::span<const double> features) const {
    if (!prepared_) raise(ErrorKind::State, "paired learner used before preparation");
    return stable_.predict(features);
  }

  StepOutcome step(const LabeledInstance& instance, Timestamp t) {
    if (!prepared_) raise(ErrorKind::State, "paired learner used before preparation");
    if (last_t_ && t <= *last_t_) {
      raise(ErrorKind::Ordering, "timestamps must strictly increase");
    }
    last_t_ = t;

    const Label stable_guess = stable_.predict(instance.features);
    const Label reactive_guess = reactive_.predict(instance.features);
    const bool fired =
        monitor_.update(stable_guess == instance.label, reactive_guess == instance.label);
    window_.push(instance);

    bool rebuilt = false;
    if (fired) {
      events_.push_back({t, monitor_.proportion()});
      stable_.clone_knowledge_from(reactive_);
      if (observer_) observer_(t, stable_, reactive_);
      if (options_.reseed_on_drift) {
        if (window_.size() == 0) raise(ErrorKind::State, "empty window at reseed time");
        reactive_.retrain_window(window_.view());
        rebuilt = true;
      }
      monitor_.reset();
    }

    stable_.learn_one(instance);
    ++steps_;
    if (steps_ % options_.rebuild_every == 0 && !rebuilt) {
      reactive_.retrain_window(window_.view());
    }
    return {stable_guess, fired};
  }

  void set_transfer_observer(TransferObserver observer) { observer_ = std::move(observer); }

  const L& stable() const noexcept { return stable_; }
  const L& reactive() const noexcept { return reactive_; }
  const DriftMonitor& monitor() const noexcept { return monitor_; }
  const InstanceWindow& window() const noexcept { return window_; }
  const PairedOptions& options() const noexcept { return options_; }
  const std::vector<DriftEvent>& drift_events() const noexcept { return events_; }

 private:
  L stable_;
  L reactive_;
  PairedOptions options_;
  DriftMonitor monitor_;
  InstanceWindow window_;
  std::vector<DriftEvent> events_;
  TransferObserver observer_;
  std::size_t steps_ = 0;
  std::optional<Timestamp> last_t_;
  bool prepared_ = false;
};

/// Paired sCAs sharing one configuration.
using CurieLearner = PairedLearner<ScaLearner>;

CurieLearner make_curie(const ScaConfig& config, std::size_t window, double threshold,
                        std::size_t rebuild_every = 1);

/// sCA with adaptation at a drift point known in advance: at `adapt_at` the
/// lattice is wiped and rebuilt from the last `window` instances.
class OracleAdaptiveSca {
 public:
  OracleAdaptiveSca(ScaConfig config, std::optional<Timestamp> adapt_at, std::size_t window);

  void prepare(std::span<const LabeledInstance> preparatory);
  Label predict(std::span<const double> features) const { return learner_.predict(features); }

  /// Learns the instance observed at time t. At t == adapt_at the instance
  /// joins the window and the learner is rebuilt from that window instead.
  void learn(const LabeledInstance& instance, Timestamp t);

  /// predict followed by learn.
  Label step(const LabeledInstance& instance, Timestamp t);

  const ScaLearner& learner() const noexcept { return learner_; }
  std::optional<Timestamp> adapt_at() const noexcept { return adapt_at_; }
  std::size_t reseed_count() const noexcept { return reseeds_; }

 private:
  ScaLearner learner_;
  std::optional<Timestamp> adapt_at_;
  InstanceWindow window_;
  Timestamp stream_start_ = 0;
  std::size_t reseeds_ = 0;
};

}  // namespace curie
