#pragma once

// Prequential (test-then-train) evaluation.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "curie/drift.hpp"
#include "curie/sca.hpp"

namespace curie {

/// Running mean of per-instance correctness since the segment start t_ref.
/// Updates must arrive at consecutive timestamps t_ref, t_ref+1, ...
class PrequentialTracker {
 public:
  explicit PrequentialTracker(Timestamp t_ref = 0) : t_ref_(t_ref) {}

  double update(bool correct, Timestamp t);

  /// Starts a new segment; the next update must be at new_t_ref.
  void reset_segment(Timestamp new_t_ref);

  Timestamp t_ref() const noexcept { return t_ref_; }
  double current() const noexcept { return current_; }
  std::size_t count() const noexcept { return count_; }

 private:
  Timestamp t_ref_;
  double current_ = 0.0;
  std::size_t count_ = 0;
  std::optional<Timestamp> last_t_;
};

/// Runtime-polymorphic learner as seen by the runner.
class StreamLearner {
 public:
  virtual ~StreamLearner() = default;

  virtual std::string name() const = 0;
  virtual void prepare(std::span<const LabeledInstance> preparatory) = 0;
  virtual Label predict(std::span<const double> features) = 0;
  virtual void learn(const LabeledInstance& instance, Timestamp t) = 0;
  virtual std::vector<DriftEvent> drift_events() const { return {}; }
};

struct RunOptions {
  std::size_t preparatory = 1;
  /// Each checkpoint t reports preACC once every instance before t has been
  /// scored; valid range is (preparatory, stream length].
  std::vector<Timestamp> checkpoints;
  /// Timestamps at which the tracker starts a fresh segment.
  std::vector<Timestamp> resets;
};

struct StepRecord {
  Timestamp t = 0;
  Label truth = 0;
  Label prediction = 0;
  bool correct = false;
  double preacc = 0.0;

  bool operator==(const StepRecord&) const = default;
};

struct CheckpointValue {
  Timestamp t = 0;
  double preacc = 0.0;

  bool operator==(const CheckpointValue&) const = default;
};

struct RunReport {
  std::string learner;
  std::size_t preparatory = 0;
  std::vector<StepRecord> per_step;
  std::vector<DriftEvent> drift_events;
  std::vector<CheckpointValue> checkpoints;
  /// Mean of the per-step preACC curve.
  double mean_preacc = 0.0;
  /// Share of correct predictions over the whole test phase.
  double final_accuracy = 0.0;
};

/// Prepares on the first P instances, then for every later instance:
/// predict, score, learn.
RunReport run_test_then_train(StreamLearner& learner, std::span<const LabeledInstance> stream,
                              const RunOptions& options);

/// Trailing moving average of the preACC column over `window` rows (the
/// first rows average what is available).
std::vector<double> smooth_preacc(std::span<const StepRecord> steps, std::size_t window);

/// CSV with header t,truth,prediction,correct,preACC and, when smoothing is
/// positive, preACC_smoothed.
void write_trace_csv(std::ostream& out, const RunReport& report, std::size_t smoothing = 0);

/// Shortest round-trip decimal text of a double.
std::string format_real(double value);

}  // namespace curie
