#include "curie/eval.hpp"

#include <algorithm>
#include <charconv>
#include <ostream>
#include <string>

#include "curie/error.hpp"

namespace curie {

double PrequentialTracker::update(bool correct, Timestamp t) {
  if (t < t_ref_) {
    raise(ErrorKind::Ordering, "update at t=" + std::to_string(t) + " precedes t_ref=" +
                                   std::to_string(t_ref_));
  }
  if (t != t_ref_ + count_) {
    raise(ErrorKind::Ordering, "expected update at t=" + std::to_string(t_ref_ + count_) +
                                   ", got t=" + std::to_string(t));
  }
  const double x = correct ? 1.0 : 0.0;
  if (t == t_ref_) {
    current_ = x;
  } else {
    current_ += (x - current_) / static_cast<double>(t - t_ref_ + 1);
  }
  ++count_;
  last_t_ = t;
  return current_;
}

void PrequentialTracker::reset_segment(Timestamp new_t_ref) {
  if (last_t_ && new_t_ref <= *last_t_) {
    raise(ErrorKind::Ordering, "segment reset must follow the last update");
  }
  t_ref_ = new_t_ref;
  count_ = 0;
  current_ = 0.0;
}

RunReport run_test_then_train(StreamLearner& learner, std::span<const LabeledInstance> stream,
                              const RunOptions& options) {
  const std::size_t p = options.preparatory;
  if (p < 1) raise(ErrorKind::Config, "at least one preparatory instance is required");
  if (p >= stream.size()) {
    raise(ErrorKind::Config, "preparatory count " + std::to_string(p) +
                                 " leaves no instance to test in a stream of " +
                                 std::to_string(stream.size()));
  }
  std::vector<Timestamp> checkpoints = options.checkpoints;
  std::sort(checkpoints.begin(), checkpoints.end());
  for (Timestamp c : checkpoints) {
    if (c <= p || c > stream.size()) {
      raise(ErrorKind::Config, "checkpoint " + std::to_string(c) + " outside (" +
                                   std::to_string(p) + ", " + std::to_string(stream.size()) +
                                   "]");
    }
  }
  std::vector<Timestamp> resets = options.resets;
  std::sort(resets.begin(), resets.end());
  resets.erase(std::unique(resets.begin(), resets.end()), resets.end());
  for (Timestamp r : resets) {
    if (r <= p || r >= stream.size()) {
      raise(ErrorKind::Config, "reset " + std::to_string(r) + " outside the test phase");
    }
  }

  RunReport report;
  report.learner = learner.name();
  report.preparatory = p;
  learner.prepare(stream.first(p));

  PrequentialTracker tracker(p);
  auto next_reset = resets.begin();
  auto next_checkpoint = checkpoints.begin();
  report.per_step.reserve(stream.size() - p);
  double preacc_sum = 0.0;
  std::size_t correct_total = 0;

  for (Timestamp t = p; t < stream.size(); ++t) {
    while (next_checkpoint != checkpoints.end() && *next_checkpoint == t) {
      report.checkpoints.push_back({t, tracker.current()});
      ++next_checkpoint;
    }
    if (next_reset != resets.end() && *next_reset == t) {
      tracker.reset_segment(t);
      ++next_reset;
    }
    const LabeledInstance& inst = stream[t];
    const Label guess = learner.predict(inst.features);
    const bool correct = guess == inst.label;
    const double value = tracker.update(correct, t);
    learner.learn(inst, t);

    report.per_step.push_back({t, inst.label, guess, correct, value});
    preacc_sum += value;
    correct_total += correct ? 1 : 0;
  }
  while (next_checkpoint != checkpoints.end()) {
    report.checkpoints.push_back({*next_checkpoint, tracker.current()});
    ++next_checkpoint;
  }

  const auto n = static_cast<double>(report.per_step.size());
  report.mean_preacc = preacc_sum / n;
  report.final_accuracy = static_cast<double>(correct_total) / n;
  report.drift_events = learner.drift_events();
  return report;
}

std::vector<double> smooth_preacc(std::span<const StepRecord> steps, std::size_t window) {
  std::vector<double> out;
  out.reserve(steps.size());
  if (window == 0) raise(ErrorKind::Config, "smoothing window must be positive");
  double sum = 0.0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    sum += steps[i].preacc;
    if (i >= window) sum -= steps[i - window].preacc;
    out.push_back(sum / static_cast<double>(std::min(i + 1, window)));
  }
  return out;
}

std::string format_real(double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) raise(ErrorKind::State, "cannot format real value");
  return std::string(buf, ptr);
}

void write_trace_csv(std::ostream& out, const RunReport& report, std::size_t smoothing) {
  std::vector<double> smoothed;
  if (smoothing > 0) smoothed = smooth_preacc(report.per_step, smoothing);
  out << "t,truth,prediction,correct,preACC";
  if (smoothing > 0) out << ",preACC_smoothed";
  out << '\n';
  for (std::size_t i = 0; i < report.per_step.size(); ++i) {
    const StepRecord& s = report.per_step[i];
    out << s.t << ',' << s.truth << ',' << s.prediction << ',' << (s.correct ? 1 : 0) << ','
        << format_real(s.preacc);
    if (smoothing > 0) out << ',' << format_real(smoothed[i]);
    out << '\n';
  }
}

}  // namespace curie
