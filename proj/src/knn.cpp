#include "curie/knn.hpp"

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "curie/error.hpp"

namespace curie {

KnnWindow::KnnWindow(std::size_t capacity, std::size_t k, std::size_t class_count)
    : capacity_(capacity), k_(k), class_count_(class_count) {
  if (capacity == 0) raise(ErrorKind::Config, "knn window capacity must be positive");
  if (k == 0 || k > capacity) raise(ErrorKind::Config, "knn k must lie in [1, capacity]");
  if (class_count < 2) raise(ErrorKind::Config, "at least two classes are required");
}

Label KnnWindow::predict(std::span<const double> features) const {
  if (buffer_.empty()) raise(ErrorKind::State, "knn prediction with an empty window");
  // (squared distance, age rank); lower rank is older.
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(buffer_.size());
  for (std::size_t i = 0; i < buffer_.size(); ++i) {
    const auto& x = buffer_[i].features;
    if (x.size() != features.size()) raise(ErrorKind::Input, "feature length mismatch");
    double d = 0.0;
    for (std::size_t n = 0; n < x.size(); ++n) {
      const double diff = x[n] - features[n];
      d += diff * diff;
    }
    dist.emplace_back(d, i);
  }
  const std::size_t m = std::min(k_, dist.size());
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(m), dist.end());

  std::vector<std::size_t> votes(class_count_, 0);
  for (std::size_t i = 0; i < m; ++i) ++votes[buffer_[dist[i].second].label];
  return static_cast<Label>(std::max_element(votes.begin(), votes.end()) - votes.begin());
}

void KnnWindow::learn_one(const LabeledInstance& instance) {
  if (instance.label >= class_count_) {
    raise(ErrorKind::Input, "label " + std::to_string(instance.label) + " outside the class range");
  }
  if (!buffer_.empty() && buffer_.front().features.size() != instance.features.size()) {
    raise(ErrorKind::Input, "feature length mismatch");
  }
  buffer_.push_back(instance);
  if (buffer_.size() > capacity_) buffer_.pop_front();
}

void KnnWindow::prepare(std::span<const LabeledInstance> instances) {
  buffer_.clear();
  for (const auto& inst : instances) learn_one(inst);
}

void KnnWindow::retrain_window(std::span<const LabeledInstance> window) { prepare(window); }

void KnnWindow::clone_knowledge_from(const KnnWindow& other) {
  if (&other == this) return;
  buffer_ = other.buffer_;
  while (buffer_.size() > capacity_) buffer_.pop_front();
}

}  // namespace curie
