#pragma once

#include <cstddef>
#include <deque>
#include <span>

#include "curie/sca.hpp"

namespace curie {

/// Sliding-window k-nearest-neighbors classifier (Euclidean, uniform vote).
class KnnWindow {
 public:
  KnnWindow(std::size_t capacity, std::size_t k, std::size_t class_count);

  /// Majority label among the min(k, size) nearest instances. Equal
  /// distances favor the older instance; equal votes the lower class.
  Label predict(std::span<const double> features) const;

  void learn_one(const LabeledInstance& instance);
  void prepare(std::span<const LabeledInstance> instances);
  void retrain_window(std::span<const LabeledInstance> window);
  void clone_knowledge_from(const KnnWindow& other);

  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t k() const noexcept { return k_; }
  std::size_t class_count() const noexcept { return class_count_; }
  /// Oldest first.
  const std::deque<LabeledInstance>& buffer() const noexcept { return buffer_; }

 private:
  std::size_t capacity_;
  std::size_t k_;
  std::size_t class_count_;
  std::deque<LabeledInstance> buffer_;
};

}  // namespace curie
