#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "curie/lattice.hpp"

namespace curie {

using Timestamp = std::size_t;

struct LabeledInstance {
  std::vector<double> features;
  Label label = 0;

  bool operator==(const LabeledInstance&) const = default;
};

struct ScaConfig {
  std::size_t dims = 2;
  std::size_t bins_per_dim = 10;
  NeighborhoodSpec neighborhood{};
  std::size_t class_count = 2;
  double margin_fraction = kDefaultMarginFraction;
  /// 0 selects dims * (bins_per_dim - 1) + 1, the grid diameter plus one.
  std::size_t max_generations = 0;
  std::size_t cell_cap = kDefaultCellCap;

  std::size_t resolved_max_generations() const noexcept {
    return max_generations != 0 ? max_generations : dims * (bins_per_dim - 1) + 1;
  }
  GridShape shape() const { return GridShape(dims, bins_per_dim, cell_cap); }
  void validate() const;

  bool operator==(const ScaConfig&) const = default;
};

/// Streamified cellular automaton classifier.
///
/// Preparation seeds the lattice with the labels of the preparatory
/// instances, resolves collisions by majority and grows the seeded regions
/// by synchronous generations until no cell is empty. During streaming each
/// instance is predicted from the state of its enclosing cell and then
/// learned by overwriting that one cell with the verified label.
class ScaLearner {
 public:
  explicit ScaLearner(ScaConfig config);

  const ScaConfig& config() const noexcept { return config_; }
  const CellLattice& lattice() const noexcept { return lattice_; }
  const FeatureBounds& bounds() const noexcept { return bounds_; }
  const NeighborhoodStencil& stencil() const noexcept { return *stencil_; }
  bool prepared() const noexcept { return prepared_; }

  /// Generations needed by the most recent prepare().
  std::size_t last_generation_count() const noexcept { return last_generations_; }

  /// Widens the bounds instance by instance and appends each label to the
  /// hit list of the cell enclosing it under the bounds seen so far.
  void seed(std::span<const LabeledInstance> preparatory);
  void resolve_hits();
  std::size_t fill_generations();

  /// Clears all knowledge, then seed -> resolve_hits -> fill_generations ->
  /// resolve_hits. Returns the generation count.
  std::size_t prepare(std::span<const LabeledInstance> preparatory);

  Label predict(std::span<const double> features) const;

  /// Widens the bounds with the instance, then overwrites the state of the
  /// cell enclosing it (under the widened bounds) with its label.
  void learn_one(const LabeledInstance& instance);

  /// Rebuilds from scratch over `window` only.
  void retrain_window(std::span<const LabeledInstance> window) { prepare(window); }

  /// Copies states and bounds of `other` (see knowledge_transfer).
  void clone_knowledge_from(const ScaLearner& other);

 private:
  friend void knowledge_transfer(const ScaLearner& source, ScaLearner& target);

  void check_instance(const LabeledInstance& instance) const;

  ScaConfig config_;
  std::shared_ptr<const NeighborhoodStencil> stencil_;
  CellLattice lattice_;
  FeatureBounds bounds_;
  bool prepared_ = false;
  std::size_t last_generations_ = 0;
};

/// Makes `target` an exact copy of `source`'s cell states and bounds. Both
/// must share grid shape and class count.
void knowledge_transfer(const ScaLearner& source, ScaLearner& target);

}  // namespace curie
