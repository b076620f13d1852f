#include "curie/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "curie/error.hpp"

namespace curie {

GridShape::GridShape(std::size_t dims, std::size_t bins_per_dim, std::size_t cell_cap)
    : dims_(dims), bins_(bins_per_dim), cells_(1) {
  if (dims == 0) raise(ErrorKind::Config, "grid needs at least one dimension");
  if (bins_per_dim < 2) raise(ErrorKind::Config, "grid needs at least 2 bins per dimension");
  strides_.reserve(dims);
  for (std::size_t n = 0; n < dims; ++n) {
    strides_.push_back(cells_);
    if (cells_ > cell_cap / bins_per_dim) {
      raise(ErrorKind::Config, "grid of " + std::to_string(bins_per_dim) + "^" +
                                   std::to_string(dims) + " cells exceeds the cap of " +
                                   std::to_string(cell_cap) + " cells");
    }
    cells_ *= bins_per_dim;
  }
}

bool GridShape::contains(const CellCoord& coord) const noexcept {
  if (coord.indices.size() != dims_) return false;
  return std::all_of(coord.indices.begin(), coord.indices.end(),
                     [this](std::size_t i) { return i < bins_; });
}

std::size_t flat_index(const CellCoord& coord, const GridShape& shape) {
  if (!shape.contains(coord)) raise(ErrorKind::Coordinate, "cell coordinate outside the grid");
  std::size_t flat = 0;
  for (std::size_t n = 0; n < shape.dims(); ++n) flat += coord.indices[n] * shape.stride(n);
  return flat;
}

CellCoord unflatten(std::size_t flat, const GridShape& shape) {
  if (flat >= shape.cell_count()) raise(ErrorKind::Coordinate, "flat index outside the grid");
  CellCoord coord;
  coord.indices.resize(shape.dims());
  for (std::size_t n = 0; n < shape.dims(); ++n) {
    coord.indices[n] = flat % shape.bins_per_dim();
    flat /= shape.bins_per_dim();
  }
  return coord;
}

namespace {

// Enumerates every non-zero integer offset inside the neighborhood ball.
// Components longer than max_reach cannot land inside the grid and are skipped.
void enumerate_offsets(const NeighborhoodSpec& spec, long max_reach,
                       std::vector<std::int32_t>& current, std::size_t dim, long budget,
                       std::vector<std::vector<std::int32_t>>& out) {
  if (dim == current.size()) {
    if (std::any_of(current.begin(), current.end(), [](std::int32_t v) { return v != 0; })) {
      out.push_back(current);
    }
    return;
  }
  const bool manhattan = spec.kind == NeighborhoodKind::VonNeumann;
  const long reach = std::min(manhattan ? budget : static_cast<long>(spec.radius), max_reach);
  for (long delta = -reach; delta <= reach; ++delta) {
    current[dim] = static_cast<std::int32_t>(delta);
    enumerate_offsets(spec, max_reach, current, dim + 1,
                      manhattan ? budget - std::labs(delta) : budget, out);
  }
  current[dim] = 0;
}

}  // namespace

NeighborhoodStencil::NeighborhoodStencil(const NeighborhoodSpec& spec, const GridShape& shape)
    : shape_(shape), spec_(spec) {
  if (spec.radius == 0) raise(ErrorKind::Config, "neighborhood radius must be positive");
  const std::size_t dims = shape.dims();
  const std::size_t bins = shape.bins_per_dim();
  std::vector<std::vector<std::int32_t>> raw;
  std::vector<std::int32_t> current(dims, 0);
  enumerate_offsets(spec, static_cast<long>(bins - 1), current, 0,
                    static_cast<long>(spec.radius), raw);

  offsets_.reserve(raw.size());
  for (const auto& delta : raw) {
    Offset off{0, static_cast<std::uint32_t>(components_.size()), 0};
    for (std::size_t n = 0; n < dims; ++n) {
      if (delta[n] == 0) continue;
      components_.push_back({static_cast<std::uint32_t>(n), delta[n]});
      off.flat_delta += static_cast<std::ptrdiff_t>(delta[n]) *
                        static_cast<std::ptrdiff_t>(shape.stride(n));
    }
    off.last = static_cast<std::uint32_t>(components_.size());
    offsets_.push_back(off);
  }

  if (bins <= 0xFFFF && shape.cell_count() * dims <= kCoordTableLimit) {
    coord_table_.resize(shape.cell_count() * dims);
    for (std::size_t flat = 0; flat < shape.cell_count(); ++flat) {
      std::size_t rest = flat;
      for (std::size_t n = 0; n < dims; ++n) {
        coord_table_[flat * dims + n] = static_cast<std::uint16_t>(rest % bins);
        rest /= bins;
      }
    }
    if (shape.cell_count() * offsets_.size() <= kNeighborTableLimit) {
      std::vector<std::uint32_t> start;
      std::vector<std::uint32_t> table;
      start.reserve(shape.cell_count() + 1);
      start.push_back(0);
      auto append = [&](std::size_t nb) { table.push_back(static_cast<std::uint32_t>(nb)); };
      for (std::size_t flat = 0; flat < shape.cell_count(); ++flat) {
        visit(flat, coord_table_.data() + flat * dims, append);
        start.push_back(static_cast<std::uint32_t>(table.size()));
      }
      neighbor_start_ = std::move(start);
      neighbor_table_ = std::move(table);
    }
  }
}

void NeighborhoodStencil::decompose(std::size_t flat, std::uint32_t* out) const {
  const std::size_t bins = shape_.bins_per_dim();
  for (std::size_t n = 0; n < shape_.dims(); ++n) {
    out[n] = static_cast<std::uint32_t>(flat % bins);
    flat /= bins;
  }
}

std::vector<CellCoord> neighbors(const CellCoord& coord, const NeighborhoodSpec& spec,
                                 const GridShape& shape) {
  const std::size_t center = flat_index(coord, shape);
  const NeighborhoodStencil stencil(spec, shape);
  std::vector<std::size_t> flats;
  stencil.for_each_neighbor(center, [&](std::size_t nb) { flats.push_back(nb); });
  std::sort(flats.begin(), flats.end());
  std::vector<CellCoord> out;
  out.reserve(flats.size());
  for (std::size_t f : flats) out.push_back(unflatten(f, shape));
  return out;
}

std::optional<Label> majority_state(std::span<const Label> labels, std::size_t class_count) {
  if (labels.empty()) return std::nullopt;
  std::vector<std::size_t> counts(class_count, 0);
  for (Label l : labels) {
    if (l >= class_count) raise(ErrorKind::Input, "label outside the class range");
    ++counts[l];
  }
  const auto best = std::max_element(counts.begin(), counts.end());
  return static_cast<Label>(best - counts.begin());
}

FeatureBounds::FeatureBounds(std::size_t dims, double margin_fraction)
    : low_(dims, 0.0), high_(dims, 0.0), margin_(margin_fraction) {
  if (dims == 0) raise(ErrorKind::Config, "bounds need at least one dimension");
  if (!(margin_fraction >= 0.0) || !std::isfinite(margin_fraction)) {
    raise(ErrorKind::Config, "margin fraction must be a finite value >= 0");
  }
}

FeatureBounds FeatureBounds::from_limits(std::vector<double> low, std::vector<double> high,
                                         double margin_fraction) {
  if (low.size() != high.size()) raise(ErrorKind::Config, "low/high limits differ in length");
  FeatureBounds bounds(low.size(), margin_fraction);
  for (std::size_t n = 0; n < low.size(); ++n) {
    if (!std::isfinite(low[n]) || !std::isfinite(high[n]) || low[n] > high[n]) {
      raise(ErrorKind::Config, "invalid limits for dimension " + std::to_string(n));
    }
  }
  bounds.low_ = std::move(low);
  bounds.high_ = std::move(high);
  bounds.initialized_ = true;
  return bounds;
}

void FeatureBounds::update(std::span<const double> features) {
  if (features.size() != dims()) {
    raise(ErrorKind::Input, "expected " + std::to_string(dims()) + " features, got " +
                                std::to_string(features.size()));
  }
  for (double x : features) {
    if (!std::isfinite(x)) raise(ErrorKind::Input, "non-finite feature value");
  }
  if (!initialized_) {
    std::copy(features.begin(), features.end(), low_.begin());
    std::copy(features.begin(), features.end(), high_.begin());
    initialized_ = true;
    return;
  }
  for (std::size_t n = 0; n < features.size(); ++n) {
    low_[n] = std::min(low_[n], features[n]);
    high_[n] = std::max(high_[n], features[n]);
  }
}

FeatureBounds::Range FeatureBounds::effective_range(std::size_t dim) const {
  if (!initialized_) raise(ErrorKind::State, "bounds have not seen any instance");
  const double lo = low_.at(dim);
  const double hi = high_.at(dim);
  if (hi == lo) return {lo - 0.5, 1.0};
  const double m = margin_ * (hi - lo);
  return {lo - m, (hi - lo) + 2.0 * m};
}

namespace {

std::size_t bin_of(double x, const FeatureBounds::Range& range, std::size_t bins) {
  if (!std::isfinite(x)) raise(ErrorKind::Input, "non-finite feature value");
  const double pos = std::floor((x - range.lo) / range.width * static_cast<double>(bins));
  if (pos <= 0.0) return 0;
  if (pos >= static_cast<double>(bins - 1)) return bins - 1;
  return static_cast<std::size_t>(pos);
}

void check_dims(std::span<const double> features, const GridShape& shape,
                const FeatureBounds& bounds) {
  if (features.size() != shape.dims() || bounds.dims() != shape.dims()) {
    raise(ErrorKind::Input, "expected " + std::to_string(shape.dims()) + " features, got " +
                                std::to_string(features.size()));
  }
}

}  // namespace

CellCoord locate_cell(std::span<const double> features, const FeatureBounds& bounds,
                      const GridShape& shape) {
  check_dims(features, shape, bounds);
  CellCoord coord;
  coord.indices.resize(shape.dims());
  for (std::size_t n = 0; n < shape.dims(); ++n) {
    coord.indices[n] = bin_of(features[n], bounds.effective_range(n), shape.bins_per_dim());
  }
  return coord;
}

std::size_t locate_flat(std::span<const double> features, const FeatureBounds& bounds,
                        const GridShape& shape) {
  check_dims(features, shape, bounds);
  std::size_t flat = 0;
  for (std::size_t n = 0; n < shape.dims(); ++n) {
    flat += bin_of(features[n], bounds.effective_range(n), shape.bins_per_dim()) *
            shape.stride(n);
  }
  return flat;
}

FeatureBounds update_bounds(FeatureBounds bounds, std::span<const double> features) {
  bounds.update(features);
  return bounds;
}

CellLattice::CellLattice(GridShape shape, std::size_t class_count)
    : shape_(std::move(shape)), class_count_(class_count) {
  if (class_count < 2) raise(ErrorKind::Config, "at least two classes are required");
  if (class_count >= kUnassigned) raise(ErrorKind::Config, "too many classes");
  states_.assign(shape_.cell_count(), kUnassigned);
}

void CellLattice::set_state(std::size_t flat, Label label) {
  if (flat >= states_.size()) raise(ErrorKind::Coordinate, "flat index outside the grid");
  if (label >= class_count_) raise(ErrorKind::Input, "label outside the class range");
  states_[flat] = label;
}

std::size_t CellLattice::unassigned_count() const noexcept {
  return static_cast<std::size_t>(std::count(states_.begin(), states_.end(), kUnassigned));
}

void CellLattice::copy_states_from(const CellLattice& other) {
  if (!(other.shape_ == shape_) || other.class_count_ != class_count_) {
    raise(ErrorKind::Config, "lattices differ in shape or class count");
  }
  states_ = other.states_;
  hits_.clear();
}

void CellLattice::clear() {
  std::fill(states_.begin(), states_.end(), kUnassigned);
  hits_.clear();
}

void CellLattice::add_hit(std::size_t flat, Label label) {
  if (flat >= states_.size()) raise(ErrorKind::Coordinate, "flat index outside the grid");
  if (label >= class_count_) raise(ErrorKind::Input, "label outside the class range");
  hits_.emplace_back(flat, label);
}

std::vector<Label> CellLattice::hits(std::size_t flat) const {
  std::vector<Label> out;
  for (const auto& [cell, label] : hits_) {
    if (cell == flat) out.push_back(label);
  }
  return out;
}

void CellLattice::resolve_hits() {
  if (hits_.empty()) return;
  std::stable_sort(hits_.begin(), hits_.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::size_t> counts(class_count_, 0);
  for (std::size_t i = 0; i < hits_.size();) {
    const std::size_t cell = hits_[i].first;
    std::fill(counts.begin(), counts.end(), 0);
    for (; i < hits_.size() && hits_[i].first == cell; ++i) ++counts[hits_[i].second];
    states_[cell] =
        static_cast<Label>(std::max_element(counts.begin(), counts.end()) - counts.begin());
  }
  hits_.clear();
}

std::size_t CellLattice::fill_generations(const NeighborhoodStencil& stencil,
                                          std::size_t max_generations) {
  if (!(stencil.shape() == shape_)) {
    raise(ErrorKind::Config, "neighborhood stencil built for a different grid shape");
  }
  const std::size_t cells = states_.size();
  auto& frontier = work_.frontier;
  auto& next = work_.next;
  frontier.clear();
  for (std::size_t i = 0; i < cells; ++i) {
    if (states_[i] != kUnassigned) frontier.push_back(i);
  }
  std::size_t remaining = cells - frontier.size();
  if (remaining == 0) return 0;
  if (frontier.empty()) raise(ErrorKind::Propagation, "no assigned cell to propagate from");

  // A cell first reached in generation g has all of its assigned neighbors in
  // generation g-1 (graph distances of neighbors differ by at most one), so
  // expanding layer by layer from the previous frontier is the same as a full
  // synchronous sweep over a snapshot. New states are written only after the
  // whole layer has voted.
  // Layers are collected by a scan in flat order so neighbor lists are read
  // front to back; unassigned neighbors vote into a spare slot at index
  // class_count_ to keep the inner loop free of branches.
  auto& votes = work_.votes;
  auto& reach = work_.reach;
  votes.assign(class_count_ + 1, 0);
  reach.assign(cells, 0);
  const Label spare = static_cast<Label>(class_count_);
  std::size_t generation = 0;
  while (remaining > 0) {
    if (generation >= max_generations) {
      raise(ErrorKind::Propagation, std::to_string(remaining) + " cells still empty after " +
                                        std::to_string(max_generations) + " generations");
    }
    ++generation;
    for (std::size_t src : frontier) {
      stencil.for_each_neighbor(src, [&](std::size_t nb) { reach[nb] = 1; });
    }
    next.clear();
    for (std::size_t i = 0; i < cells; ++i) {
      if (reach[i] && states_[i] == kUnassigned) next.push_back(i);
      reach[i] = 0;
    }
    if (next.empty()) {
      raise(ErrorKind::Propagation,
            std::to_string(remaining) + " cells cannot be reached from any assigned cell");
    }
    work_.next_states.clear();
    for (std::size_t cell : next) {
      stencil.for_each_neighbor(cell, [&](std::size_t nb) {
        ++votes[std::min(states_[nb], spare)];
      });
      std::size_t best = 0;
      for (std::size_t c = 1; c < class_count_; ++c) {
        if (votes[c] > votes[best]) best = c;
      }
      std::fill(votes.begin(), votes.end(), 0u);
      work_.next_states.push_back(static_cast<Label>(best));
    }
    for (std::size_t i = 0; i < next.size(); ++i) states_[next[i]] = work_.next_states[i];
    remaining -= next.size();
    std::swap(frontier, next);
  }
  return generation;
}

}  // namespace curie
