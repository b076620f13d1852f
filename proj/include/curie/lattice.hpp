#pragma once

// Dense d-dimensional cell grid: mixed-radix addressing, neighborhood
// stencils, arithmetic binning of feature vectors, and the majority-vote
// local rule used to grow class regions out of seeded cells.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace curie {

using Label = std::uint16_t;

/// State of a cell that has not received a class yet.
inline constexpr Label kUnassigned = std::numeric_limits<Label>::max();

inline constexpr std::size_t kDefaultCellCap = 10'000'000;
inline constexpr double kDefaultMarginFraction = 0.05;

struct CellCoord {
  std::vector<std::size_t> indices;

  bool operator==(const CellCoord&) const = default;
};

/// `dims` axes with `bins_per_dim` bins each. Axis 0 varies fastest in the
/// flat layout.
class GridShape {
 public:
  GridShape(std::size_t dims, std::size_t bins_per_dim,
            std::size_t cell_cap = kDefaultCellCap);

  std::size_t dims() const noexcept { return dims_; }
  std::size_t bins_per_dim() const noexcept { return bins_; }
  std::size_t cell_count() const noexcept { return cells_; }
  std::size_t stride(std::size_t dim) const { return strides_.at(dim); }

  bool contains(const CellCoord& coord) const noexcept;

  bool operator==(const GridShape& other) const noexcept {
    return dims_ == other.dims_ && bins_ == other.bins_;
  }

 private:
  std::size_t dims_;
  std::size_t bins_;
  std::size_t cells_;
  std::vector<std::size_t> strides_;
};

std::size_t flat_index(const CellCoord& coord, const GridShape& shape);
CellCoord unflatten(std::size_t flat, const GridShape& shape);

enum class NeighborhoodKind { VonNeumann, Moore };

struct NeighborhoodSpec {
  NeighborhoodKind kind = NeighborhoodKind::VonNeumann;
  std::size_t radius = 1;

  bool operator==(const NeighborhoodSpec&) const = default;
};

/// Neighbor offsets of a NeighborhoodSpec, precomputed for one grid shape.
/// Offsets leaving the grid are clipped (no wraparound).
class NeighborhoodStencil {
 public:
  NeighborhoodStencil(const NeighborhoodSpec& spec, const GridShape& shape);

  const GridShape& shape() const noexcept { return shape_; }
  const NeighborhoodSpec& spec() const noexcept { return spec_; }

  /// Neighbor count of a cell far from every boundary.
  std::size_t interior_size() const noexcept { return offsets_.size(); }

  /// Calls fn(neighbor_flat_index) for every in-grid neighbor of `flat`.
  template <typename Fn>
  void for_each_neighbor(std::size_t flat, Fn&& fn) const {
    if (!neighbor_start_.empty()) {
      const std::uint32_t* it = neighbor_table_.data() + neighbor_start_[flat];
      const std::uint32_t* end = neighbor_table_.data() + neighbor_start_[flat + 1];
      for (; it != end; ++it) fn(static_cast<std::size_t>(*it));
    } else if (!coord_table_.empty()) {
      visit(flat, coord_table_.data() + flat * shape_.dims(), fn);
    } else {
      std::uint32_t coord[kMaxDims];
      decompose(flat, coord);
      visit(flat, coord, fn);
    }
  }

 private:
  // 2^24 > kDefaultCellCap, so no grid that passes the cap has more dims.
  static constexpr std::size_t kMaxDims = 32;
  // Per-cell coordinate cache is kept only while it stays this small.
  static constexpr std::size_t kCoordTableLimit = std::size_t{1} << 24;
  // Flat neighbor lists (CSR) up to this many entries.
  static constexpr std::size_t kNeighborTableLimit = std::size_t{1} << 24;

  struct Component {
    std::uint32_t dim;
    std::int32_t delta;
  };
  struct Offset {
    std::ptrdiff_t flat_delta;
    std::uint32_t first;
    std::uint32_t last;
  };

  template <typename Coord, typename Fn>
  void visit(std::size_t flat, const Coord* coord, Fn& fn) const {
    const std::int64_t bins = static_cast<std::int64_t>(shape_.bins_per_dim());
    for (const Offset& off : offsets_) {
      bool inside = true;
      for (std::uint32_t c = off.first; c < off.last; ++c) {
        const std::int64_t pos =
            static_cast<std::int64_t>(coord[components_[c].dim]) + components_[c].delta;
        if (pos < 0 || pos >= bins) {
          inside = false;
          break;
        }
      }
      if (inside) {
        fn(static_cast<std::size_t>(static_cast<std::ptrdiff_t>(flat) + off.flat_delta));
      }
    }
  }

  void decompose(std::size_t flat, std::uint32_t* out) const;

  GridShape shape_;
  NeighborhoodSpec spec_;
  std::vector<Offset> offsets_;
  std::vector<Component> components_;
  std::vector<std::uint16_t> coord_table_;
  std::vector<std::uint32_t> neighbor_start_;
  std::vector<std::uint32_t> neighbor_table_;
};

/// All in-grid neighbors of `coord`, ordered by flat index. Never contains
/// `coord` itself.
std::vector<CellCoord> neighbors(const CellCoord& coord, const NeighborhoodSpec& spec,
                                 const GridShape& shape);

/// Most frequent label; ties go to the lowest class index. Empty input has
/// no majority.
std::optional<Label> majority_state(std::span<const Label> labels, std::size_t class_count);

/// Running per-dimension limits of the observed feature values.
class FeatureBounds {
 public:
  struct Range {
    double lo;
    double width;
  };

  explicit FeatureBounds(std::size_t dims, double margin_fraction = kDefaultMarginFraction);
  static FeatureBounds from_limits(std::vector<double> low, std::vector<double> high,
                                   double margin_fraction = kDefaultMarginFraction);

  std::size_t dims() const noexcept { return low_.size(); }
  bool initialized() const noexcept { return initialized_; }
  double margin_fraction() const noexcept { return margin_; }
  std::span<const double> low() const noexcept { return low_; }
  std::span<const double> high() const noexcept { return high_; }

  /// Widens the limits to include `features`. Rejects non-finite values
  /// without modifying the bounds.
  void update(std::span<const double> features);

  /// Margin-widened binning range of one dimension. A degenerate dimension
  /// (low == high) gets a range of width 1 centered on its value.
  Range effective_range(std::size_t dim) const;

  bool operator==(const FeatureBounds&) const = default;

 private:
  std::vector<double> low_;
  std::vector<double> high_;
  double margin_;
  bool initialized_ = false;
};

CellCoord locate_cell(std::span<const double> features, const FeatureBounds& bounds,
                      const GridShape& shape);

/// locate_cell composed with flat_index, without materializing the coordinate.
std::size_t locate_flat(std::span<const double> features, const FeatureBounds& bounds,
                        const GridShape& shape);

/// Returns a copy of `bounds` widened by `features`.
FeatureBounds update_bounds(FeatureBounds bounds, std::span<const double> features);

/// Class states of every cell plus the hit lists collected while seeding.
class CellLattice {
 public:
  CellLattice(GridShape shape, std::size_t class_count);

  const GridShape& shape() const noexcept { return shape_; }
  std::size_t class_count() const noexcept { return class_count_; }
  std::size_t cell_count() const noexcept { return states_.size(); }

  Label state(std::size_t flat) const { return states_.at(flat); }
  void set_state(std::size_t flat, Label label);
  std::span<const Label> states() const noexcept { return states_; }
  std::size_t unassigned_count() const noexcept;

  /// Replaces every state (and drops pending hits) with `other`'s states.
  void copy_states_from(const CellLattice& other);

  /// Back to an all-Unassigned lattice with no hits.
  void clear();

  void add_hit(std::size_t flat, Label label);
  std::vector<Label> hits(std::size_t flat) const;
  std::size_t pending_hits() const noexcept { return hits_.size(); }

  /// Cells with hits take the majority of their hits; other cells keep
  /// their state. All hits are consumed.
  void resolve_hits();

  /// Synchronous fill-only generations: each Unassigned cell adopts the
  /// majority of the neighbor states assigned before the generation began.
  /// Assigned cells never change. Returns the number of generations run.
  std::size_t fill_generations(const NeighborhoodStencil& stencil, std::size_t max_generations);

 private:
  // Scratch buffers for fill_generations; never copied between lattices.
  struct Workspace {
    Workspace() = default;
    Workspace(const Workspace&) {}
    Workspace& operator=(const Workspace&) { return *this; }
    Workspace(Workspace&&) noexcept = default;
    Workspace& operator=(Workspace&&) noexcept = default;

    std::vector<std::uint32_t> votes;
    std::vector<std::uint8_t> reach;
    std::vector<std::size_t> frontier;
    std::vector<std::size_t> next;
    std::vector<Label> next_states;
  };

  GridShape shape_;
  std::size_t class_count_;
  std::vector<Label> states_;
  std::vector<std::pair<std::size_t, Label>> hits_;
  Workspace work_;
};

}  // namespace curie
