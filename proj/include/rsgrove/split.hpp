#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "rsgrove/geometry.hpp"
#include "rsgrove/validity.hpp"

namespace rsgrove {

// Node splitting works on a list of point ids (`order`) into a PointSet. A
// split at k puts order[0..k) in the first group and order[k..n) in the
// second, so k is the size of the first group.

/// Inclusive range of admissible k.
struct SplitWindow {
  std::size_t first = 1;
  std::size_t last = 0;

  bool empty() const { return first > last; }
};

/// k in [ceil(min_side), n - ceil(min_side)], with min_side clamped to >= 1.
SplitWindow split_window(std::size_t n, double min_side);

/// Window for a node of n points honouring a lower group bound and the
/// minimum splitting ratio: min_side = max(lower, rho * n).
SplitWindow ratio_window(std::size_t n, double lower, double rho);

/// Sorts `order` by coordinate `axis`, breaking ties by point id.
void sort_along(const PointSet& points, std::span<std::uint32_t> order, std::size_t axis);

/// The axis whose sorted order has the smallest sum of margin(first group) +
/// margin(second group) over all k in `window`; ties go to the lower axis.
/// nullopt when the window is empty.
std::optional<std::size_t> choose_split_axis(const PointSet& points,
                                             std::span<const std::uint32_t> order,
                                             SplitWindow window);

/// Plain R*-tree split search over `order` (already sorted). Minimises the
/// summed volume of both group MBRs; ties go to the smaller overlap volume,
/// then to the more balanced k, then to the smaller k.
std::optional<std::size_t> choose_split_point(const PointSet& points,
                                              std::span<const std::uint32_t> order,
                                              SplitWindow window);

/// Split search restricted to k where both k and n - k are valid sizes
/// w.r.t. [m, M]. The window is [max(m, rho n), n - max(m, rho n)].
std::optional<std::size_t> choose_valid_split_point(const PointSet& points,
                                                    std::span<const std::uint32_t> order,
                                                    double m, double M, double rho);

/// Weighted variant: the first group's weight W1 (sum of weights of
/// order[0..k)) and W - W1 must both be valid w.r.t. [m, M]. `weights` is
/// indexed by point id. The window is [max(1, rho n), n - max(1, rho n)].
std::optional<std::size_t> choose_weighted_split_point(const PointSet& points,
                                                       std::span<const std::uint32_t> order,
                                                       std::span<const double> weights,
                                                       double m, double M, double rho);

struct WeightCorrection {
  std::vector<double> weights;    // in split order
  std::size_t corrected = 0;      // ranges that received a point
  std::size_t changed_entries = 0;
  /// (k, target) for each moved split position: the first k points now sum
  /// to `target` in exact arithmetic.
  std::vector<std::pair<std::size_t, double>> moved;
};

/// Moves one point position into each empty valid range by adjusting two
/// neighbouring weights by the same amount, leaving every other position and
/// the total unchanged.
///
/// For a range [vs, ve] the first point with position > ve is moved to
/// (vs + ve) / 2 and its successor absorbs the difference. When that point is
/// the last one (its position is the total), its predecessor is moved up into
/// the range instead. Ranges are processed left to right; a range whose only
/// movable neighbour already fills an earlier range stays empty.
WeightCorrection correct_weights(std::span<const double> weights_in_order,
                                 std::span<const PositionRange> empty_ranges);

/// Valid ranges of `total` that contain none of the split positions
/// pos_1 .. pos_{n-1} of `weights_in_order`.
std::vector<PositionRange> empty_valid_ranges(std::span<const double> weights_in_order,
                                              double m, double M);

namespace detail {

/// Prefix/suffix bounding boxes of a sorted order, for scoring splits.
class SplitScan {
 public:
  SplitScan(const PointSet& points, std::span<const std::uint32_t> order);

  std::size_t size() const { return n_; }
  /// Sum of volumes of both groups for split k.
  double cost(std::size_t k) const;
  double overlap(std::size_t k) const;
  double margin_sum(std::size_t k) const;

 private:
  const double* prefix_lo(std::size_t i) const { return pre_lo_.data() + i * d_; }
  const double* prefix_hi(std::size_t i) const { return pre_hi_.data() + i * d_; }
  const double* suffix_lo(std::size_t i) const { return suf_lo_.data() + i * d_; }
  const double* suffix_hi(std::size_t i) const { return suf_hi_.data() + i * d_; }

  std::size_t n_;
  std::size_t d_;
  std::vector<double> pre_lo_, pre_hi_, suf_lo_, suf_hi_;
};

/// Best k in `window` accepted by `admissible`, by the cost/overlap/balance
/// cascade of choose_split_point.
std::optional<std::size_t> best_split(const SplitScan& scan, SplitWindow window,
                                      const std::function<bool(std::size_t)>& admissible);

}  // namespace detail

}  // namespace rsgrove
