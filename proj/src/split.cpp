#include "rsgrove/split.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include "rsgrove/errors.hpp"

namespace rsgrove {

namespace {

double box_volume(const double* lo, const double* hi, std::size_t d) {
  double v = 1.0;
  for (std::size_t k = 0; k < d; ++k) v *= hi[k] - lo[k];
  return v;
}

double box_margin(const double* lo, const double* hi, std::size_t d) {
  double s = 0.0;
  for (std::size_t k = 0; k < d; ++k) s += hi[k] - lo[k];
  return s;
}

std::size_t ceil_count(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, r)) return static_cast<std::size_t>(r);
  return static_cast<std::size_t>(std::ceil(x));
}

}  // namespace

SplitWindow split_window(std::size_t n, double min_side) {
  const std::size_t side = std::max<std::size_t>(1, ceil_count(std::max(1.0, min_side)));
  if (n < side) return {side, 0};
  return {side, n - side};
}

SplitWindow ratio_window(std::size_t n, double lower, double rho) {
  return split_window(n, std::max(lower, rho * static_cast<double>(n)));
}

void sort_along(const PointSet& points, std::span<std::uint32_t> order, std::size_t axis) {
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    const double ca = points.coord(a, axis);
    const double cb = points.coord(b, axis);
    return ca < cb || (ca == cb && a < b);
  });
}

namespace detail {

SplitScan::SplitScan(const PointSet& points, std::span<const std::uint32_t> order)
    : n_(order.size()), d_(points.dim()) {
  pre_lo_.resize(n_ * d_);
  pre_hi_.resize(n_ * d_);
  suf_lo_.resize(n_ * d_);
  suf_hi_.resize(n_ * d_);
  for (std::size_t i = 0; i < n_; ++i) {
    const auto p = points[order[i]];
    for (std::size_t k = 0; k < d_; ++k) {
      const double lo = i ? std::min(pre_lo_[(i - 1) * d_ + k], p[k]) : p[k];
      const double hi = i ? std::max(pre_hi_[(i - 1) * d_ + k], p[k]) : p[k];
      pre_lo_[i * d_ + k] = lo;
      pre_hi_[i * d_ + k] = hi;
    }
  }
  for (std::size_t i = n_; i-- > 0;) {
    const auto p = points[order[i]];
    for (std::size_t k = 0; k < d_; ++k) {
      const bool last = i + 1 == n_;
      suf_lo_[i * d_ + k] = last ? p[k] : std::min(suf_lo_[(i + 1) * d_ + k], p[k]);
      suf_hi_[i * d_ + k] = last ? p[k] : std::max(suf_hi_[(i + 1) * d_ + k], p[k]);
    }
  }
}

double SplitScan::cost(std::size_t k) const {
  return box_volume(prefix_lo(k - 1), prefix_hi(k - 1), d_) +
         box_volume(suffix_lo(k), suffix_hi(k), d_);
}

double SplitScan::overlap(std::size_t k) const {
  const double* alo = prefix_lo(k - 1);
  const double* ahi = prefix_hi(k - 1);
  const double* blo = suffix_lo(k);
  const double* bhi = suffix_hi(k);
  double v = 1.0;
  for (std::size_t j = 0; j < d_; ++j) {
    const double side = std::min(ahi[j], bhi[j]) - std::max(alo[j], blo[j]);
    if (side <= 0.0) return 0.0;
    v *= side;
  }
  return v;
}

double SplitScan::margin_sum(std::size_t k) const {
  return box_margin(prefix_lo(k - 1), prefix_hi(k - 1), d_) +
         box_margin(suffix_lo(k), suffix_hi(k), d_);
}

std::optional<std::size_t> best_split(const SplitScan& scan, SplitWindow window,
                                      const std::function<bool(std::size_t)>& admissible) {
  const std::size_t n = scan.size();
  if (n < 2) return std::nullopt;
  window.first = std::max<std::size_t>(window.first, 1);
  window.last = std::min(window.last, n - 1);
  if (window.empty()) return std::nullopt;
  std::optional<std::size_t> best;
  std::tuple<double, double, std::size_t, std::size_t> best_key{};
  for (std::size_t k = window.first; k <= window.last; ++k) {
    if (admissible && !admissible(k)) continue;
    const std::size_t balance = 2 * k > n ? 2 * k - n : n - 2 * k;
    // last resort prefers the larger first group, so odd n splits at ceil(n/2)
    const std::tuple<double, double, std::size_t, std::size_t> key{
        scan.cost(k), scan.overlap(k), balance, n - k};
    if (!best || key < best_key) {
      best = k;
      best_key = key;
    }
  }
  return best;
}

}  // namespace detail

std::optional<std::size_t> choose_split_axis(const PointSet& points,
                                             std::span<const std::uint32_t> order,
                                             SplitWindow window) {
  if (window.empty() || window.last >= order.size()) return std::nullopt;
  std::optional<std::size_t> best_axis;
  double best_sum = std::numeric_limits<double>::infinity();
  // Axes on which every point coincides cannot separate anything.
  std::vector<bool> spread(points.dim(), false);
  for (std::size_t axis = 0; axis < points.dim(); ++axis) {
    for (std::uint32_t id : order) {
      if (points.coord(id, axis) != points.coord(order.front(), axis)) {
        spread[axis] = true;
        break;
      }
    }
  }
  const bool any_spread = std::find(spread.begin(), spread.end(), true) != spread.end();
  std::vector<std::uint32_t> sorted(order.begin(), order.end());
  for (std::size_t axis = 0; axis < points.dim(); ++axis) {
    if (any_spread && !spread[axis]) continue;
    sort_along(points, sorted, axis);
    const detail::SplitScan scan(points, sorted);
    double sum = 0.0;
    for (std::size_t k = window.first; k <= window.last; ++k) sum += scan.margin_sum(k);
    if (!best_axis || sum < best_sum) {
      best_axis = axis;
      best_sum = sum;
    }
  }
  return best_axis;
}

std::optional<std::size_t> choose_split_point(const PointSet& points,
                                              std::span<const std::uint32_t> order,
                                              SplitWindow window) {
  const detail::SplitScan scan(points, order);
  return detail::best_split(scan, window, {});
}

std::optional<std::size_t> choose_valid_split_point(const PointSet& points,
                                                    std::span<const std::uint32_t> order,
                                                    double m, double M, double rho) {
  const std::size_t n = order.size();
  const detail::SplitScan scan(points, order);
  return detail::best_split(scan, ratio_window(n, m, rho), [&](std::size_t k) {
    return is_valid(static_cast<double>(k), m, M) &&
           is_valid(static_cast<double>(n - k), m, M);
  });
}

std::optional<std::size_t> choose_weighted_split_point(const PointSet& points,
                                                       std::span<const std::uint32_t> order,
                                                       std::span<const double> weights,
                                                       double m, double M, double rho) {
  const std::size_t n = order.size();
  std::vector<double> position(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) position[i + 1] = position[i] + weights[order[i]];
  const double total = position[n];
  const detail::SplitScan scan(points, order);
  return detail::best_split(scan, ratio_window(n, 1.0, rho), [&](std::size_t k) {
    return is_valid(position[k], m, M) && is_valid(total - position[k], m, M);
  });
}

std::vector<PositionRange> empty_valid_ranges(std::span<const double> weights_in_order,
                                              double m, double M) {
  const std::size_t n = weights_in_order.size();
  std::vector<double> position(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) position[i + 1] = position[i] + weights_in_order[i];
  std::vector<PositionRange> empty;
  for (const PositionRange& r : enumerate_valid_ranges(position[n], m, M)) {
    // Split positions are pos_1 .. pos_{n-1}.
    const auto first = position.begin() + 1;
    const auto last = position.begin() + static_cast<std::ptrdiff_t>(n);
    const auto it = std::lower_bound(first, last, r.start);
    if (it == last || *it > r.end) empty.push_back(r);
  }
  return empty;
}

WeightCorrection correct_weights(std::span<const double> weights_in_order,
                                 std::span<const PositionRange> empty_ranges) {
  WeightCorrection out;
  out.weights.assign(weights_in_order.begin(), weights_in_order.end());
  std::vector<double>& w = out.weights;
  const std::size_t n = w.size();
  std::vector<bool> touched(n, false);
  std::vector<bool> pinned(n, false);  // positions already moved into a range

  // position[i] is the position of point i (0-based), i.e. sum of w[0..i].
  std::vector<double> position(n);
  const auto recompute = [&] {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) position[i] = acc += w[i];
  };
  recompute();

  for (const PositionRange& r : empty_ranges) {
    const double target = r.start + (r.end - r.start) / 2;
    const auto it = std::upper_bound(position.begin(), position.end(), r.end);
    if (it == position.end() || n < 2) continue;
    const auto j = static_cast<std::size_t>(it - position.begin());
    const double before = j ? position[j - 1] : 0.0;
    RSGROVE_ENSURE(before < r.start, "range to correct already holds a point position");

    std::size_t lower = 0;  // the point whose position moves into the range
    if (j + 1 < n && !pinned[j]) {
      const double delta = position[j] - target;
      w[j] -= delta;
      w[j + 1] += delta;
      lower = j;
    } else {
      // Only the final point lies past the range; its position is the total
      // and must stay put, so pull its predecessor up instead. A predecessor
      // that already fills an earlier range is left alone.
      if (j == 0 || pinned[j - 1]) continue;
      const double delta = target - position[j - 1];
      w[j - 1] += delta;
      w[j] -= delta;
      lower = j - 1;
    }
    RSGROVE_ENSURE(w[lower] > 0.0 && w[lower + 1] > 0.0,
                   "weight correction produced a non-positive weight");
    for (std::size_t i : {lower, lower + 1}) {
      if (!touched[i]) {
        touched[i] = true;
        ++out.changed_entries;
      }
    }
    pinned[lower] = true;
    out.moved.emplace_back(lower + 1, target);
    ++out.corrected;
    recompute();
  }
  return out;
}

}  // namespace rsgrove
