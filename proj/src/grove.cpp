#include "rsgrove/grove.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>

#include "rsgrove/errors.hpp"
#include "rsgrove/split.hpp"
#include "rsgrove/validity.hpp"

namespace rsgrove {

namespace {

// Byte weights are sums of many doubles; when a total sits exactly on a
// multiple of M the valid positions shrink to single points, so weighted
// checks run against [m, M] widened by a relative kWeightSlack.
constexpr double kWeightSlack = 1e-9;

double slack_lo(double m, bool weighted) { return weighted ? m * (1 - kWeightSlack) : m; }
double slack_hi(double M, bool weighted) { return weighted ? M * (1 + kWeightSlack) : M; }

bool valid_total(double total, double m, double M, bool weighted) {
  return is_valid(total, slack_lo(m, weighted), slack_hi(M, weighted));
}

}  // namespace

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::blackbox: return "blackbox";
    case Strategy::graybox: return "graybox";
    case Strategy::grove: return "grove";
  }
  return "grove";
}

Strategy strategy_from(std::string_view name) {
  if (name == "blackbox") return Strategy::blackbox;
  if (name == "graybox") return Strategy::graybox;
  if (name == "grove") return Strategy::grove;
  throw UsageError("unknown strategy '" + std::string(name) + "' (blackbox|graybox|grove)");
}

namespace {

double floor_snapped(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(r))) return r;
  return std::floor(x);
}

void check_params(double alpha, double rho) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("alpha must be in (0, 1)");
  if (!(rho >= 0.0 && rho <= 0.5)) throw UsageError("rho must be in [0, 0.5]");
}

std::string fmt_num(double x) {
  std::string s = std::to_string(x);
  s.erase(s.find_last_not_of('0') + 1);
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

}  // namespace

CapacityConfig fixed_capacity(double M, double alpha, double rho, bool weighted) {
  check_params(alpha, rho);
  if (!(M >= 1.0)) throw UsageError("capacity must be at least 1");
  CapacityConfig cfg;
  cfg.alpha = alpha;
  cfg.rho = rho;
  cfg.weighted = weighted;
  cfg.M = weighted ? M : std::ceil(M);
  cfg.m = weighted ? alpha * cfg.M : std::max(1.0, floor_snapped(alpha * cfg.M));
  return cfg;
}

namespace {

CapacityConfig capacity_impl(const WeightedSample& sample, double block_size, double alpha,
                             double rho, bool check_validity, bool weighted) {
  check_params(alpha, rho);
  if (!(block_size > 0.0)) throw UsageError("block size must be positive");
  if (sample.total_bytes == 0) throw DataError("input has no bytes");
  if (sample.size() == 0) throw DataError("sample is empty");

  CapacityConfig cfg;
  cfg.block_size = block_size;
  cfg.alpha = alpha;
  cfg.rho = rho;
  cfg.weighted = weighted;
  const auto D = static_cast<long double>(sample.total_bytes);
  cfg.desired_partitions = static_cast<std::size_t>(std::ceil(D / block_size));
  double total = 0.0;
  if (cfg.weighted) {
    total = sample.total_weight;
    cfg.M = std::ceil(total / static_cast<double>(cfg.desired_partitions));
    cfg.m = alpha * cfg.M;
  } else {
    total = static_cast<double>(sample.size());
    cfg.M = static_cast<double>(
        std::ceil(static_cast<long double>(sample.size()) * block_size / D));
    cfg.m = std::max(1.0, floor_snapped(alpha * cfg.M));
  }
  if (cfg.m > cfg.M) throw UsageError("alpha leaves m above M");

  if (check_validity && total > cfg.M && !valid_total(total, cfg.m, cfg.M, weighted)) {
    std::string msg = "sample total " + fmt_num(total) + " is not a valid size for [" +
                      fmt_num(cfg.m) + ", " + fmt_num(cfg.M) + "]";
    if (cfg.m < cfg.M) {
      msg += "; every total >= " + fmt_num(min_valid_size(cfg.m, cfg.M)) +
             " is valid, increase the sampling ratio";
    }
    throw DataError(msg);
  }
  return cfg;
}

}  // namespace

CapacityConfig compute_capacity(const WeightedSample& sample, double block_size,
                                double alpha, double rho, bool check_validity) {
  return capacity_impl(sample, block_size, alpha, rho, check_validity, sample.byte_weighted);
}

CapacityConfig count_capacity(const WeightedSample& sample, double block_size, double alpha,
                              double rho, bool check_validity) {
  return capacity_impl(sample, block_size, alpha, rho, check_validity, false);
}

namespace {

class Builder {
 public:
  Builder(const WeightedSample& sample, const CapacityConfig& cfg, Strategy strategy,
          GroveStats& stats)
      : pts_(sample.points), cfg_(cfg), strategy_(strategy), stats_(stats) {
    use_weights_ = strategy == Strategy::grove && sample.byte_weighted;
    constrained_ = strategy != Strategy::blackbox;
    if (use_weights_) {
      w_ = sample.weights;
    } else {
      w_.assign(sample.size(), 1.0);
    }
    if (strategy == Strategy::blackbox) {
      lower_ = std::max(1.0, kBlackboxMinFill * cfg.M);
    } else {
      lower_ = use_weights_ ? 1.0 : cfg.m;
    }
    order_.resize(sample.size());
    std::iota(order_.begin(), order_.end(), 0U);
    stats_.point_partition.assign(sample.size(), 0);
  }

  PartitionScheme run() {
    const std::size_t n = order_.size();
    double total = 0.0;
    if (use_weights_) {
      for (double x : w_) total += x;
    } else {
      total = static_cast<double>(n);
    }
    if (constrained_ && total > cfg_.M && !valid(total)) {
      throw DataError("sample total " + std::to_string(total) +
                      " cannot be divided into parts within [" + std::to_string(cfg_.m) +
                      ", " + std::to_string(cfg_.M) + "]; increase the sample size");
    }
    if (cfg_.rho > 0.0 && n > 1) {
      stats_.depth_bound = static_cast<std::size_t>(std::ceil(
          std::log(static_cast<double>(n)) / std::log(1.0 / (1.0 - cfg_.rho))));
    }
    scheme_.aux.clear();
    build(0, n, total, 0, 0);
    scheme_.dim = pts_.dim();
    scheme_.capacity = cfg_.M;
    scheme_.min_capacity = strategy_ == Strategy::blackbox ? lower_ : cfg_.m;
    stats_.weights = w_;
    return std::move(scheme_);
  }

 private:
  std::int32_t build(std::size_t begin, std::size_t end, double total, std::size_t depth,
                     std::size_t relaxed_on_path) {
    stats_.max_depth = std::max(stats_.max_depth, depth);
    if (stats_.depth_bound > 0) {
      RSGROVE_ENSURE(depth <= stats_.depth_bound + relaxed_on_path,
                     "recursion exceeded the depth bound");
    }
    const std::size_t n = end - begin;
    if (total <= slack_hi(cfg_.M, use_weights_) || n == 1) {
      return leaf(begin, end, total);
    }

    std::span<std::uint32_t> members(order_.data() + begin, n);
    const SplitWindow main = ratio_window(n, lower_, cfg_.rho);
    SplitWindow full = split_window(n, lower_);
    if (full.empty()) full = split_window(n, 1.0);

    bool degenerate = false;
    const std::size_t axis = pick_axis(members, main.empty() ? full : main, degenerate);
    sort_along(pts_, members, axis);
    const detail::SplitScan scan(pts_, members);
    std::vector<double> pos = positions(members);

    bool relaxed = false;
    std::optional<std::size_t> k = search(scan, members, axis, pos, total, main, full, relaxed);
    if (!k && use_weights_) {
      correct(members, pos, total);
      k = search(scan, members, axis, pos, total, main, full, relaxed);
      RSGROVE_ENSURE(k.has_value(), "no valid split after weight correction");
    }
    RSGROVE_ENSURE(k.has_value(), "node has no valid split");

    const double first = pos[*k];
    const double second = total - first;
    if (constrained_) {
      RSGROVE_ENSURE(valid(first) && valid(second),
                     "split produced an invalid side");
    }
    ++stats_.splits;
    if (relaxed) ++stats_.relaxed_splits;
    if (degenerate) ++stats_.degenerate_splits;
    stats_.split_totals.emplace_back(first, second);

    const double a = pts_.coord(members[*k - 1], axis);
    const double b = pts_.coord(members[*k], axis);
    double coord = a;
    if (a < b) {
      coord = a + (b - a) / 2;
      if (!(coord > a)) coord = b;
    } else {
      ++stats_.inseparable_splits;
    }

    const std::int32_t node = scheme_.aux.add_split(axis, coord);
    const std::size_t path = relaxed_on_path + (relaxed ? 1 : 0);
    const std::int32_t left = build(begin, begin + *k, first, depth + 1, path);
    const std::int32_t right = build(begin + *k, end, second, depth + 1, path);
    scheme_.aux.set_children(node, left, right);
    return node;
  }

  std::int32_t leaf(std::size_t begin, std::size_t end, double total) {
    const std::size_t n = end - begin;
    if (total > slack_hi(cfg_.M, use_weights_)) ++stats_.oversized_leaves;
    if (constrained_ && total <= cfg_.M && n < order_.size()) {
      RSGROVE_ENSURE(total >= slack_lo(cfg_.m, use_weights_),
                     "leaf below the lower capacity");
    }
    PartitionInfo p;
    p.id = scheme_.partitions.size();
    p.mbb = Envelope::empty(pts_.dim());
    for (std::size_t i = begin; i < end; ++i) {
      p.mbb.extend(pts_[order_[i]]);
      stats_.point_partition[order_[i]] = static_cast<std::uint32_t>(p.id);
    }
    p.expected_weight = total;
    p.sample_count = n;
    scheme_.partitions.push_back(std::move(p));
    return scheme_.aux.add_leaf(scheme_.partitions.back().id);
  }

  std::size_t pick_axis(std::span<const std::uint32_t> members, SplitWindow window,
                        bool& degenerate) const {
    const std::size_t axis = choose_split_axis(pts_, members, window).value_or(0);
    if (spread(members, axis) > 0.0) return axis;
    std::size_t best = axis;
    double best_spread = 0.0;
    for (std::size_t k = 0; k < pts_.dim(); ++k) {
      const double s = spread(members, k);
      if (s > best_spread) {
        best = k;
        best_spread = s;
      }
    }
    degenerate = best_spread == 0.0;
    return best;
  }

  double spread(std::span<const std::uint32_t> members, std::size_t axis) const {
    double lo = pts_.coord(members[0], axis);
    double hi = lo;
    for (std::uint32_t id : members) {
      lo = std::min(lo, pts_.coord(id, axis));
      hi = std::max(hi, pts_.coord(id, axis));
    }
    return hi - lo;
  }

  std::vector<double> positions(std::span<const std::uint32_t> members) const {
    std::vector<double> pos(members.size() + 1, 0.0);
    if (!use_weights_) {
      for (std::size_t i = 0; i <= members.size(); ++i) pos[i] = static_cast<double>(i);
      return pos;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < members.size(); ++i) pos[i + 1] = acc += w_[members[i]];
    return pos;
  }

  std::optional<std::size_t> search(const detail::SplitScan& scan,
                                    std::span<const std::uint32_t> members, std::size_t axis,
                                    const std::vector<double>& pos, double total,
                                    SplitWindow main, SplitWindow full, bool& relaxed) const {
    const auto admissible = [&](std::size_t k) {
      return !constrained_ || (valid(pos[k]) && valid(total - pos[k]));
    };
    const auto separable = [&](std::size_t k) {
      return admissible(k) && pts_.coord(members[k - 1], axis) < pts_.coord(members[k], axis);
    };
    const std::function<bool(std::size_t)> tests[] = {separable, admissible};
    for (const SplitWindow window : {main, full}) {
      for (const auto& test : tests) {
        if (auto k = detail::best_split(scan, window, test)) {
          relaxed = window.first != main.first || window.last != main.last;
          return k;
        }
      }
    }
    return std::nullopt;
  }

  bool valid(double x) const { return valid_total(x, cfg_.m, cfg_.M, use_weights_); }

  void correct(std::span<const std::uint32_t> members, std::vector<double>& pos,
               double total) {
    const std::size_t n = members.size();
    std::vector<PositionRange> empty;
    for (const PositionRange& r : enumerate_valid_ranges(total, slack_lo(cfg_.m, use_weights_),
                                                         slack_hi(cfg_.M, use_weights_))) {
      const auto first = pos.begin() + 1;
      const auto last = pos.begin() + static_cast<std::ptrdiff_t>(n);
      // occupied means the search would accept a position here
      const double near = use_weights_ ? total * 1e-6 : 0.0;
      bool occupied = false;
      for (auto it = std::lower_bound(first, last, r.start - near);
           it != last && *it <= r.end + near && !occupied; ++it) {
        occupied = valid(*it) && valid(total - *it);
      }
      if (!occupied) empty.push_back(r);
    }
    std::vector<double> in_order(n);
    for (std::size_t i = 0; i < n; ++i) in_order[i] = w_[members[i]];
    const WeightCorrection fix = correct_weights(in_order, empty);
    for (std::size_t i = 0; i < n; ++i) w_[members[i]] = fix.weights[i];
    pos = positions(members);
    for (const auto& [k, target] : fix.moved) pos[k] = target;
    ++stats_.corrections;
    stats_.corrected_ranges += fix.corrected;
  }

  const PointSet& pts_;
  CapacityConfig cfg_;
  Strategy strategy_;
  GroveStats& stats_;
  bool use_weights_ = false;
  bool constrained_ = true;
  double lower_ = 1.0;
  std::vector<double> w_;
  std::vector<std::uint32_t> order_;
  PartitionScheme scheme_;
};

}  // namespace

PartitionScheme grove_partition(const WeightedSample& sample, const CapacityConfig& cfg,
                                Strategy strategy, GroveStats* stats) {
  if (sample.size() == 0) throw DataError("sample is empty");
  if (!(cfg.M > 0.0) || !(cfg.m > 0.0) || cfg.m > cfg.M) {
    throw UsageError("capacity bounds must satisfy 0 < m <= M");
  }
  const bool use_weights = strategy == Strategy::grove && sample.byte_weighted;
  if (use_weights != cfg.weighted) {
    throw UsageError("capacity mode does not match the sample weighting for strategy " +
                     std::string(to_string(strategy)));
  }
  GroveStats local;
  Builder builder(sample, cfg, strategy, stats ? *stats : local);
  PartitionScheme scheme = builder.run();
  scheme.partitioner = "grove";
  scheme.strategy = std::string(to_string(strategy));
  return scheme;
}

}  // namespace rsgrove
