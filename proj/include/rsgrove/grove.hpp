#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "rsgrove/ingest.hpp"
#include "rsgrove/scheme.hpp"

namespace rsgrove {

/// blackbox: plain R*-style splits, lower bound 0.3 M, no validity check.
/// graybox: splits restricted to valid sizes, record counts.
/// grove:   validity on byte weights with weight correction.
enum class Strategy { blackbox, graybox, grove };

std::string_view to_string(Strategy s);
Strategy strategy_from(std::string_view name);

inline constexpr double kDefaultBlockSize = 128.0 * 1024 * 1024;
inline constexpr double kDefaultAlpha = 0.95;
inline constexpr double kDefaultRho = 0.4;
inline constexpr double kDefaultSampleRatio = 0.01;
inline constexpr double kBlackboxMinFill = 0.3;

struct CapacityConfig {
  double block_size = kDefaultBlockSize;
  double alpha = kDefaultAlpha;
  double rho = kDefaultRho;
  std::size_t desired_partitions = 0;
  double M = 0.0;
  double m = 0.0;
  bool weighted = false;
};

/// Record-count mode (sample not byte weighted):
///   M = ceil(|S| * B / D), m = max(1, floor(alpha * M)).
/// Weighted mode: N = ceil(D / B), M = ceil(W / N), m = alpha * M.
///
/// With `check_validity` the sample total must be a valid size w.r.t.
/// [m, M]; otherwise DataError reports the minimum valid size.
CapacityConfig compute_capacity(const WeightedSample& sample, double block_size,
                                double alpha, double rho = kDefaultRho,
                                bool check_validity = true);

/// Record-count capacity regardless of any byte weights on the sample.
CapacityConfig count_capacity(const WeightedSample& sample, double block_size, double alpha,
                              double rho = kDefaultRho, bool check_validity = true);

/// Capacity with M given directly (fixtures, tests).
CapacityConfig fixed_capacity(double M, double alpha, double rho = kDefaultRho,
                              bool weighted = false);

struct GroveStats {
  std::size_t splits = 0;
  std::size_t max_depth = 0;
  std::size_t depth_bound = 0;     // 0 when rho == 0
  std::size_t relaxed_splits = 0;  // no admissible k inside the rho window
  std::size_t inseparable_splits = 0;
  std::size_t degenerate_splits = 0;
  std::size_t corrections = 0;     // nodes whose weights were corrected
  std::size_t corrected_ranges = 0;
  std::size_t oversized_leaves = 0;
  std::vector<std::pair<double, double>> split_totals;  // (first, second)
  std::vector<std::uint32_t> point_partition;           // by sample index
  std::vector<double> weights;                          // after corrections
};

/// Top-down split of the sample into partitions. Weighted samples are split
/// on their weights, others on point counts. The resulting scheme carries the
/// aux tree of all cuts in recursion order and one partition per leaf.
PartitionScheme grove_partition(const WeightedSample& sample, const CapacityConfig& cfg,
                                Strategy strategy = Strategy::grove,
                                GroveStats* stats = nullptr);

}  // namespace rsgrove
