#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "rsgrove/manifest.hpp"
#include "rsgrove/queries.hpp"

namespace rsgrove {

struct JoinPlan {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::uint64_t block_cost = 0;  // sum of b_i + b_j over the pairs
};

/// Every pair of non-empty partitions whose boxes meet. Throws DataError when
/// the dimensions differ.
JoinPlan plan_join(const Manifest& a, const Manifest& b);

/// Number of record pairs with intersecting envelopes, each counted once.
/// Each planned pair is joined by a plane sweep on the first axis.
std::uint64_t spatial_join(const PartitionedData& a, const PartitionedData& b,
                           const JoinPlan& plan);

}  // namespace rsgrove
