#pragma once

#include <cstddef>
#include <cstdint>

#include "rsgrove/curves.hpp"
#include "rsgrove/ingest.hpp"
#include "rsgrove/scheme.hpp"

namespace rsgrove {

/// Smallest n with n^d >= leaves.
std::size_t str_degree(std::size_t leaves, std::size_t dim);

/// Sort-tile-recursive slicing into n^d tiles, n = str_degree(ceil(|S|/M), d).
/// Runs have equal counts with the remainder given to the first runs; tiles
/// can be empty when the sample is small.
PartitionScheme str_partition(const WeightedSample& sample, double capacity);

/// Median splits cycling the axes (axis = depth mod d) until a node holds at
/// most `capacity` points. The first ceil(n/2) points go left.
PartitionScheme kdtree_partition(const WeightedSample& sample, double capacity);

/// Sorts the sample by curve key and cuts it into ceil(|S|/M) runs of
/// near-equal count. Records are routed by key range.
PartitionScheme curve_partition(const WeightedSample& sample, double capacity,
                                CurveKind kind, unsigned bits = 0);

}  // namespace rsgrove
