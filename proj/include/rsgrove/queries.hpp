#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rsgrove/assign.hpp"
#include "rsgrove/ingest.hpp"
#include "rsgrove/manifest.hpp"

namespace rsgrove {

/// Assigned records held in memory, one list per partition.
struct PartitionedData {
  Manifest manifest;
  std::vector<std::vector<Record>> records;
};

/// Reads every part file listed in `dir`/_master.
PartitionedData load_partitions(const std::string& dir);

/// Builds the in-memory form of an assignment.
PartitionedData partitioned_from(std::span<const Record> records, const Assignment& assignment,
                                 const PartitionScheme& scheme, double block_size);

/// True when p lies in the half-open cell [lo, hi).
bool cell_contains(const Envelope& cell, std::span<const double> p);

/// Lower corner of the overlap of two intersecting boxes; the copy stored in
/// the cell holding this point is the one that reports the match.
Point reference_point(const Envelope& a, const Envelope& b);

/// Sum of block counts over partitions whose box meets q.
std::uint64_t range_query_cost(const Manifest& manifest, const Envelope& q);

struct QueryOutcome {
  std::uint64_t blocks = 0;
  std::uint64_t matches = 0;
  double micros = 0.0;
  std::vector<const Record*> hits;  // filled when collecting
};

/// Exact range query answers. Partitions whose box misses q are pruned;
/// without replication a partition inside q is counted wholesale; replicated
/// copies are reported only from the cell holding the reference point.
std::vector<QueryOutcome> run_range_queries(const PartitionedData& data,
                                            std::span<const Envelope> queries,
                                            bool collect = false);

}  // namespace rsgrove
