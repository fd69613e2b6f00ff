#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rsgrove/ingest.hpp"
#include "rsgrove/manifest.hpp"
#include "rsgrove/scheme.hpp"

namespace rsgrove {

/// Partition whose box grows least in volume when it absorbs e, then least
/// in margin, then the lowest id. Partitions without a box are skipped
/// unless all of them lack one.
std::size_t choose_leaf(const PartitionScheme& scheme, const Envelope& e);

/// Maps records to partitions according to the scheme's mode: curve key of
/// the center for curve schemes, every touched aux cell in disjoint mode, and
/// choose_leaf otherwise.
class Router {
 public:
  explicit Router(const PartitionScheme& scheme);

  /// Ids for e, ascending. Exactly one id unless replicating.
  void route(const Envelope& e, std::vector<std::size_t>& ids) const;

  /// choose_leaf against this router's partitions.
  std::size_t choose_leaf(const Envelope& e) const;

  const PartitionScheme& scheme() const { return *scheme_; }
  const std::vector<Envelope>& cells() const { return cells_; }
  bool replicates() const { return replicate_; }

 private:
  const PartitionScheme* scheme_;
  bool replicate_ = false;
  std::vector<Envelope> cells_;
  std::vector<double> lo_, hi_;  // partition boxes, flattened
  std::vector<bool> has_box_;
};

/// Empty stats for every partition of the scheme, with cells filled in
/// disjoint mode.
std::vector<PartitionStats> empty_stats(const Router& router);

/// Adds a stored copy of `record` to `stats` (clipped to the cell when
/// replicating).
void account(PartitionStats& stats, const Router& router, const Envelope& e,
             std::uint64_t bytes);

struct Assignment {
  std::vector<PartitionStats> stats;
  std::vector<std::vector<std::uint32_t>> members;  // record indices per partition
};

/// In-memory assignment.
Assignment assign_records(std::span<const Record> records, const PartitionScheme& scheme,
                          bool keep_members = true);

struct AssignReport {
  Manifest manifest;
  ParseStats parse;
};

/// Streams `input`, writes every record line to part-<id> files under
/// `out_dir` and the `_master` manifest. Existing partition files there are
/// replaced. On failure the partial output is removed.
AssignReport run_assignment(const std::string& input, const Schema& schema,
                            const PartitionScheme& scheme, const std::string& out_dir,
                            double block_size);

}  // namespace rsgrove
