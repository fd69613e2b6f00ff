#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rsgrove/curves.hpp"
#include "rsgrove/geometry.hpp"

namespace rsgrove {

/// overlap: every record goes to one partition whose box may grow.
/// disjoint: partitions own half-open cells and straddling records are
/// replicated.
enum class AssignMode { overlap, disjoint };

std::string_view to_string(AssignMode mode);
AssignMode assign_mode_from(std::string_view name);

/// Binary tree of axis-aligned cuts. A cut on (axis, coord) sends
/// x[axis] < coord to the left child and x[axis] >= coord to the right, so
/// the leaf cells are half-open and tile all of R^d.
class SplitTrace {
 public:
  struct Node {
    std::uint32_t axis = 0;
    double coord = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::int32_t leaf_id = -1;

    bool is_leaf() const { return leaf_id >= 0; }
    friend bool operator==(const Node&, const Node&) = default;
  };

  /// A single leaf with id 0.
  SplitTrace();

  /// Appends a node and returns its index. Node 0 is the root.
  std::int32_t add_leaf(std::size_t leaf_id);
  std::int32_t add_split(std::size_t axis, double coord);
  void set_children(std::int32_t node, std::int32_t left, std::int32_t right);
  void clear();

  std::span<const Node> nodes() const { return nodes_; }
  std::size_t leaf_count() const;
  std::size_t depth() const;

  /// Leaf id of the cell containing p.
  std::size_t lookup(std::span<const double> p) const;

  /// Leaf ids of every cell the closed box e touches, ascending.
  std::vector<std::size_t> range(const Envelope& e) const;

  /// Cell of each leaf, indexed by leaf id; outer faces are +-inf.
  std::vector<Envelope> cells(std::size_t dim) const;

  /// Throws DataError unless every internal node has two children and the
  /// leaf ids are exactly 0..leaves-1.
  void validate() const;

  friend bool operator==(const SplitTrace&, const SplitTrace&) = default;

 private:
  std::vector<Node> nodes_;
};

/// Routing table for curve partitioners: partition i owns the keys in
/// [starts[i], starts[i+1]).
struct CurveTable {
  CurveKind kind = CurveKind::z;
  unsigned bits = 0;
  Envelope domain;
  std::vector<std::uint64_t> starts;  // starts[0] == 0, ascending

  std::size_t lookup_key(std::uint64_t key) const;
  std::size_t lookup(std::span<const double> p) const;

  friend bool operator==(const CurveTable&, const CurveTable&) = default;
};

struct PartitionInfo {
  std::size_t id = 0;
  Envelope mbb;                 // tight box of the member sample points
  double expected_weight = 0.0;  // sample weight (bytes or count)
  std::size_t sample_count = 0;

  friend bool operator==(const PartitionInfo&, const PartitionInfo&) = default;
};

struct PartitionScheme {
  std::size_t dim = 0;
  AssignMode mode = AssignMode::overlap;
  std::string partitioner;  // grove, str, kdtree, zcurve, hcurve
  std::string strategy;     // grove only: blackbox, graybox, grove
  double capacity = 0.0;        // M
  double min_capacity = 0.0;    // m
  std::vector<PartitionInfo> partitions;
  SplitTrace aux;
  std::optional<CurveTable> curve;

  std::size_t size() const { return partitions.size(); }

  /// Partition routed to by point p (curve table when present, else aux).
  std::size_t lookup_point(std::span<const double> p) const;

  /// Aux cell of every partition. Curve schemes have no cells.
  std::vector<Envelope> cells() const;

  friend bool operator==(const PartitionScheme&, const PartitionScheme&) = default;
};

std::string scheme_to_json(const PartitionScheme& scheme);
PartitionScheme scheme_from_json(std::string_view text);
void save_scheme(const PartitionScheme& scheme, const std::string& path);
PartitionScheme load_scheme(const std::string& path);

}  // namespace rsgrove
