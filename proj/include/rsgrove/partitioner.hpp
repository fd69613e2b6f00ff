#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rsgrove/grove.hpp"
#include "rsgrove/ingest.hpp"
#include "rsgrove/scheme.hpp"

namespace rsgrove {

struct PartitionerOptions {
  std::string name = "grove";  // grove, str, kdtree, zcurve, hcurve
  Strategy strategy = Strategy::grove;
  double block_size = kDefaultBlockSize;
  double alpha = kDefaultAlpha;
  double rho = kDefaultRho;
  AssignMode mode = AssignMode::overlap;
  std::optional<double> capacity;  // overrides the computed M
};

const std::vector<std::string>& partitioner_names();

/// Runs the named partitioner. Only grove with the grove strategy uses byte
/// weights; everything else works on record counts. Curve partitioners route
/// by key and always use overlap mode.
PartitionScheme make_partition(const WeightedSample& sample, const PartitionerOptions& opts,
                               GroveStats* stats = nullptr);

}  // namespace rsgrove
