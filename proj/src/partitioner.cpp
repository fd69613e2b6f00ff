#include "rsgrove/partitioner.hpp"

#include "rsgrove/baselines.hpp"
#include "rsgrove/errors.hpp"

namespace rsgrove {

const std::vector<std::string>& partitioner_names() {
  static const std::vector<std::string> names{"grove", "str", "kdtree", "zcurve", "hcurve"};
  return names;
}

PartitionScheme make_partition(const WeightedSample& sample, const PartitionerOptions& opts,
                               GroveStats* stats) {
  const bool weighted =
      opts.name == "grove" && opts.strategy == Strategy::grove && sample.byte_weighted;
  const bool constrained = opts.name == "grove" && opts.strategy != Strategy::blackbox;
  CapacityConfig cfg;
  if (opts.capacity) {
    cfg = fixed_capacity(*opts.capacity, opts.alpha, opts.rho, weighted);
    cfg.block_size = opts.block_size;
  } else if (weighted) {
    cfg = compute_capacity(sample, opts.block_size, opts.alpha, opts.rho, constrained);
  } else {
    cfg = count_capacity(sample, opts.block_size, opts.alpha, opts.rho, constrained);
  }

  PartitionScheme scheme;
  if (opts.name == "grove") {
    scheme = grove_partition(sample, cfg, opts.strategy, stats);
  } else if (opts.name == "str") {
    scheme = str_partition(sample, cfg.M);
  } else if (opts.name == "kdtree") {
    scheme = kdtree_partition(sample, cfg.M);
  } else if (opts.name == "zcurve") {
    scheme = curve_partition(sample, cfg.M, CurveKind::z);
  } else if (opts.name == "hcurve") {
    scheme = curve_partition(sample, cfg.M, CurveKind::hilbert);
  } else {
    throw UsageError("unknown partitioner '" + opts.name +
                     "' (grove|str|kdtree|zcurve|hcurve)");
  }
  if (scheme.min_capacity == 0.0) scheme.min_capacity = cfg.m;
  scheme.mode = scheme.curve ? AssignMode::overlap : opts.mode;
  return scheme;
}

}  // namespace rsgrove
