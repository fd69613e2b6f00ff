#include "rsgrove/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rsgrove/errors.hpp"
#include "rsgrove/split.hpp"

namespace rsgrove {

namespace {

using Ids = std::vector<std::uint32_t>;

std::size_t leaves_for(const WeightedSample& sample, double capacity) {
  if (sample.size() == 0) throw DataError("sample is empty");
  if (!(capacity >= 1.0)) throw UsageError("capacity must be at least 1");
  return static_cast<std::size_t>(std::ceil(static_cast<double>(sample.size()) / capacity));
}

// Cut position between two groups along `axis`: midpoint of the facing
// coordinates, so x < cut stays on the low side.
double cut_between(double low_max, double high_min) {
  if (!(low_max < high_min)) return low_max;
  const double mid = low_max + (high_min - low_max) / 2;
  return mid > low_max ? mid : high_min;
}

class SchemeBuilder {
 public:
  SchemeBuilder(const WeightedSample& sample, std::string name, double capacity)
      : sample_(sample) {
    scheme_.dim = sample.dim();
    scheme_.partitioner = std::move(name);
    scheme_.capacity = capacity;
    scheme_.aux.clear();
  }

  std::int32_t leaf(std::span<const std::uint32_t> ids) {
    PartitionInfo p;
    p.id = scheme_.partitions.size();
    p.mbb = Envelope::empty(sample_.dim());
    for (std::uint32_t i : ids) {
      p.mbb.extend(sample_.points[i]);
      p.expected_weight += sample_.weights[i];
    }
    p.sample_count = ids.size();
    scheme_.partitions.push_back(std::move(p));
    return scheme_.aux.add_leaf(scheme_.partitions.back().id);
  }

  SplitTrace& aux() { return scheme_.aux; }
  PartitionScheme take() { return std::move(scheme_); }

 private:
  const WeightedSample& sample_;
  PartitionScheme scheme_;
};

// Equal-count runs, remainder to the first runs.
std::vector<std::size_t> run_bounds(std::size_t count, std::size_t runs) {
  std::vector<std::size_t> bounds(runs + 1, 0);
  const std::size_t base = count / runs;
  const std::size_t extra = count % runs;
  for (std::size_t r = 0; r < runs; ++r) bounds[r + 1] = bounds[r] + base + (r < extra ? 1 : 0);
  return bounds;
}

class StrBuilder {
 public:
  StrBuilder(const WeightedSample& sample, std::size_t degree, SchemeBuilder& out)
      : sample_(sample), degree_(degree), out_(out) {}

  std::int32_t slice(std::span<std::uint32_t> ids, std::size_t axis) {
    if (axis == sample_.dim()) return out_.leaf(ids);
    sort_along(sample_.points, ids, axis);
    const std::vector<std::size_t> bounds = run_bounds(ids.size(), degree_);
    return tiles(ids, axis, bounds, 0, degree_);
  }

 private:
  // Balanced binary cuts over runs [lo, hi) of one slicing level.
  std::int32_t tiles(std::span<std::uint32_t> ids, std::size_t axis,
                     const std::vector<std::size_t>& bounds, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) {
      return slice(ids.subspan(bounds[lo], bounds[lo + 1] - bounds[lo]), axis + 1);
    }
    const std::size_t mid = lo + (hi - lo) / 2;
    const std::size_t split = bounds[mid];
    const bool has_low = split > bounds[lo];
    const bool has_high = bounds[hi] > split;
    double coord = 0.0;
    if (has_low && has_high) {
      coord = cut_between(sample_.points.coord(ids[split - 1], axis),
                          sample_.points.coord(ids[split], axis));
    } else if (has_high) {
      coord = sample_.points.coord(ids[split], axis);
    } else if (has_low) {
      coord = std::nextafter(sample_.points.coord(ids[split - 1], axis),
                             std::numeric_limits<double>::infinity());
    }
    const std::int32_t node = out_.aux().add_split(axis, coord);
    const std::int32_t left = tiles(ids, axis, bounds, lo, mid);
    const std::int32_t right = tiles(ids, axis, bounds, mid, hi);
    out_.aux().set_children(node, left, right);
    return node;
  }

  const WeightedSample& sample_;
  std::size_t degree_;
  SchemeBuilder& out_;
};

std::int32_t kd_split(const WeightedSample& sample, std::span<std::uint32_t> ids,
                      double capacity, std::size_t depth, SchemeBuilder& out) {
  if (static_cast<double>(ids.size()) <= capacity || ids.size() < 2) return out.leaf(ids);
  const std::size_t axis = depth % sample.dim();
  sort_along(sample.points, ids, axis);
  const std::size_t k = (ids.size() + 1) / 2;
  const double coord = cut_between(sample.points.coord(ids[k - 1], axis),
                                   sample.points.coord(ids[k], axis));
  const std::int32_t node = out.aux().add_split(axis, coord);
  const std::int32_t left = kd_split(sample, ids.first(k), capacity, depth + 1, out);
  const std::int32_t right = kd_split(sample, ids.subspan(k), capacity, depth + 1, out);
  out.aux().set_children(node, left, right);
  return node;
}

}  // namespace

std::size_t str_degree(std::size_t leaves, std::size_t dim) {
  if (dim == 0) throw UsageError("dimension must be positive");
  if (leaves <= 1) return 1;
  std::size_t n = 1;
  for (;;) {
    ++n;
    std::size_t power = 1;
    bool reached = false;
    for (std::size_t k = 0; k < dim; ++k) {
      power *= n;
      if (power >= leaves) {
        reached = true;
        break;
      }
    }
    if (reached) return n;
  }
}

PartitionScheme str_partition(const WeightedSample& sample, double capacity) {
  const std::size_t leaves = leaves_for(sample, capacity);
  const std::size_t degree = str_degree(leaves, sample.dim());
  SchemeBuilder out(sample, "str", capacity);
  Ids ids(sample.size());
  std::iota(ids.begin(), ids.end(), 0U);
  StrBuilder(sample, degree, out).slice(ids, 0);
  return out.take();
}

PartitionScheme kdtree_partition(const WeightedSample& sample, double capacity) {
  leaves_for(sample, capacity);
  SchemeBuilder out(sample, "kdtree", capacity);
  Ids ids(sample.size());
  std::iota(ids.begin(), ids.end(), 0U);
  kd_split(sample, ids, capacity, 0, out);
  return out.take();
}

PartitionScheme curve_partition(const WeightedSample& sample, double capacity, CurveKind kind,
                                unsigned bits) {
  const std::size_t runs = leaves_for(sample, capacity);
  if (bits == 0) bits = default_curve_bits(sample.dim());
  const Envelope domain = sample.domain.dim() == sample.dim() && !sample.domain.is_empty()
                              ? sample.domain
                              : sample.points.bounds();

  std::vector<std::uint64_t> keys(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    keys[i] = curve_encode(kind, sample.points[i], domain, bits);
  }
  Ids ids(sample.size());
  std::iota(ids.begin(), ids.end(), 0U);
  std::sort(ids.begin(), ids.end(), [&](std::uint32_t a, std::uint32_t b) {
    return keys[a] < keys[b] || (keys[a] == keys[b] && a < b);
  });

  SchemeBuilder out(sample, kind == CurveKind::z ? "zcurve" : "hcurve", capacity);
  CurveTable table;
  table.kind = kind;
  table.bits = bits;
  table.domain = domain;
  const std::vector<std::size_t> bounds = run_bounds(ids.size(), runs);
  for (std::size_t r = 0; r < runs; ++r) {
    out.leaf(std::span<const std::uint32_t>(ids).subspan(bounds[r], bounds[r + 1] - bounds[r]));
    table.starts.push_back(r == 0 ? 0 : keys[ids[bounds[r]]]);
  }
  PartitionScheme scheme = out.take();
  scheme.aux = SplitTrace();
  scheme.curve = std::move(table);
  return scheme;
}

}  // namespace rsgrove
