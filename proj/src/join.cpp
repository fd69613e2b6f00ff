#include "rsgrove/join.hpp"

#include <algorithm>

#include "rsgrove/errors.hpp"
#include "rsgrove/metrics.hpp"

namespace rsgrove {

JoinPlan plan_join(const Manifest& a, const Manifest& b) {
  if (a.dim != b.dim) throw DataError("join inputs have different dimensions");
  JoinPlan plan;
  for (const PartitionStats& pa : a.partitions) {
    if (pa.record_count == 0 || pa.mbb.is_empty()) continue;
    for (const PartitionStats& pb : b.partitions) {
      if (pb.record_count == 0 || pb.mbb.is_empty()) continue;
      if (!pa.mbb.intersects(pb.mbb)) continue;
      plan.pairs.emplace_back(pa.id, pb.id);
      plan.block_cost += block_count(pa.size, a.block_size) + block_count(pb.size, b.block_size);
    }
  }
  return plan;
}

namespace {

std::vector<const Record*> by_lower_x(const std::vector<Record>& records) {
  std::vector<const Record*> out;
  out.reserve(records.size());
  for (const Record& r : records) out.push_back(&r);
  std::sort(out.begin(), out.end(),
            [](const Record* x, const Record* y) { return x->envelope.lo(0) < y->envelope.lo(0); });
  return out;
}

}  // namespace

std::uint64_t spatial_join(const PartitionedData& a, const PartitionedData& b,
                           const JoinPlan& plan) {
  if (a.manifest.dim != b.manifest.dim) throw DataError("join inputs have different dimensions");
  std::uint64_t count = 0;
  const auto report = [&](const Record& x, const Record& y, const PartitionStats& px,
                          const PartitionStats& py) {
    if (!x.envelope.intersects(y.envelope)) return;
    if (a.manifest.replicated() || b.manifest.replicated()) {
      const Point ref = reference_point(x.envelope, y.envelope);
      if (a.manifest.replicated() && !cell_contains(px.cell, ref)) return;
      if (b.manifest.replicated() && !cell_contains(py.cell, ref)) return;
    }
    ++count;
  };

  for (const auto& [ia, ib] : plan.pairs) {
    const PartitionStats& pa = a.manifest.partitions.at(ia);
    const PartitionStats& pb = b.manifest.partitions.at(ib);
    const auto xs = by_lower_x(a.records.at(ia));
    const auto ys = by_lower_x(b.records.at(ib));
    std::size_t i = 0, j = 0;
    while (i < xs.size() && j < ys.size()) {
      if (xs[i]->envelope.lo(0) <= ys[j]->envelope.lo(0)) {
        const double end = xs[i]->envelope.hi(0);
        for (std::size_t t = j; t < ys.size() && ys[t]->envelope.lo(0) <= end; ++t) {
          report(*xs[i], *ys[t], pa, pb);
        }
        ++i;
      } else {
        const double end = ys[j]->envelope.hi(0);
        for (std::size_t t = i; t < xs.size() && xs[t]->envelope.lo(0) <= end; ++t) {
          report(*xs[t], *ys[j], pa, pb);
        }
        ++j;
      }
    }
  }
  return count;
}

}  // namespace rsgrove
