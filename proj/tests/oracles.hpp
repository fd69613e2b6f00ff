#pragma once

// Independent reference implementations used by the unit and acceptance
// suites. They share no code with the library beyond plain data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <vector>

#include "rsgrove/geometry.hpp"
#include "rsgrove/ingest.hpp"
#include "rsgrove/manifest.hpp"
#include "rsgrove/scheme.hpp"

namespace oracle {

// reachable[s]: s is a sum of integer parts each within [m, M].
inline std::vector<bool> compositions(int m, int M, int limit) {
  std::vector<bool> reachable(static_cast<std::size_t>(limit) + 1, false);
  reachable[0] = true;
  for (int s = 1; s <= limit; ++s) {
    for (int part = m; part <= M && part <= s; ++part) {
      if (reachable[static_cast<std::size_t>(s - part)]) {
        reachable[static_cast<std::size_t>(s)] = true;
        break;
      }
    }
  }
  return reachable;
}

inline bool valid_total(int S, int m, int M) {
  return S > 0 && compositions(m, M, S)[static_cast<std::size_t>(S)];
}

// Every way to cut n equal-weight points into a first part of k whose both
// sides are composable.
inline std::set<std::size_t> valid_cuts(int n, int m, int M) {
  const auto ok = compositions(m, M, n);
  std::set<std::size_t> out;
  for (int k = 1; k < n; ++k) {
    if (ok[static_cast<std::size_t>(k)] && ok[static_cast<std::size_t>(n - k)]) {
      out.insert(static_cast<std::size_t>(k));
    }
  }
  return out;
}

inline bool boxes_intersect(const rsgrove::Envelope& a, const rsgrove::Envelope& b) {
  for (std::size_t k = 0; k < a.dim(); ++k) {
    if (a.hi(k) < b.lo(k) || b.hi(k) < a.lo(k)) return false;
  }
  return true;
}

// Indices of the records whose envelope meets q (closed boxes).
inline std::vector<std::size_t> range_scan(const std::vector<rsgrove::Record>& records,
                                           const rsgrove::Envelope& q) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (boxes_intersect(records[i].envelope, q)) out.push_back(i);
  }
  return out;
}

inline std::uint64_t nested_loop_join(const std::vector<rsgrove::Record>& a,
                                      const std::vector<rsgrove::Record>& b) {
  std::uint64_t count = 0;
  for (const auto& x : a) {
    for (const auto& y : b) count += boxes_intersect(x.envelope, y.envelope) ? 1 : 0;
  }
  return count;
}

// Partition whose aux cell holds p, by testing every cell: lo <= x < hi.
inline std::size_t containing_cell(const rsgrove::PartitionScheme& scheme,
                                   std::span<const double> p) {
  const std::vector<rsgrove::Envelope> cells = scheme.aux.cells(scheme.dim);
  std::size_t found = std::numeric_limits<std::size_t>::max();
  std::size_t hits = 0;
  for (std::size_t id = 0; id < cells.size(); ++id) {
    const rsgrove::Envelope& c = cells[id];
    bool inside = true;
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (!(c.lo(k) <= p[k] && p[k] < c.hi(k))) inside = false;
    }
    if (inside) {
      found = id;
      ++hits;
    }
  }
  return hits == 1 ? found : std::numeric_limits<std::size_t>::max();
}

struct Quality {
  double q1 = 0, q2 = 0, q3 = 0, q4 = 0, q5 = 0;
  std::size_t partitions = 0;
};

// Straight from the definitions, every box weighted by its block count:
// volume, pairwise overlap plus a self term per multi-block partition,
// margin, utilization and the population deviation of sizes. Empty
// partitions are ignored.
inline Quality quality(const std::vector<rsgrove::PartitionStats>& stats, double B) {
  std::vector<const rsgrove::PartitionStats*> parts;
  for (const auto& s : stats) {
    if (s.record_count > 0) parts.push_back(&s);
  }
  Quality q;
  q.partitions = parts.size();
  if (parts.empty()) return q;
  auto vol = [](const rsgrove::Envelope& e) {
    double v = 1;
    for (std::size_t k = 0; k < e.dim(); ++k) v *= e.hi(k) - e.lo(k);
    return v;
  };
  auto blocks = [B](std::uint64_t size) { return std::ceil(static_cast<double>(size) / B); };
  double bytes = 0, nblocks = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto& e = parts[i]->mbb;
    const double bi = blocks(parts[i]->size);
    q.q1 += bi * vol(e);
    for (std::size_t k = 0; k < e.dim(); ++k) q.q3 += bi * (e.hi(k) - e.lo(k));
    q.q2 += bi * (bi - 1) / 2 * vol(e);
    for (std::size_t j = i + 1; j < parts.size(); ++j) {
      const auto& f = parts[j]->mbb;
      double ov = 1;
      for (std::size_t k = 0; k < e.dim(); ++k) {
        ov *= std::max(0.0, std::min(e.hi(k), f.hi(k)) - std::max(e.lo(k), f.lo(k)));
      }
      q.q2 += bi * blocks(parts[j]->size) * ov;
    }
    bytes += static_cast<double>(parts[i]->size);
    nblocks += bi;
  }
  q.q4 = bytes / (nblocks * B);
  const double mean = bytes / static_cast<double>(parts.size());
  double var = 0;
  for (const auto* p : parts) {
    var += (static_cast<double>(p->size) - mean) * (static_cast<double>(p->size) - mean);
  }
  q.q5 = std::sqrt(var / static_cast<double>(parts.size()));
  return q;
}

}  // namespace oracle
