#include "rsgrove/queries.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>

#include "rsgrove/errors.hpp"
#include "rsgrove/metrics.hpp"

namespace rsgrove {

PartitionedData load_partitions(const std::string& dir) {
  namespace fs = std::filesystem;
  PartitionedData data;
  data.manifest = read_manifest((fs::path(dir) / kManifestName).string());
  Schema schema;
  try {
    schema = Schema::parse(data.manifest.schema, data.manifest.delimiter);
  } catch (const UsageError& e) {
    throw DataError(std::string("manifest schema: ") + e.what());
  }
  if (schema.dim != data.manifest.dim) throw DataError("manifest schema does not match d");
  data.records.resize(data.manifest.partitions.size());
  for (std::size_t id = 0; id < data.records.size(); ++id) {
    const fs::path path = fs::path(dir) / partition_file_name(id);
    if (!fs::exists(path)) throw DataError("missing partition file '" + path.string() + "'");
    auto& out = data.records[id];
    const ParseStats stats = for_each_record(
        path.string(), schema, [&](const Record& r) { out.push_back(r); }, true);
    if (stats.malformed) throw DataError("malformed records in '" + path.string() + "'");
  }
  return data;
}

PartitionedData partitioned_from(std::span<const Record> records, const Assignment& assignment,
                                 const PartitionScheme& scheme, double block_size) {
  PartitionedData data;
  Manifest& m = data.manifest;
  m.dim = scheme.dim;
  m.mode = scheme.curve ? AssignMode::overlap : scheme.mode;
  m.block_size = block_size;
  m.partitioner = scheme.partitioner;
  m.partitions = assignment.stats;
  data.records.resize(assignment.members.size());
  for (std::size_t id = 0; id < assignment.members.size(); ++id) {
    for (std::uint32_t r : assignment.members[id]) data.records[id].push_back(records[r]);
  }
  return data;
}

bool cell_contains(const Envelope& cell, std::span<const double> p) {
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (!(cell.lo(k) <= p[k] && p[k] < cell.hi(k))) return false;
  }
  return true;
}

Point reference_point(const Envelope& a, const Envelope& b) {
  Point p(a.dim());
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = std::max(a.lo(k), b.lo(k));
  return p;
}

std::uint64_t range_query_cost(const Manifest& manifest, const Envelope& q) {
  std::uint64_t blocks = 0;
  for (const PartitionStats& p : manifest.partitions) {
    if (p.record_count == 0 || p.mbb.is_empty()) continue;
    if (p.mbb.intersects(q)) blocks += block_count(p.size, manifest.block_size);
  }
  return blocks;
}

std::vector<QueryOutcome> run_range_queries(const PartitionedData& data,
                                            std::span<const Envelope> queries, bool collect) {
  using Clock = std::chrono::steady_clock;
  const Manifest& m = data.manifest;
  if (data.records.size() != m.partitions.size()) {
    throw DataError("partition data does not match the manifest");
  }
  std::vector<QueryOutcome> out(queries.size());
  for (std::size_t qi = 0; qi < queries.size(); ++qi) {
    const Envelope& q = queries[qi];
    if (q.dim() != m.dim) throw DataError("query dimension does not match the data");
    QueryOutcome& res = out[qi];
    const auto start = Clock::now();
    for (std::size_t id = 0; id < m.partitions.size(); ++id) {
      const PartitionStats& p = m.partitions[id];
      if (p.record_count == 0 || p.mbb.is_empty() || !p.mbb.intersects(q)) continue;
      res.blocks += block_count(p.size, m.block_size);
      const auto& recs = data.records[id];
      if (!m.replicated() && q.contains(p.mbb)) {
        res.matches += recs.size();
        if (collect) {
          for (const Record& r : recs) res.hits.push_back(&r);
        }
        continue;
      }
      for (const Record& r : recs) {
        if (!r.envelope.intersects(q)) continue;
        if (m.replicated() && !cell_contains(p.cell, reference_point(r.envelope, q))) continue;
        ++res.matches;
        if (collect) res.hits.push_back(&r);
      }
    }
    res.micros = std::chrono::duration<double, std::micro>(Clock::now() - start).count();
  }
  return out;
}

}  // namespace rsgrove
