#include "rsgrove/metrics.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "rsgrove/errors.hpp"
#include "rsgrove/version.hpp"

namespace rsgrove {

std::uint64_t block_count(std::uint64_t size, double block_size) {
  if (!(block_size > 0.0)) throw UsageError("block size must be positive");
  if (size == 0) return 0;
  return static_cast<std::uint64_t>(std::ceil(static_cast<long double>(size) / block_size));
}

QualityReport quality_report(std::span<const PartitionStats> stats, double block_size) {
  std::vector<const PartitionStats*> kept;
  QualityReport r;
  for (const PartitionStats& p : stats) {
    if (p.record_count == 0 || p.size == 0 || p.mbb.is_empty()) {
      ++r.dropped_empty;
    } else {
      kept.push_back(&p);
    }
  }
  if (kept.empty()) throw DataError("no partition holds any record");
  std::stable_sort(kept.begin(), kept.end(),
                   [](const PartitionStats* a, const PartitionStats* b) { return a->id < b->id; });

  std::vector<double> blocks(kept.size());
  std::vector<double> vol(kept.size());
  double total_size = 0.0;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const PartitionStats& p = *kept[i];
    const std::uint64_t b = block_count(p.size, block_size);
    blocks[i] = static_cast<double>(b);
    vol[i] = volume(p.mbb);
    r.total_blocks += b;
    total_size += static_cast<double>(p.size);
    r.q1_total_volume += blocks[i] * vol[i];
    r.q3_total_margin += blocks[i] * margin(p.mbb);
    r.q2_total_overlap += blocks[i] * (blocks[i] - 1) / 2 * vol[i];
  }
  for (std::size_t i = 0; i < kept.size(); ++i) {
    for (std::size_t j = i + 1; j < kept.size(); ++j) {
      if (const auto x = intersection(kept[i]->mbb, kept[j]->mbb)) {
        r.q2_total_overlap += blocks[i] * blocks[j] * volume(*x);
      }
    }
  }
  r.partition_count = kept.size();
  r.q4_block_utilization = total_size / (block_size * static_cast<double>(r.total_blocks));

  const double mean = total_size / static_cast<double>(kept.size());
  double ss = 0.0;
  for (const PartitionStats* p : kept) {
    const double dev = static_cast<double>(p->size) - mean;
    ss += dev * dev;
  }
  r.q5_size_stddev = std::sqrt(ss / static_cast<double>(kept.size()));
  return r;
}

std::vector<double> normalize_to_max(std::span<const double> values) {
  double top = 0.0;
  for (double v : values) top = std::max(top, v);
  std::vector<double> out(values.begin(), values.end());
  if (top > 0.0) {
    for (double& v : out) v /= top;
  }
  return out;
}

std::string report_json(const QualityReport& r) {
  nlohmann::json j;
  j["version"] = kVersionStamp;
  j["kind"] = "quality";
  j["q1_total_volume"] = r.q1_total_volume;
  j["q2_total_overlap"] = r.q2_total_overlap;
  j["q3_total_margin"] = r.q3_total_margin;
  j["q4_block_utilization"] = r.q4_block_utilization;
  j["q5_size_stddev"] = r.q5_size_stddev;
  j["partition_count"] = r.partition_count;
  j["total_blocks"] = r.total_blocks;
  j["dropped_empty"] = r.dropped_empty;
  return j.dump(1) + '\n';
}

std::string report_table(const QualityReport& r) {
  std::string out;
  const auto row = [&](std::string_view name, const std::string& value) {
    fmt::format_to(std::back_inserter(out), "{:<24} {:>20}\n", name, value);
  };
  row("Q1 total volume", fmt::format("{:.6g}", r.q1_total_volume));
  row("Q2 total overlap", fmt::format("{:.6g}", r.q2_total_overlap));
  row("Q3 total margin", fmt::format("{:.6g}", r.q3_total_margin));
  row("Q4 block utilization", fmt::format("{:.4f}", r.q4_block_utilization));
  row("Q5 size stddev", fmt::format("{:.6g}", r.q5_size_stddev));
  row("partitions", std::to_string(r.partition_count));
  row("blocks", std::to_string(r.total_blocks));
  if (r.dropped_empty) row("dropped empty", std::to_string(r.dropped_empty));
  return out;
}

std::string report_csv_header() {
  return "q1_total_volume,q2_total_overlap,q3_total_margin,q4_block_utilization,"
         "q5_size_stddev,partitions,blocks";
}

std::string report_csv_row(const QualityReport& r) {
  return fmt::format("{},{},{},{},{},{},{}", r.q1_total_volume, r.q2_total_overlap,
                     r.q3_total_margin, r.q4_block_utilization, r.q5_size_stddev,
                     r.partition_count, r.total_blocks);
}

}  // namespace rsgrove
