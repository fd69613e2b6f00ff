#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rsgrove/manifest.hpp"

namespace rsgrove {

/// ceil(size / B); 0 for an empty partition. Throws UsageError for B <= 0.
std::uint64_t block_count(std::uint64_t size, double block_size);

struct QualityReport {
  double q1_total_volume = 0.0;
  double q2_total_overlap = 0.0;
  double q3_total_margin = 0.0;
  double q4_block_utilization = 0.0;
  double q5_size_stddev = 0.0;
  std::size_t partition_count = 0;
  std::uint64_t total_blocks = 0;
  std::size_t dropped_empty = 0;
};

/// Block-weighted quality of realized partitions. Partitions without records
/// are dropped first. Q2 sums b_i * b_j * volume(overlap) over unordered pairs
/// plus b_i (b_i - 1) / 2 * volume for each partition's own blocks. Q5 is the
/// population standard deviation of the sizes. Throws DataError when nothing
/// is left.
QualityReport quality_report(std::span<const PartitionStats> stats, double block_size);

/// Divides each value by the largest value in its group (0 stays 0).
std::vector<double> normalize_to_max(std::span<const double> values);

std::string report_json(const QualityReport& report);
std::string report_table(const QualityReport& report);
std::string report_csv_header();
std::string report_csv_row(const QualityReport& report);

}  // namespace rsgrove
