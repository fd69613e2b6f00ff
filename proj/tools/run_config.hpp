#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "rsgrove/grove.hpp"
#include "rsgrove/ingest.hpp"
#include "rsgrove/partitioner.hpp"
#include "rsgrove/scheme.hpp"

namespace rsgrove::cli {

struct RunConfig {
  double block_size = kDefaultBlockSize;
  double alpha = kDefaultAlpha;
  double rho = kDefaultRho;
  double ratio = kDefaultSampleRatio;
  std::optional<std::uint64_t> seed;
  std::string partitioner = "grove";
  AssignMode mode = AssignMode::overlap;
  Strategy strategy = Strategy::grove;
  std::size_t grid = 0;  // cells per dimension, 0 = derived from the partition count
  std::string schema = "point:2";
  char delimiter = ',';
  std::optional<double> capacity;
  std::size_t threads = 0;  // 0 = hardware concurrency
  std::set<std::string> explicit_keys;  // keys set by a file or a flag

  /// Applies one key=value setting; throws UsageError for unknown keys or
  /// bad values.
  void set(const std::string& key, const std::string& value);

  Schema parsed_schema() const;
  PartitionerOptions partitioner_options() const;
  std::size_t thread_count() const;
};

/// Keys understood by RunConfig::set, in the order `--help` lists them.
const std::vector<std::string>& config_keys();

/// Flat key=value file; blank lines and lines starting with '#' are skipped.
std::map<std::string, std::string> read_config_file(const std::string& path);

/// "134217728", "128MiB", "1.5GB", "64k" and so on. Binary suffixes (KiB,
/// MiB, GiB and the bare K, M, G) use powers of 1024, KB/MB/GB powers of 1000.
double parse_bytes(const std::string& text);

}  // namespace rsgrove::cli
