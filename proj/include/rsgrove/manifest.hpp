#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rsgrove/geometry.hpp"
#include "rsgrove/scheme.hpp"

namespace rsgrove {

/// What one partition holds after assignment.
struct PartitionStats {
  std::size_t id = 0;
  Envelope mbb;                   // empty when nothing was assigned
  std::uint64_t size = 0;         // bytes, every stored copy counted
  std::uint64_t record_count = 0;
  Envelope cell;                  // aux cell in disjoint mode, else empty

  friend bool operator==(const PartitionStats&, const PartitionStats&) = default;
};

/// The `_master` file of an assigned directory: a header line with
/// key=value metadata followed by one CSV row per partition.
struct Manifest {
  std::size_t dim = 0;
  AssignMode mode = AssignMode::overlap;
  double block_size = 0.0;
  std::string partitioner;
  std::string schema;      // Schema::to_string()
  char delimiter = ',';
  std::vector<PartitionStats> partitions;

  bool replicated() const { return mode == AssignMode::disjoint; }

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

inline constexpr const char* kManifestName = "_master";

std::string partition_file_name(std::size_t id);

std::string manifest_to_text(const Manifest& manifest);
Manifest manifest_from_text(const std::string& text);
void write_manifest(const Manifest& manifest, const std::string& path);
Manifest read_manifest(const std::string& path);

}  // namespace rsgrove
