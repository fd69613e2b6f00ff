#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "rsgrove/geometry.hpp"
#include "rsgrove/ingest.hpp"

namespace rsgrove {

enum class Distribution { uniform, diagonal };

struct GeneratorSpec {
  Distribution distribution = Distribution::uniform;
  std::size_t count = 0;
  std::size_t dim = 2;
  std::uint64_t seed = 1;
  double perc = 0.05;  // diagonal: share of points exactly on the line
  double buf = 0.1;    // diagonal: width of the band around the line
  // Padding field with a log-uniform length in [pad_min, pad_max]; none when
  // pad_max == 0.
  std::size_t pad_min = 0;
  std::size_t pad_max = 0;
  // Envelope records with per-axis side in [0, box_size) when > 0.
  double box_size = 0.0;
};

/// Throws UsageError on inconsistent parameters.
void validate(const GeneratorSpec& spec);

/// Schema that reads the generated lines back.
Schema generated_schema(const GeneratorSpec& spec);

/// Emits `count` comma-separated lines: coordinates (or lo.., hi..), then
/// r<index>, then the optional padding.
void generate(const GeneratorSpec& spec, const std::function<void(std::string_view)>& sink);

/// Parsed generated records (raw lines kept).
std::vector<Record> generate_records(const GeneratorSpec& spec);

/// Streams the parsed records without storing them.
void for_each_generated(const GeneratorSpec& spec,
                        const std::function<void(const Record&)>& fn);

std::vector<std::string> gen_uniform(std::size_t n, std::size_t d, std::uint64_t seed);
std::vector<std::string> gen_diagonal(std::size_t n, std::size_t d, double perc, double buf,
                                      std::uint64_t seed);
std::vector<std::string> gen_varsize(std::size_t n, std::size_t d, std::uint64_t seed,
                                     std::size_t min_bytes, std::size_t max_bytes);

/// Hypercube queries with volume area_fraction * volume(domain), placed
/// uniformly so that they stay inside the domain.
std::vector<Envelope> gen_queries(const Envelope& domain, std::size_t count,
                                  double area_fraction, std::uint64_t seed);

}  // namespace rsgrove
