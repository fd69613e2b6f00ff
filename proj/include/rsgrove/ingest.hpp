#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rsgrove/geometry.hpp"

namespace rsgrove {

/// Where the coordinates live in a delimited text line.
///
/// A point schema reads d columns; an envelope schema reads 2d columns laid
/// out as lo_0..lo_{d-1}, hi_0..hi_{d-1}. With no explicit columns the
/// leading fields are used.
struct Schema {
  enum class Kind { point, envelope };

  Kind kind = Kind::point;
  std::size_t dim = 2;
  std::vector<std::size_t> columns;
  char delimiter = ',';

  std::size_t field_count() const { return kind == Kind::point ? dim : 2 * dim; }
  std::size_t column(std::size_t i) const {
    return columns.empty() ? i : columns[i];
  }

  /// Round-trips through `parse`, e.g. "point:2:0,1" or "envelope:2:0,1,2,3".
  /// The delimiter is carried separately.
  std::string to_string() const;
  static Schema parse(std::string_view text, char delimiter = ',');
};

struct Record {
  Envelope envelope;
  std::uint64_t payload_size = 0;  // serialized line length incl. newline
  std::string raw;                 // the line itself, without terminator
};

/// Throws DataError on a malformed or non-finite coordinate field.
Record parse_record(std::string_view line, const Schema& schema,
                    bool keep_raw = true);

/// Reads newline-delimited text, plain or gzip-compressed ("-" = stdin).
class LineReader {
 public:
  explicit LineReader(const std::string& path);
  ~LineReader();
  LineReader(const LineReader&) = delete;
  LineReader& operator=(const LineReader&) = delete;

  /// Next line without its terminator; false at end of input.
  bool next(std::string& line);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct ParseStats {
  std::uint64_t lines = 0;
  std::uint64_t malformed = 0;
};

/// Streams every well-formed record of a file to `fn`; malformed lines are
/// counted in the returned stats and skipped.
ParseStats for_each_record(const std::string& path, const Schema& schema,
                           const std::function<void(const Record&)>& fn,
                           bool keep_raw = false);

/// Sample points with per-point weights plus totals over the full input.
struct WeightedSample {
  PointSet points;
  std::vector<double> weights;       // parallel to points
  std::uint64_t total_bytes = 0;     // D, over the full input
  double total_weight = 0.0;         // W = sum of weights
  std::uint64_t record_count = 0;    // records in the full input
  Envelope domain;                   // MBR of all record centers
  bool byte_weighted = false;        // false: every weight is 1

  std::size_t size() const { return points.size(); }
  std::size_t dim() const { return points.dim(); }

  friend bool operator==(const WeightedSample&, const WeightedSample&) = default;
};

/// Single-pass Bernoulli sampler. Each record is kept independently with
/// probability `ratio`; sampled records become their envelope centers.
class Sampler {
 public:
  Sampler(std::size_t dim, double ratio, std::uint64_t seed);

  void add(const Record& record);
  /// Throws DataError if no record was seen or none was sampled.
  WeightedSample finish() &&;

 private:
  double ratio_;
  std::mt19937_64 rng_;
  WeightedSample sample_;
};

WeightedSample draw_sample(std::span<const Record> records, double ratio,
                           std::uint64_t seed);

/// Total record bytes per cell of a uniform grid laid over `domain`.
///
/// A center on an interior cell boundary falls in the higher-index cell; the
/// domain's upper face belongs to the last cell. Centers outside the domain
/// are clamped to the nearest boundary cell and counted.
class GridHistogram {
 public:
  GridHistogram() = default;
  GridHistogram(Envelope domain, std::vector<std::size_t> cells_per_dim);

  const Envelope& domain() const { return domain_; }
  std::span<const std::size_t> cells_per_dim() const { return cells_per_dim_; }
  std::span<const std::uint64_t> cell_bytes() const { return cell_bytes_; }
  std::size_t cell_count() const { return cell_bytes_.size(); }
  std::uint64_t total_bytes() const;
  std::uint64_t clamped() const { return clamped_; }

  std::size_t cell_of(std::span<const double> p, bool* clamped = nullptr) const;
  Point cell_center(std::size_t cell) const;

  void add(std::span<const double> center, std::uint64_t bytes);
  void add(const Record& record);

  /// Used when loading a sidecar.
  void set_cell_bytes(std::vector<std::uint64_t> bytes);

  friend bool operator==(const GridHistogram&, const GridHistogram&) = default;

 private:
  std::size_t axis_index(std::size_t k, double x, bool& clamped) const;

  Envelope domain_;
  std::vector<std::size_t> cells_per_dim_;
  std::vector<std::uint64_t> cell_bytes_;
  std::uint64_t clamped_ = 0;
};

/// Smallest per-dimension cell count c with c^d >= 4 * partitions.
std::vector<std::size_t> default_grid(std::size_t partitions, std::size_t dim);

GridHistogram build_histogram(std::span<const Record> records,
                              const Envelope& domain,
                              std::vector<std::size_t> cells_per_dim);

/// Spreads each cell's bytes evenly over the sample points inside it. Bytes
/// of cells without sample points go to the sample point nearest to the cell
/// center (Euclidean, ties to the lower point index), so W == D.
WeightedSample assign_weights(const WeightedSample& sample,
                              const GridHistogram& hist);

// JSON sidecars.
void save_sample(const WeightedSample& sample, const std::string& path);
WeightedSample load_sample(const std::string& path);
void save_histogram(const GridHistogram& hist, const std::string& path);
GridHistogram load_histogram(const std::string& path);

}  // namespace rsgrove
