#include "rsgrove/ingest.hpp"

#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "json_io.hpp"
#include "rsgrove/errors.hpp"
#include "rsgrove/version.hpp"

namespace rsgrove {

using nlohmann::json;

// ---------------------------------------------------------------- schema ---

std::string Schema::to_string() const {
  std::string out = kind == Kind::point ? "point:" : "envelope:";
  out += std::to_string(dim);
  out += ':';
  for (std::size_t i = 0; i < field_count(); ++i) {
    if (i) out += ',';
    out += std::to_string(column(i));
  }
  return out;
}

Schema Schema::parse(std::string_view text, char delimiter) {
  Schema s;
  s.delimiter = delimiter;
  const auto c1 = text.find(':');
  const std::string_view kind = text.substr(0, c1);
  if (kind == "point") {
    s.kind = Kind::point;
  } else if (kind == "envelope") {
    s.kind = Kind::envelope;
  } else {
    throw UsageError("unknown schema kind '" + std::string(kind) + "'");
  }
  if (c1 == std::string_view::npos) return s;

  std::string_view rest = text.substr(c1 + 1);
  const auto c2 = rest.find(':');
  const std::string_view dim_text = rest.substr(0, c2);
  std::size_t dim = 0;
  auto [p, ec] = std::from_chars(dim_text.data(), dim_text.data() + dim_text.size(), dim);
  if (ec != std::errc() || p != dim_text.data() + dim_text.size() || dim == 0) {
    throw UsageError("bad schema dimension '" + std::string(dim_text) + "'");
  }
  s.dim = dim;
  if (c2 == std::string_view::npos) return s;

  rest = rest.substr(c2 + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view tok = rest.substr(0, comma);
    std::size_t col = 0;
    auto [q, ec2] = std::from_chars(tok.data(), tok.data() + tok.size(), col);
    if (ec2 != std::errc() || q != tok.data() + tok.size()) {
      throw UsageError("bad schema column '" + std::string(tok) + "'");
    }
    s.columns.push_back(col);
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  if (s.columns.size() != s.field_count()) {
    throw UsageError("schema lists " + std::to_string(s.columns.size()) +
                     " columns, expected " + std::to_string(s.field_count()));
  }
  return s;
}

// --------------------------------------------------------------- records ---

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

double parse_double(std::string_view field, std::size_t column) {
  field = trim(field);
  double v = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (!field.empty() && *first == '+') ++first;
  auto [p, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || p != last || field.empty()) {
    throw DataError("column " + std::to_string(column) + ": not a number: '" +
                    std::string(field) + "'");
  }
  if (!std::isfinite(v)) {
    throw DataError("column " + std::to_string(column) + ": non-finite value");
  }
  return v;
}

}  // namespace

Record parse_record(std::string_view line, const Schema& schema, bool keep_raw) {
  const std::size_t nfields = schema.field_count();
  std::size_t max_col = 0;
  for (std::size_t i = 0; i < nfields; ++i) max_col = std::max(max_col, schema.column(i));

  std::vector<std::string_view> fields;
  fields.reserve(max_col + 1);
  std::size_t start = 0;
  while (fields.size() <= max_col) {
    const auto pos = line.find(schema.delimiter, start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  if (fields.size() <= max_col) {
    throw DataError("expected at least " + std::to_string(max_col + 1) +
                    " fields, found " + std::to_string(fields.size()));
  }

  std::vector<double> values(nfields);
  for (std::size_t i = 0; i < nfields; ++i) {
    values[i] = parse_double(fields[schema.column(i)], schema.column(i));
  }

  Record r;
  if (schema.kind == Schema::Kind::point) {
    r.envelope = Envelope::of_point(values);
  } else {
    std::vector<double> lo(values.begin(), values.begin() + schema.dim);
    std::vector<double> hi(values.begin() + schema.dim, values.end());
    for (std::size_t k = 0; k < schema.dim; ++k) {
      if (lo[k] > hi[k]) throw DataError("envelope has lo > hi");
    }
    r.envelope = Envelope(std::move(lo), std::move(hi));
  }
  r.payload_size = line.size() + 1;
  if (keep_raw) r.raw.assign(line);
  return r;
}

struct LineReader::Impl {
  gzFile file = nullptr;
  std::vector<char> buf = std::vector<char>(1 << 16);
  std::size_t pos = 0;
  std::size_t len = 0;
  bool eof = false;
};

LineReader::LineReader(const std::string& path) : impl_(std::make_unique<Impl>()) {
  impl_->file = path == "-" ? gzdopen(0, "rb") : gzopen(path.c_str(), "rb");
  if (!impl_->file) throw DataError("cannot open '" + path + "'");
  gzbuffer(impl_->file, 1 << 17);
}

LineReader::~LineReader() {
  if (impl_ && impl_->file) gzclose(impl_->file);
}

bool LineReader::next(std::string& line) {
  line.clear();
  Impl& s = *impl_;
  bool any = false;
  for (;;) {
    if (s.pos == s.len) {
      if (s.eof) return any;
      const int n = gzread(s.file, s.buf.data(), static_cast<unsigned>(s.buf.size()));
      if (n < 0) {
        int err = 0;
        throw DataError(std::string("read error: ") + gzerror(s.file, &err));
      }
      s.pos = 0;
      s.len = static_cast<std::size_t>(n);
      if (n == 0) {
        s.eof = true;
        return any;
      }
    }
    const char* begin = s.buf.data() + s.pos;
    const char* end = s.buf.data() + s.len;
    const char* nl = std::find(begin, end, '\n');
    line.append(begin, nl);
    any = true;
    if (nl != end) {
      s.pos = static_cast<std::size_t>(nl - s.buf.data()) + 1;
      return true;
    }
    s.pos = s.len;
  }
}

ParseStats for_each_record(const std::string& path, const Schema& schema,
                           const std::function<void(const Record&)>& fn,
                           bool keep_raw) {
  ParseStats stats;
  LineReader reader(path);
  std::string line;
  while (reader.next(line)) {
    ++stats.lines;
    Record r;
    try {
      r = parse_record(line, schema, keep_raw);
    } catch (const DataError&) {
      ++stats.malformed;
      continue;
    }
    fn(r);
  }
  return stats;
}

// -------------------------------------------------------------- sampling ---

Sampler::Sampler(std::size_t dim, double ratio, std::uint64_t seed)
    : ratio_(ratio), rng_(seed) {
  if (!(ratio > 0.0 && ratio <= 1.0)) {
    throw UsageError("sampling ratio must be in (0, 1]");
  }
  sample_.points = PointSet(dim);
  sample_.domain = Envelope::empty(dim);
}

void Sampler::add(const Record& record) {
  const Point c = record.envelope.center();
  ++sample_.record_count;
  sample_.total_bytes += record.payload_size;
  sample_.domain.extend(c);
  // 53 random mantissa bits: u is uniform on [0, 1).
  const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  if (u < ratio_) {
    sample_.points.push_back(c);
    sample_.weights.push_back(1.0);
  }
}

WeightedSample Sampler::finish() && {
  if (sample_.record_count == 0) throw DataError("input contains no records");
  if (sample_.points.empty()) {
    throw DataError("sample is empty; increase the sampling ratio");
  }
  sample_.total_weight = static_cast<double>(sample_.points.size());
  return std::move(sample_);
}

WeightedSample draw_sample(std::span<const Record> records, double ratio,
                           std::uint64_t seed) {
  if (records.empty()) throw DataError("input contains no records");
  Sampler sampler(records.front().envelope.dim(), ratio, seed);
  for (const Record& r : records) sampler.add(r);
  return std::move(sampler).finish();
}

// ------------------------------------------------------------- histogram ---

GridHistogram::GridHistogram(Envelope domain, std::vector<std::size_t> cells_per_dim)
    : domain_(std::move(domain)), cells_per_dim_(std::move(cells_per_dim)) {
  if (cells_per_dim_.size() != domain_.dim()) {
    throw UsageError("histogram grid rank does not match the domain");
  }
  if (domain_.is_empty()) throw UsageError("histogram domain is empty");
  std::size_t total = 1;
  for (std::size_t c : cells_per_dim_) {
    if (c == 0) throw UsageError("histogram needs at least one cell per dimension");
    total *= c;
  }
  cell_bytes_.assign(total, 0);
}

std::uint64_t GridHistogram::total_bytes() const {
  return std::accumulate(cell_bytes_.begin(), cell_bytes_.end(), std::uint64_t{0});
}

std::size_t GridHistogram::axis_index(std::size_t k, double x, bool& clamped) const {
  const std::size_t cells = cells_per_dim_[k];
  const double lo = domain_.lo(k);
  const double hi = domain_.hi(k);
  if (x < lo) {
    clamped = true;
    return 0;
  }
  if (x > hi) {
    clamped = true;
    return cells - 1;
  }
  if (cells == 1 || !(hi > lo)) return 0;
  const double width = hi - lo;
  const auto boundary = [&](std::size_t j) {
    return lo + width * static_cast<double>(j) / static_cast<double>(cells);
  };
  auto idx = static_cast<std::size_t>(
      std::floor((x - lo) / width * static_cast<double>(cells)));
  idx = std::min(idx, cells - 1);
  // Nudge rounding so the cell agrees with the boundary definition.
  while (idx + 1 < cells && x >= boundary(idx + 1)) ++idx;
  while (idx > 0 && x < boundary(idx)) --idx;
  return idx;
}

std::size_t GridHistogram::cell_of(std::span<const double> p, bool* clamped) const {
  bool any = false;
  std::size_t cell = 0;
  for (std::size_t k = 0; k < cells_per_dim_.size(); ++k) {
    cell = cell * cells_per_dim_[k] + axis_index(k, p[k], any);
  }
  if (clamped) *clamped = any;
  return cell;
}

Point GridHistogram::cell_center(std::size_t cell) const {
  const std::size_t d = cells_per_dim_.size();
  Point c(d);
  for (std::size_t k = d; k-- > 0;) {
    const std::size_t cells = cells_per_dim_[k];
    const std::size_t idx = cell % cells;
    cell /= cells;
    const double w = domain_.side(k) / static_cast<double>(cells);
    c[k] = domain_.lo(k) + w * (static_cast<double>(idx) + 0.5);
  }
  return c;
}

void GridHistogram::add(std::span<const double> center, std::uint64_t bytes) {
  bool clamped = false;
  cell_bytes_[cell_of(center, &clamped)] += bytes;
  if (clamped) ++clamped_;
}

void GridHistogram::add(const Record& record) {
  add(record.envelope.center(), record.payload_size);
}

void GridHistogram::set_cell_bytes(std::vector<std::uint64_t> bytes) {
  if (bytes.size() != cell_bytes_.size()) {
    throw DataError("histogram cell array has the wrong length");
  }
  cell_bytes_ = std::move(bytes);
}

std::vector<std::size_t> default_grid(std::size_t partitions, std::size_t dim) {
  const double target = 4.0 * static_cast<double>(std::max<std::size_t>(partitions, 1));
  std::size_t c = 1;
  while (std::pow(static_cast<double>(c), static_cast<double>(dim)) < target) ++c;
  return std::vector<std::size_t>(dim, c);
}

GridHistogram build_histogram(std::span<const Record> records,
                              const Envelope& domain,
                              std::vector<std::size_t> cells_per_dim) {
  GridHistogram hist(domain, std::move(cells_per_dim));
  for (const Record& r : records) hist.add(r);
  return hist;
}

// --------------------------------------------------------------- weights ---

namespace {

// Static k-d tree answering nearest-neighbour queries over the sample with
// (distance, index) lexicographic ties.
class NearestPoint {
 public:
  explicit NearestPoint(const PointSet& pts) : pts_(pts), order_(pts.size()) {
    std::iota(order_.begin(), order_.end(), std::uint32_t{0});
    build(0, order_.size(), 0);
  }

  std::size_t query(std::span<const double> q) const {
    best_ = std::numeric_limits<double>::infinity();
    best_idx_ = std::numeric_limits<std::size_t>::max();
    search(0, order_.size(), 0, q);
    return best_idx_;
  }

 private:
  void build(std::size_t lo, std::size_t hi, std::size_t depth) {
    if (hi - lo <= 8) return;
    const std::size_t axis = depth % pts_.dim();
    const std::size_t mid = lo + (hi - lo) / 2;
    std::nth_element(order_.begin() + lo, order_.begin() + mid, order_.begin() + hi,
                     [&](std::uint32_t a, std::uint32_t b) {
                       return pts_.coord(a, axis) < pts_.coord(b, axis);
                     });
    build(lo, mid, depth + 1);
    build(mid + 1, hi, depth + 1);
  }

  void visit(std::uint32_t i, std::span<const double> q) const {
    double d2 = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k) {
      const double t = pts_.coord(i, k) - q[k];
      d2 += t * t;
    }
    if (d2 < best_ || (d2 == best_ && i < best_idx_)) {
      best_ = d2;
      best_idx_ = i;
    }
  }

  void search(std::size_t lo, std::size_t hi, std::size_t depth,
              std::span<const double> q) const {
    if (hi - lo <= 8) {
      for (std::size_t j = lo; j < hi; ++j) visit(order_[j], q);
      return;
    }
    const std::size_t axis = depth % pts_.dim();
    const std::size_t mid = lo + (hi - lo) / 2;
    const std::uint32_t pivot = order_[mid];
    visit(pivot, q);
    const double delta = q[axis] - pts_.coord(pivot, axis);
    const bool left_first = delta < 0;
    if (left_first) {
      search(lo, mid, depth + 1, q);
      if (delta * delta <= best_) search(mid + 1, hi, depth + 1, q);
    } else {
      search(mid + 1, hi, depth + 1, q);
      if (delta * delta <= best_) search(lo, mid, depth + 1, q);
    }
  }

  const PointSet& pts_;
  std::vector<std::uint32_t> order_;
  mutable double best_ = 0.0;
  mutable std::size_t best_idx_ = 0;
};

}  // namespace

WeightedSample assign_weights(const WeightedSample& sample, const GridHistogram& hist) {
  if (sample.points.empty()) throw DataError("cannot weight an empty sample");
  if (sample.dim() != hist.domain().dim()) {
    throw DataError("sample and histogram dimensionality differ");
  }
  const std::size_t n = sample.size();
  std::vector<std::size_t> cell_of_point(n);
  std::vector<std::uint32_t> points_in_cell(hist.cell_count(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    cell_of_point[i] = hist.cell_of(sample.points[i]);
    ++points_in_cell[cell_of_point[i]];
  }

  WeightedSample out = sample;
  const auto bytes = hist.cell_bytes();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = cell_of_point[i];
    out.weights[i] = static_cast<double>(bytes[c]) / points_in_cell[c];
  }

  std::unique_ptr<NearestPoint> nearest;
  for (std::size_t c = 0; c < hist.cell_count(); ++c) {
    if (bytes[c] == 0 || points_in_cell[c] != 0) continue;
    if (!nearest) nearest = std::make_unique<NearestPoint>(sample.points);
    const std::size_t i = nearest->query(hist.cell_center(c));
    out.weights[i] += static_cast<double>(bytes[c]);
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!(out.weights[i] > 0.0)) {
      throw DataError("sample point " + std::to_string(i) +
                      " falls in a histogram cell with no bytes");
    }
  }
  out.total_weight = std::accumulate(out.weights.begin(), out.weights.end(), 0.0);
  out.total_bytes = hist.total_bytes();
  out.byte_weighted = true;
  return out;
}

// -------------------------------------------------------------- sidecars ---

using detail::envelope_from;
using detail::envelope_json;
using detail::read_json;
using detail::write_json;

void save_sample(const WeightedSample& s, const std::string& path) {
  json j;
  j["version"] = kVersionStamp;
  j["kind"] = "sample";
  j["d"] = s.dim();
  j["total_bytes"] = s.total_bytes;
  j["total_weight"] = s.total_weight;
  j["record_count"] = s.record_count;
  j["byte_weighted"] = s.byte_weighted;
  j["domain"] = envelope_json(s.domain);
  j["coords"] = std::vector<double>(s.points.raw().begin(), s.points.raw().end());
  j["weights"] = s.weights;
  write_json(j, path);
}

WeightedSample load_sample(const std::string& path) {
  const json j = read_json(path);
  try {
    if (j.at("kind") != "sample") throw DataError("'" + path + "' is not a sample");
    WeightedSample s;
    const auto d = j.at("d").get<std::size_t>();
    const auto coords = j.at("coords").get<std::vector<double>>();
    if (d == 0 || coords.size() % d != 0) throw DataError("sample coordinates are ragged");
    s.points = PointSet(d);
    s.points.reserve(coords.size() / d);
    for (std::size_t i = 0; i < coords.size(); i += d) {
      s.points.push_back(std::span<const double>(coords).subspan(i, d));
    }
    s.weights = j.at("weights").get<std::vector<double>>();
    if (s.weights.size() != s.points.size()) throw DataError("sample weights are ragged");
    s.total_bytes = j.at("total_bytes").get<std::uint64_t>();
    s.total_weight = j.at("total_weight").get<double>();
    s.record_count = j.at("record_count").get<std::uint64_t>();
    s.byte_weighted = j.at("byte_weighted").get<bool>();
    s.domain = envelope_from(j.at("domain"));
    return s;
  } catch (const json::exception& e) {
    throw DataError("'" + path + "': " + e.what());
  } catch (const UsageError& e) {
    throw DataError("'" + path + "': " + e.what());
  }
}

void save_histogram(const GridHistogram& h, const std::string& path) {
  json j;
  j["version"] = kVersionStamp;
  j["kind"] = "histogram";
  j["domain"] = envelope_json(h.domain());
  j["cells_per_dim"] = std::vector<std::size_t>(h.cells_per_dim().begin(),
                                                h.cells_per_dim().end());
  j["cell_bytes"] = std::vector<std::uint64_t>(h.cell_bytes().begin(),
                                               h.cell_bytes().end());
  write_json(j, path);
}

GridHistogram load_histogram(const std::string& path) {
  const json j = read_json(path);
  try {
    if (j.at("kind") != "histogram") throw DataError("'" + path + "' is not a histogram");
    GridHistogram h(envelope_from(j.at("domain")),
                    j.at("cells_per_dim").get<std::vector<std::size_t>>());
    h.set_cell_bytes(j.at("cell_bytes").get<std::vector<std::uint64_t>>());
    return h;
  } catch (const json::exception& e) {
    throw DataError("'" + path + "': " + e.what());
  } catch (const UsageError& e) {
    throw DataError("'" + path + "': " + e.what());
  }
}

}  // namespace rsgrove
