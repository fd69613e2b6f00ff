#include "rsgrove/manifest.hpp"

#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include "json_io.hpp"
#include "rsgrove/errors.hpp"
#include "rsgrove/version.hpp"

namespace rsgrove {

namespace {

constexpr std::string_view kMagic = "# rsgrove manifest v1";

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t end = s.find(sep, start);
    out.push_back(s.substr(start, end == std::string_view::npos ? end : end - start));
    if (end == std::string_view::npos) return out;
    start = end + 1;
  }
}

template <typename T>
T parse_number(std::string_view s, std::size_t line) {
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw DataError(fmt::format("manifest line {}: bad number '{}'", line, s));
  }
  return value;
}

void append_box(std::string& out, const Envelope& e, std::size_t dim) {
  const Envelope box = e.dim() == dim ? e : Envelope::empty(dim);
  for (double x : box.lo()) fmt::format_to(std::back_inserter(out), ",{}", x);
  for (double x : box.hi()) fmt::format_to(std::back_inserter(out), ",{}", x);
}

Envelope read_box(const std::vector<std::string_view>& f, std::size_t at, std::size_t dim,
                  std::size_t line) {
  std::vector<double> lo(dim), hi(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    lo[k] = parse_number<double>(f[at + k], line);
    hi[k] = parse_number<double>(f[at + dim + k], line);
  }
  if (lo[0] > hi[0]) return Envelope::empty(dim);
  try {
    return Envelope(std::move(lo), std::move(hi));
  } catch (const UsageError& e) {
    throw DataError(fmt::format("manifest line {}: {}", line, e.what()));
  }
}

}  // namespace

std::string partition_file_name(std::size_t id) { return fmt::format("part-{:05d}", id); }

std::string manifest_to_text(const Manifest& m) {
  std::string out = fmt::format(
      "{} version={} d={} mode={} replicated={} block_size={} partitioner={} schema={} "
      "delimiter={}\n",
      kMagic, kVersion, m.dim, to_string(m.mode), m.replicated() ? 1 : 0, m.block_size,
      m.partitioner, m.schema, static_cast<int>(static_cast<unsigned char>(m.delimiter)));
  for (const PartitionStats& p : m.partitions) {
    out += std::to_string(p.id);
    append_box(out, p.mbb, m.dim);
    fmt::format_to(std::back_inserter(out), ",{},{}", p.record_count, p.size);
    if (m.replicated()) append_box(out, p.cell, m.dim);
    out += '\n';
  }
  return out;
}

Manifest manifest_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind(kMagic, 0) != 0) {
    throw DataError("not an rsgrove manifest");
  }
  Manifest m;
  bool has_dim = false;
  for (std::string_view kv : split(std::string_view(line).substr(kMagic.size()), ' ')) {
    const std::size_t eq = kv.find('=');
    if (kv.empty() || eq == std::string_view::npos) continue;
    const std::string_view key = kv.substr(0, eq);
    const std::string_view value = kv.substr(eq + 1);
    if (key == "d") {
      m.dim = parse_number<std::size_t>(value, 1);
      has_dim = true;
    } else if (key == "mode") {
      m.mode = assign_mode_from(value);
    } else if (key == "block_size") {
      m.block_size = parse_number<double>(value, 1);
    } else if (key == "partitioner") {
      m.partitioner = std::string(value);
    } else if (key == "schema") {
      m.schema = std::string(value);
    } else if (key == "delimiter") {
      m.delimiter = static_cast<char>(parse_number<int>(value, 1));
    }
  }
  if (!has_dim || m.dim == 0) throw DataError("manifest header lacks d");

  const std::size_t width = 1 + 2 * m.dim + 2 + (m.replicated() ? 2 * m.dim : 0);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto f = split(line, ',');
    if (f.size() != width) {
      throw DataError(fmt::format("manifest line {}: expected {} fields, got {}", lineno, width,
                                  f.size()));
    }
    PartitionStats p;
    p.id = parse_number<std::size_t>(f[0], lineno);
    if (p.id != m.partitions.size()) {
      throw DataError(fmt::format("manifest line {}: ids must be 0..n-1 in order", lineno));
    }
    p.mbb = read_box(f, 1, m.dim, lineno);
    p.record_count = parse_number<std::uint64_t>(f[1 + 2 * m.dim], lineno);
    p.size = parse_number<std::uint64_t>(f[2 + 2 * m.dim], lineno);
    p.cell = m.replicated() ? read_box(f, 3 + 2 * m.dim, m.dim, lineno) : Envelope::empty(m.dim);
    m.partitions.push_back(std::move(p));
  }
  return m;
}

void write_manifest(const Manifest& manifest, const std::string& path) {
  detail::write_text(manifest_to_text(manifest), path);
}

Manifest read_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return manifest_from_text(buf.str());
}

}  // namespace rsgrove
