#include "rsgrove/generators.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "rsgrove/errors.hpp"

namespace rsgrove {

namespace {

double unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

void validate(const GeneratorSpec& s) {
  if (s.dim == 0) throw UsageError("dimension must be positive");
  if (s.distribution == Distribution::diagonal && s.dim < 2) {
    throw UsageError("diagonal data needs d >= 2");
  }
  if (!(s.perc >= 0.0 && s.perc <= 1.0)) throw UsageError("perc must be in [0, 1]");
  if (!(s.buf >= 0.0)) throw UsageError("buf must be non-negative");
  if (s.pad_max > 0 && (s.pad_min < 1 || s.pad_min > s.pad_max)) {
    throw UsageError("padding needs 1 <= min <= max");
  }
  if (!(s.box_size >= 0.0)) throw UsageError("box size must be non-negative");
}

Schema generated_schema(const GeneratorSpec& spec) {
  Schema schema;
  schema.kind = spec.box_size > 0.0 ? Schema::Kind::envelope : Schema::Kind::point;
  schema.dim = spec.dim;
  return schema;
}

void generate(const GeneratorSpec& spec, const std::function<void(std::string_view)>& sink) {
  validate(spec);
  std::mt19937_64 rng(spec.seed);
  std::vector<double> p(spec.dim);
  std::string line;
  const double log_min = spec.pad_max ? std::log(static_cast<double>(spec.pad_min)) : 0.0;
  const double log_max = spec.pad_max ? std::log(static_cast<double>(spec.pad_max) + 1.0) : 0.0;
  for (std::size_t i = 0; i < spec.count; ++i) {
    if (spec.distribution == Distribution::uniform) {
      for (double& x : p) x = unit(rng);
    } else {
      const double t = unit(rng);
      const bool on_line = unit(rng) < spec.perc;
      for (double& x : p) {
        x = t;
        if (!on_line) x = std::clamp(t + (unit(rng) - 0.5) * spec.buf, 0.0, 1.0);
      }
    }
    line.clear();
    auto out = std::back_inserter(line);
    for (std::size_t k = 0; k < spec.dim; ++k) {
      if (k) line += ',';
      fmt::format_to(out, "{:.9f}", p[k]);
    }
    if (spec.box_size > 0.0) {
      for (std::size_t k = 0; k < spec.dim; ++k) {
        fmt::format_to(out, ",{:.9f}", p[k] + unit(rng) * spec.box_size);
      }
    }
    fmt::format_to(out, ",r{}", i);
    if (spec.pad_max > 0) {
      const double len = std::floor(std::exp(log_min + unit(rng) * (log_max - log_min)));
      const auto pad = std::clamp(static_cast<std::size_t>(len), spec.pad_min, spec.pad_max);
      line += ',';
      line.append(pad, 'x');
    }
    sink(line);
  }
}

void for_each_generated(const GeneratorSpec& spec,
                        const std::function<void(const Record&)>& fn) {
  const Schema schema = generated_schema(spec);
  generate(spec, [&](std::string_view line) { fn(parse_record(line, schema, true)); });
}

std::vector<Record> generate_records(const GeneratorSpec& spec) {
  std::vector<Record> out;
  out.reserve(spec.count);
  for_each_generated(spec, [&](const Record& r) { out.push_back(r); });
  return out;
}

namespace {

std::vector<std::string> collect(const GeneratorSpec& spec) {
  std::vector<std::string> out;
  out.reserve(spec.count);
  generate(spec, [&](std::string_view line) { out.emplace_back(line); });
  return out;
}

}  // namespace

std::vector<std::string> gen_uniform(std::size_t n, std::size_t d, std::uint64_t seed) {
  GeneratorSpec s;
  s.count = n;
  s.dim = d;
  s.seed = seed;
  return collect(s);
}

std::vector<std::string> gen_diagonal(std::size_t n, std::size_t d, double perc, double buf,
                                      std::uint64_t seed) {
  GeneratorSpec s;
  s.distribution = Distribution::diagonal;
  s.count = n;
  s.dim = d;
  s.perc = perc;
  s.buf = buf;
  s.seed = seed;
  return collect(s);
}

std::vector<std::string> gen_varsize(std::size_t n, std::size_t d, std::uint64_t seed,
                                     std::size_t min_bytes, std::size_t max_bytes) {
  GeneratorSpec s;
  s.count = n;
  s.dim = d;
  s.seed = seed;
  s.pad_min = min_bytes;
  s.pad_max = max_bytes;
  return collect(s);
}

std::vector<Envelope> gen_queries(const Envelope& domain, std::size_t count,
                                  double area_fraction, std::uint64_t seed) {
  if (!(area_fraction > 0.0 && area_fraction < 1.0)) {
    throw UsageError("area fraction must be in (0, 1)");
  }
  const std::size_t d = domain.dim();
  if (d == 0 || domain.is_empty()) throw UsageError("query domain is empty");
  const double side = std::pow(area_fraction * volume(domain), 1.0 / static_cast<double>(d));
  for (std::size_t k = 0; k < d; ++k) {
    if (side > domain.side(k)) {
      throw UsageError(fmt::format("query side {} exceeds the domain side {} on axis {}", side,
                                   domain.side(k), k));
    }
  }
  std::mt19937_64 rng(seed);
  std::vector<Envelope> out;
  out.reserve(count);
  std::vector<double> lo(d), hi(d);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      lo[k] = domain.lo(k) + unit(rng) * (domain.side(k) - side);
      hi[k] = lo[k] + side;
    }
    out.emplace_back(lo, hi);
  }
  return out;
}

}  // namespace rsgrove
