#include "rsgrove/curves.hpp"

#include <cmath>
#include <string>

#include "rsgrove/errors.hpp"

namespace rsgrove {

namespace {

void check_bits(std::size_t dim, unsigned bits) {
  if (dim == 0 || bits == 0 || bits * dim > 63) {
    throw UsageError("curve keys need 1 <= bits and bits * d <= 63 (d=" +
                     std::to_string(dim) + ", bits=" + std::to_string(bits) + ")");
  }
}

std::uint64_t interleave(std::span<const std::uint64_t> x, unsigned bits) {
  std::uint64_t key = 0;
  for (unsigned j = bits; j-- > 0;) {
    for (std::uint64_t v : x) key = (key << 1) | ((v >> j) & 1U);
  }
  return key;
}

std::vector<std::uint64_t> deinterleave(std::uint64_t key, std::size_t dim, unsigned bits) {
  std::vector<std::uint64_t> x(dim, 0);
  unsigned pos = bits * static_cast<unsigned>(dim);
  for (unsigned j = bits; j-- > 0;) {
    for (std::size_t k = 0; k < dim; ++k) {
      --pos;
      x[k] |= ((key >> pos) & 1U) << j;
    }
  }
  return x;
}

}  // namespace

std::string_view to_string(CurveKind kind) {
  return kind == CurveKind::z ? "z" : "hilbert";
}

CurveKind curve_kind_from(std::string_view name) {
  if (name == "z") return CurveKind::z;
  if (name == "hilbert") return CurveKind::hilbert;
  throw DataError("unknown curve '" + std::string(name) + "'");
}

unsigned default_curve_bits(std::size_t dim) {
  if (dim == 0 || dim > 63) throw UsageError("curve keys support 1..63 dimensions");
  return static_cast<unsigned>(63 / dim);
}

std::vector<std::uint64_t> grid_cell(std::span<const double> p, const Envelope& domain,
                                     unsigned bits) {
  check_bits(p.size(), bits);
  const double cells = std::ldexp(1.0, static_cast<int>(bits));
  const std::uint64_t max_cell = (std::uint64_t{1} << bits) - 1;
  std::vector<std::uint64_t> cell(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double side = domain.side(k);
    if (!(side > 0.0)) {
      cell[k] = 0;
      continue;
    }
    const double v = std::floor((p[k] - domain.lo(k)) / side * cells);
    if (!(v > 0.0)) {
      cell[k] = 0;
    } else if (v >= cells) {
      cell[k] = max_cell;
    } else {
      cell[k] = std::min(static_cast<std::uint64_t>(v), max_cell);
    }
  }
  return cell;
}

std::uint64_t z_key(std::span<const std::uint64_t> cell, unsigned bits) {
  check_bits(cell.size(), bits);
  return interleave(cell, bits);
}

std::vector<std::uint64_t> z_cell(std::uint64_t key, std::size_t dim, unsigned bits) {
  check_bits(dim, bits);
  return deinterleave(key, dim, bits);
}

std::uint64_t hilbert_key(std::span<const std::uint64_t> cell, unsigned bits) {
  check_bits(cell.size(), bits);
  std::vector<std::uint64_t> x(cell.begin(), cell.end());
  const std::size_t n = x.size();
  const std::uint64_t top = std::uint64_t{1} << (bits - 1);

  // Inverse undo of the per-level rotations/reflections.
  for (std::uint64_t q = top; q > 1; q >>= 1) {
    const std::uint64_t p = q - 1;
    for (std::size_t i = 0; i < n; ++i) {
      if (x[i] & q) {
        x[0] ^= p;
      } else {
        const std::uint64_t t = (x[0] ^ x[i]) & p;
        x[0] ^= t;
        x[i] ^= t;
      }
    }
  }
  // Gray encode.
  for (std::size_t i = 1; i < n; ++i) x[i] ^= x[i - 1];
  std::uint64_t t = 0;
  for (std::uint64_t q = top; q > 1; q >>= 1) {
    if (x[n - 1] & q) t ^= q - 1;
  }
  for (std::size_t i = 0; i < n; ++i) x[i] ^= t;

  return interleave(x, bits);
}

std::vector<std::uint64_t> hilbert_cell(std::uint64_t key, std::size_t dim, unsigned bits) {
  check_bits(dim, bits);
  std::vector<std::uint64_t> x = deinterleave(key, dim, bits);
  const std::size_t n = x.size();
  const std::uint64_t end = std::uint64_t{2} << (bits - 1);

  // Gray decode.
  const std::uint64_t t = x[n - 1] >> 1;
  for (std::size_t i = n - 1; i > 0; --i) x[i] ^= x[i - 1];
  x[0] ^= t;
  // Redo the rotations/reflections, lowest level first.
  for (std::uint64_t q = 2; q != end; q <<= 1) {
    const std::uint64_t p = q - 1;
    for (std::size_t i = n; i-- > 0;) {
      if (x[i] & q) {
        x[0] ^= p;
      } else {
        const std::uint64_t s = (x[0] ^ x[i]) & p;
        x[0] ^= s;
        x[i] ^= s;
      }
    }
  }
  return x;
}

std::uint64_t z_encode(std::span<const double> p, const Envelope& domain, unsigned bits) {
  return z_key(grid_cell(p, domain, bits), bits);
}

std::uint64_t hilbert_encode(std::span<const double> p, const Envelope& domain,
                             unsigned bits) {
  return hilbert_key(grid_cell(p, domain, bits), bits);
}

std::uint64_t curve_encode(CurveKind kind, std::span<const double> p,
                           const Envelope& domain, unsigned bits) {
  return kind == CurveKind::z ? z_encode(p, domain, bits) : hilbert_encode(p, domain, bits);
}

}  // namespace rsgrove
