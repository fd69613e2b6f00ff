#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "rsgrove/geometry.hpp"

namespace rsgrove {

enum class CurveKind { z, hilbert };

std::string_view to_string(CurveKind kind);
CurveKind curve_kind_from(std::string_view name);

/// Bits per dimension so that a d-dimensional key fits in 63 bits.
unsigned default_curve_bits(std::size_t dim);

/// Integer grid cell of `p` after normalising each coordinate of `domain`
/// to [0, 2^bits). Points outside the domain are clamped.
std::vector<std::uint64_t> grid_cell(std::span<const double> p, const Envelope& domain,
                                     unsigned bits);

/// Morton key: bit j of dimension k lands at position j*d + (d-1-k), so
/// dimension 0 is the most significant within each bit group.
std::uint64_t z_key(std::span<const std::uint64_t> cell, unsigned bits);
std::vector<std::uint64_t> z_cell(std::uint64_t key, std::size_t dim, unsigned bits);

/// d-dimensional Hilbert key of order `bits` (transpose form with Gray-code
/// rotation, interleaved most significant bit first).
std::uint64_t hilbert_key(std::span<const std::uint64_t> cell, unsigned bits);
std::vector<std::uint64_t> hilbert_cell(std::uint64_t key, std::size_t dim, unsigned bits);

std::uint64_t z_encode(std::span<const double> p, const Envelope& domain, unsigned bits);
std::uint64_t hilbert_encode(std::span<const double> p, const Envelope& domain,
                             unsigned bits);
std::uint64_t curve_encode(CurveKind kind, std::span<const double> p,
                           const Envelope& domain, unsigned bits);

}  // namespace rsgrove
