#pragma once

#include <vector>

namespace rsgrove {

/// A total S is a valid partition size w.r.t. [m, M] when it can be written
/// as a sum of parts that each lie in [m, M]. That holds iff
/// ceil(S/M) <= floor(S/m). Non-positive totals are never valid.
///
/// Works on reals as well as integers: weighted partitions apply the same
/// test to byte totals. No epsilon is applied.
bool is_valid(double total, double m, double M);

/// Threshold above which every total is valid: ceil(m / (M - m)) * m.
/// Throws UsageError when m >= M.
double min_valid_size(double m, double M);

/// Smallest sample storage size (bytes) that guarantees a valid initial
/// partition for balance factor `alpha`, sampling ratio `ratio` and block
/// size `block_bytes`: ceil(alpha / (1 - alpha)) * alpha * ceil(ratio * B).
double min_sample_bytes(double alpha, double ratio, double block_bytes);

/// A closed interval [start, end] of split positions.
struct PositionRange {
  double start = 0.0;
  double end = 0.0;
  friend bool operator==(const PositionRange&, const PositionRange&) = default;
};

/// Every position v at which a total W can be cut so that both v and W - v
/// are valid. Left ranges [i*m, i*M] are intersected with right ranges
/// [W - j*M, W - j*m] for all j in [max(1, j1), j2]; overlapping results are
/// merged and returned in ascending order. Throws DataError when W itself is
/// not valid.
std::vector<PositionRange> enumerate_valid_ranges(double total, double m, double M);

}  // namespace rsgrove
