#include "rsgrove/validity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rsgrove/errors.hpp"

namespace rsgrove {

namespace {

// Ceiling for quantities that are integers in exact arithmetic but pick up
// representation error as doubles (0.95 / 0.05, 0.01 * 128e6).
double ceil_snapped(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(r))) return r;
  return std::ceil(x);
}

}  // namespace

bool is_valid(double total, double m, double M) {
  if (!(m > 0.0) || !(m <= M)) {
    throw UsageError("capacity bounds must satisfy 0 < m <= M");
  }
  if (!(total > 0.0)) return false;
  return std::ceil(total / M) <= std::floor(total / m);
}

double min_valid_size(double m, double M) {
  if (!(m > 0.0) || !(m < M)) {
    throw UsageError("minimum valid size needs 0 < m < M");
  }
  return std::ceil(m / (M - m)) * m;
}

double min_sample_bytes(double alpha, double ratio, double block_bytes) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw UsageError("alpha must be in (0, 1)");
  if (!(ratio > 0.0 && ratio <= 1.0)) throw UsageError("ratio must be in (0, 1]");
  return ceil_snapped(alpha / (1.0 - alpha)) * alpha * ceil_snapped(ratio * block_bytes);
}

std::vector<PositionRange> enumerate_valid_ranges(double total, double m, double M) {
  if (!is_valid(total, m, M)) {
    throw DataError("total " + std::to_string(total) +
                    " is not a valid partition size");
  }
  std::vector<PositionRange> ranges;
  for (double i = 1; i * m <= total; i += 1) {
    const double j1 = std::max(1.0, std::ceil((total - i * M) / M));
    const double j2 = std::floor((total - i * m) / m);
    for (double j = j1; j <= j2; j += 1) {
      const double start = std::max(i * m, total - j * M);
      const double end = std::min(i * M, total - j * m);
      if (start <= end) ranges.push_back({start, end});
    }
  }
  std::sort(ranges.begin(), ranges.end(), [](const auto& a, const auto& b) {
    return a.start < b.start || (a.start == b.start && a.end < b.end);
  });
  std::vector<PositionRange> merged;
  for (const PositionRange& r : ranges) {
    if (!merged.empty() && r.start <= merged.back().end) {
      merged.back().end = std::max(merged.back().end, r.end);
    } else {
      merged.push_back(r);
    }
  }
  return merged;
}

}  // namespace rsgrove
