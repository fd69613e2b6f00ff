#include <doctest.h>

#include "oracles.hpp"
#include "rsgrove/errors.hpp"
#include "rsgrove/validity.hpp"

using namespace rsgrove;

TEST_CASE("is_valid worked values") {
  CHECK(is_valid(28, 9, 10));
  CHECK_FALSE(is_valid(62, 9, 10));
  CHECK_FALSE(is_valid(14, 9, 10));
  CHECK(is_valid(10, 9, 10));
  CHECK_FALSE(is_valid(0, 9, 10));
  CHECK_FALSE(is_valid(-5, 9, 10));
}

TEST_CASE("is_valid matches the composition oracle on a small grid") {
  for (int M = 1; M <= 12; ++M) {
    for (int m = 1; m <= M; ++m) {
      const auto ok = oracle::compositions(m, M, 150);
      for (int S = 1; S <= 150; ++S) {
        CHECK_MESSAGE(is_valid(S, m, M) == ok[static_cast<std::size_t>(S)],
                      "S=" << S << " m=" << m << " M=" << M);
      }
    }
  }
}

TEST_CASE("min_valid_size") {
  CHECK(min_valid_size(9, 10) == 81);
  CHECK(min_valid_size(95, 100) == 1805);
  CHECK(min_valid_size(5, 10) == 5);
  CHECK_THROWS_AS(min_valid_size(10, 10), UsageError);
  const auto ok = oracle::compositions(9, 10, 400);
  for (int S = 81; S <= 400; ++S) CHECK(ok[static_cast<std::size_t>(S)]);
  CHECK_FALSE(ok[71]);
  for (int S = 5; S <= 200; ++S) CHECK(oracle::valid_total(S, 5, 10));
}

TEST_CASE("min_sample_bytes") {
  const double mb = 1e6;
  CHECK(min_sample_bytes(0.95, 0.01, 128 * mb) == doctest::Approx(19 * 0.95 * 1.28 * mb));
  CHECK(min_sample_bytes(0.5, 1.0, 1000) == doctest::Approx(500));
  CHECK(min_sample_bytes(0.1, 0.01, 128 * mb) == doctest::Approx(0.1 * 1.28 * mb));
  CHECK(min_sample_bytes(0.1, 0.01, 128 * mb) < min_sample_bytes(0.5, 0.01, 128 * mb));
  CHECK(min_sample_bytes(0.5, 0.01, 128 * mb) < min_sample_bytes(0.95, 0.01, 128 * mb));
}

TEST_CASE("enumerate_valid_ranges worked values") {
  using R = std::vector<PositionRange>;
  CHECK(enumerate_valid_ranges(1000, 450, 550) == R{{450, 550}});
  CHECK(enumerate_valid_ranges(19, 9, 10) == R{{9, 10}});
  CHECK(enumerate_valid_ranges(28, 9, 10) == R{{9, 10}, {18, 19}});
  CHECK_THROWS_AS(enumerate_valid_ranges(14, 9, 10), DataError);
}

TEST_CASE("enumerate_valid_ranges agrees with the oracle on integer positions") {
  for (int M = 2; M <= 10; ++M) {
    for (int m = 1; m <= M; ++m) {
      for (int W = 1; W <= 90; ++W) {
        if (!oracle::valid_total(W, m, M)) continue;
        const auto ranges = enumerate_valid_ranges(W, m, M);
        const auto cuts = oracle::valid_cuts(W, m, M);
        for (int v = 1; v < W; ++v) {
          bool in_range = false;
          for (const auto& r : ranges) in_range |= r.start <= v && v <= r.end;
          CHECK_MESSAGE(in_range == (cuts.count(static_cast<std::size_t>(v)) > 0),
                        "W=" << W << " m=" << m << " M=" << M << " v=" << v);
        }
        for (std::size_t i = 1; i < ranges.size(); ++i) {
          CHECK(ranges[i - 1].end < ranges[i].start);
        }
      }
    }
  }
}
