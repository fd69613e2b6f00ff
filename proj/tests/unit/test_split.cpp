#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "rsgrove/split.hpp"
#include "rsgrove/validity.hpp"

using namespace rsgrove;

namespace {

PointSet points(const std::vector<std::vector<double>>& pts) {
  PointSet ps(pts.front().size());
  for (const auto& p : pts) ps.push_back(p);
  return ps;
}

std::vector<std::uint32_t> identity(std::size_t n) {
  std::vector<std::uint32_t> ids(n);
  std::iota(ids.begin(), ids.end(), 0U);
  return ids;
}

PointSet line(std::size_t n) {
  PointSet ps(2);
  for (std::size_t i = 0; i < n; ++i) ps.push_back(std::vector<double>{double(i), 0.0});
  return ps;
}

}  // namespace

TEST_CASE("split windows") {
  const SplitWindow w = split_window(10, 2);
  CHECK(w.first == 2);
  CHECK(w.last == 8);
  CHECK(split_window(3, 2).empty());
  const SplitWindow r = ratio_window(28, 9, 0.4);
  CHECK(r.first == 12);
  CHECK(r.last == 16);
}

TEST_CASE("choose_split_axis") {
  auto ids = identity(6);
  PointSet horiz = points({{0, 1}, {1, 1}, {2, 1}, {3, 1}, {4, 1}, {5, 1}});
  CHECK(choose_split_axis(horiz, ids, split_window(6, 1)) == 0);
  PointSet vert = points({{1, 0}, {1, 1}, {1, 2}, {1, 3}, {1, 4}, {1, 5}});
  CHECK(choose_split_axis(vert, ids, split_window(6, 1)) == 1);
  auto four = identity(4);
  PointSet square = points({{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  CHECK(choose_split_axis(square, four, split_window(4, 1)) == 0);
  CHECK_FALSE(choose_split_axis(square, four, split_window(4, 3)).has_value());
}

TEST_CASE("choose_split_point") {
  PointSet clusters(2);
  for (int i = 0; i < 5; ++i) clusters.push_back(std::vector<double>{0.1 * i, 0.1 * i});
  for (int i = 0; i < 5; ++i) clusters.push_back(std::vector<double>{10 + 0.1 * i, 10 + 0.1 * i});
  auto ids = identity(10);
  CHECK(choose_split_point(clusters, ids, split_window(10, 2)) == 5);

  for (std::size_t n : {7U, 8U, 11U}) {
    PointSet ps = line(n);
    auto order = identity(n);
    CHECK(choose_split_point(ps, order, split_window(n, 1)) == (n + 1) / 2);
  }
  PointSet ps = line(8);
  auto order = identity(8);
  CHECK(choose_split_point(ps, order, split_window(8, 4)) == 4);
}

TEST_CASE("choose_valid_split_point on 28 points") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    PointSet ps(2);
    for (int i = 0; i < 28; ++i) ps.push_back(std::vector<double>{u(rng), u(rng)});
    auto order = identity(28);
    sort_along(ps, order, trial % 2);
    const auto k = choose_valid_split_point(ps, order, 9, 10, 0.0);
    REQUIRE(k.has_value());
    CHECK((*k == 9 || *k == 10 || *k == 18 || *k == 19));
    CHECK(*k != 14);
  }
  PointSet ps = line(18);
  auto order = identity(18);
  CHECK(choose_valid_split_point(ps, order, 9, 10, 0.0) == 9);
}

TEST_CASE("choose_valid_split_point only returns oracle-valid cuts") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0, 1);
  for (int M = 3; M <= 12; ++M) {
    for (int m = 1; m < M; ++m) {
      for (int n = M + 1; n <= 60; n += 3) {
        if (!oracle::valid_total(n, m, M)) continue;
        PointSet ps(2);
        for (int i = 0; i < n; ++i) ps.push_back(std::vector<double>{u(rng), u(rng)});
        auto order = identity(static_cast<std::size_t>(n));
        sort_along(ps, order, 0);
        const auto cuts = oracle::valid_cuts(n, m, M);
        const auto k = choose_valid_split_point(ps, order, m, M, 0.0);
        REQUIRE_MESSAGE(k.has_value(), "n=" << n << " m=" << m << " M=" << M);
        CHECK(cuts.count(*k) == 1);
      }
    }
  }
}

TEST_CASE("choose_weighted_split_point") {
  PointSet ps = line(5);
  auto order = identity(5);
  const std::vector<double> flat{200, 200, 200, 200, 200};
  CHECK_FALSE(choose_weighted_split_point(ps, order, flat, 450, 550, 0.0).has_value());
  const std::vector<double> fixed{200, 200, 100, 300, 200};
  CHECK(choose_weighted_split_point(ps, order, fixed, 450, 550, 0.0) == 3);

  PointSet many = line(28);
  auto ids = identity(28);
  const std::vector<double> ones(28, 1.0);
  CHECK(choose_weighted_split_point(many, ids, ones, 9, 10, 0.0) ==
        choose_valid_split_point(many, ids, 9, 10, 0.0));
}

TEST_CASE("correct_weights") {
  const std::vector<double> w{200, 200, 200, 200, 200};
  const auto empty = empty_valid_ranges(w, 450, 550);
  REQUIRE(empty.size() == 1);
  CHECK(empty[0] == PositionRange{450, 550});
  const WeightCorrection c = correct_weights(w, empty);
  CHECK(c.weights == std::vector<double>{200, 200, 100, 300, 200});
  CHECK(c.changed_entries == 2);
  CHECK(c.corrected == 1);

  const WeightCorrection none = correct_weights(w, {});
  CHECK(none.weights == w);
  CHECK(none.changed_entries == 0);

  const std::vector<double> two{10, 10, 10, 10, 10, 10};
  const std::vector<PositionRange> gaps{{12, 14}, {35, 38}};
  const WeightCorrection c2 = correct_weights(two, gaps);
  CHECK(c2.changed_entries >= 3);
  CHECK(c2.changed_entries <= 4);
  CHECK(std::accumulate(c2.weights.begin(), c2.weights.end(), 0.0) == doctest::Approx(60));
  double pos = 0;
  bool hit1 = false, hit2 = false;
  for (std::size_t i = 0; i + 1 < c2.weights.size(); ++i) {
    pos += c2.weights[i];
    hit1 |= pos >= 12 && pos <= 14;
    hit2 |= pos >= 35 && pos <= 38;
  }
  CHECK(hit1);
  CHECK(hit2);
}

TEST_CASE("weight correction fills every empty range and keeps weights positive") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> u(1, 100);
  int corrected_cases = 0;
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 5 + rng() % 40;
    std::vector<double> w(n);
    for (double& x : w) x = u(rng);
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    // integer bounds keep every position and midpoint exact
    const double M = std::ceil(total / (2 + static_cast<double>(rng() % 3)));
    const double m = std::floor(0.9 * M);
    if (!is_valid(total, m, M)) continue;
    const auto empty = empty_valid_ranges(w, m, M);
    if (empty.empty()) continue;
    ++corrected_cases;
    const WeightCorrection c = correct_weights(w, empty);
    CHECK(std::accumulate(c.weights.begin(), c.weights.end(), 0.0) ==
          doctest::Approx(total).epsilon(1e-9));
    for (double x : c.weights) CHECK(x > 0);
    CHECK(c.corrected >= 1);
    CHECK(c.changed_entries <= 2 * c.corrected);
    CHECK(empty_valid_ranges(c.weights, m, M).size() == empty.size() - c.corrected);
  }
  CHECK(corrected_cases > 10);
}
