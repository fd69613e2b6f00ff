#include <doctest.h>

#include <random>

#include "rsgrove/geometry.hpp"

using namespace rsgrove;

namespace {
Envelope box(double x0, double y0, double x1, double y1) { return Envelope({x0, y0}, {x1, y1}); }
}  // namespace

TEST_CASE("volume and margin") {
  CHECK(volume(box(0, 0, 1, 1)) == 1.0);
  CHECK(volume(box(0, 0, 2, 3)) == 6.0);
  CHECK(volume(Envelope::of_point(std::vector<double>{4, 5})) == 0.0);
  CHECK(margin(box(0, 0, 1, 1)) == 2.0);
  CHECK(margin(box(0, 0, 2, 3)) == 5.0);
  CHECK(margin(Envelope::of_point(std::vector<double>{4, 5})) == 0.0);
}

TEST_CASE("intersection") {
  CHECK(intersection(box(0, 0, 2, 2), box(1, 1, 3, 3)) == box(1, 1, 2, 2));
  CHECK_FALSE(intersection(box(0, 0, 1, 1), box(2, 2, 3, 3)).has_value());
  const Envelope a = box(-1, 2, 5, 7);
  CHECK(intersection(a, a) == a);
  // touching boxes share their boundary
  CHECK(intersection(box(0, 0, 1, 1), box(1, 0, 2, 1)) == box(1, 0, 1, 1));
}

TEST_CASE("union and expand") {
  CHECK(envelope_union(box(0, 0, 1, 1), box(2, 2, 3, 3)) == box(0, 0, 3, 3));
  const std::vector<double> inside{0.5, 0.5};
  CHECK(expand(box(0, 0, 1, 1), inside) == box(0, 0, 1, 1));
  const std::vector<double> p{1, 4}, q{3, 2};
  CHECK(expand(Envelope::of_point(p), q) == box(1, 2, 3, 4));
  CHECK(envelope_union(Envelope::empty(2), box(0, 0, 1, 1)) == box(0, 0, 1, 1));
}

TEST_CASE("enlargement") {
  const Enlargement none = enlargement(box(0, 0, 4, 4), box(1, 1, 2, 2));
  CHECK(none.volume == 0.0);
  CHECK(none.margin == 0.0);
  const Enlargement grow = enlargement(box(0, 0, 1, 1), Envelope::of_point(std::vector<double>{2, 1}));
  CHECK(grow.volume == 1.0);
  CHECK(grow.margin == 1.0);
  const Enlargement left = enlargement(box(0, 0, 1, 1), Envelope::of_point(std::vector<double>{-1, 0.5}));
  CHECK(left.volume == grow.volume);
  CHECK(left.margin == grow.margin);
}

TEST_CASE("envelope construction rejects bad input") {
  CHECK_THROWS(Envelope({0, 0}, {1}));
  CHECK_THROWS(Envelope({1, 0}, {0, 1}));
  CHECK_THROWS(Envelope({std::nan(""), 0}, {1, 1}));
  CHECK(Envelope::empty(3).is_empty());
}

TEST_CASE("point set bounds cover every point") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-10, 10);
  PointSet ps(3);
  for (int i = 0; i < 200; ++i) {
    const std::vector<double> p{u(rng), u(rng), u(rng)};
    ps.push_back(p);
  }
  const Envelope b = ps.bounds();
  for (std::size_t i = 0; i < ps.size(); ++i) CHECK(b.contains(ps[i]));
  CHECK(ps.size() == 200);
}

TEST_CASE("intersection is symmetric and contained in both") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 10);
  for (int t = 0; t < 500; ++t) {
    double a0 = u(rng), a1 = u(rng), b0 = u(rng), b1 = u(rng);
    const Envelope a = box(std::min(a0, a1), 0, std::max(a0, a1), 1);
    const Envelope b = box(std::min(b0, b1), 0, std::max(b0, b1), 1);
    const auto ab = intersection(a, b);
    const auto ba = intersection(b, a);
    REQUIRE(ab.has_value() == ba.has_value());
    CHECK(ab.has_value() == a.intersects(b));
    if (ab) {
      CHECK(*ab == *ba);
      CHECK(a.contains(*ab));
      CHECK(b.contains(*ab));
    }
  }
}
