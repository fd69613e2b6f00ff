#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace rsgrove {

/// An owned d-dimensional point. Functions that only read a point take
/// `std::span<const double>` so rows of a PointSet can be passed directly.
using Point = std::vector<double>;

/// Axis-aligned box [lo, hi] in d dimensions. Zero-extent sides are allowed,
/// so a point is a box with lo == hi.
class Envelope {
 public:
  Envelope() = default;

  /// Throws UsageError when the bounds have different lengths, are empty,
  /// or lo[k] > hi[k] for some k.
  Envelope(std::vector<double> lo, std::vector<double> hi);

  static Envelope of_point(std::span<const double> p);

  /// A box that contains nothing (lo = +inf, hi = -inf) in `dim`
  /// dimensions; the identity element for `extend`.
  static Envelope empty(std::size_t dim);

  std::size_t dim() const { return lo_.size(); }
  bool is_empty() const;

  std::span<const double> lo() const { return lo_; }
  std::span<const double> hi() const { return hi_; }
  double lo(std::size_t k) const { return lo_[k]; }
  double hi(std::size_t k) const { return hi_[k]; }
  double side(std::size_t k) const { return hi_[k] - lo_[k]; }

  Point center() const;

  void extend(std::span<const double> p);
  void extend(const Envelope& other);

  bool contains(std::span<const double> p) const;
  bool contains(const Envelope& other) const;
  /// Closed-box test: boxes sharing only a face intersect.
  bool intersects(const Envelope& other) const;

  friend bool operator==(const Envelope&, const Envelope&) = default;

 private:
  std::vector<double> lo_;
  std::vector<double> hi_;
};

double volume(const Envelope& e);
double margin(const Envelope& e);

/// Component-wise max(lo)/min(hi); nullopt when disjoint in any dimension.
/// Touching boxes yield a zero-volume envelope.
std::optional<Envelope> intersection(const Envelope& a, const Envelope& b);

/// Smallest envelope containing both inputs.
Envelope envelope_union(const Envelope& a, const Envelope& b);
Envelope expand(const Envelope& e, std::span<const double> p);

struct Enlargement {
  double volume = 0.0;
  double margin = 0.0;
};

/// Growth of `e` in volume and margin when it absorbs `x`.
Enlargement enlargement(const Envelope& e, const Envelope& x);

/// Row-major storage for many points of the same dimensionality.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(std::size_t dim) : dim_(dim) {}

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
  bool empty() const { return coords_.empty(); }

  std::span<const double> operator[](std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  double coord(std::size_t i, std::size_t k) const {
    return coords_[i * dim_ + k];
  }

  void push_back(std::span<const double> p);
  void reserve(std::size_t n) { coords_.reserve(n * dim_); }

  std::span<const double> raw() const { return coords_; }
  Envelope bounds() const;

  friend bool operator==(const PointSet&, const PointSet&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<double> coords_;
};

}  // namespace rsgrove
