#include "rsgrove/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rsgrove/errors.hpp"

namespace rsgrove {

namespace {

void check_same_dim(std::size_t a, std::size_t b) {
  if (a != b) {
    throw UsageError("dimension mismatch: " + std::to_string(a) + " vs " +
                     std::to_string(b));
  }
}

}  // namespace

Envelope::Envelope(std::vector<double> lo, std::vector<double> hi)
    : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.empty()) throw UsageError("envelope needs at least one dimension");
  check_same_dim(lo_.size(), hi_.size());
  for (std::size_t k = 0; k < lo_.size(); ++k) {
    if (!(lo_[k] <= hi_[k])) {
      throw UsageError("envelope has lo > hi in dimension " +
                       std::to_string(k));
    }
  }
}

Envelope Envelope::of_point(std::span<const double> p) {
  Envelope e;
  e.lo_.assign(p.begin(), p.end());
  e.hi_ = e.lo_;
  return e;
}

Envelope Envelope::empty(std::size_t dim) {
  Envelope e;
  e.lo_.assign(dim, std::numeric_limits<double>::infinity());
  e.hi_.assign(dim, -std::numeric_limits<double>::infinity());
  return e;
}

bool Envelope::is_empty() const {
  for (std::size_t k = 0; k < lo_.size(); ++k) {
    if (lo_[k] > hi_[k]) return true;
  }
  return lo_.empty();
}

Point Envelope::center() const {
  Point c(dim());
  for (std::size_t k = 0; k < dim(); ++k) c[k] = lo_[k] + (hi_[k] - lo_[k]) / 2;
  return c;
}

void Envelope::extend(std::span<const double> p) {
  check_same_dim(dim(), p.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    lo_[k] = std::min(lo_[k], p[k]);
    hi_[k] = std::max(hi_[k], p[k]);
  }
}

void Envelope::extend(const Envelope& other) {
  check_same_dim(dim(), other.dim());
  for (std::size_t k = 0; k < dim(); ++k) {
    lo_[k] = std::min(lo_[k], other.lo_[k]);
    hi_[k] = std::max(hi_[k], other.hi_[k]);
  }
}

bool Envelope::contains(std::span<const double> p) const {
  check_same_dim(dim(), p.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] < lo_[k] || p[k] > hi_[k]) return false;
  }
  return true;
}

bool Envelope::contains(const Envelope& other) const {
  check_same_dim(dim(), other.dim());
  for (std::size_t k = 0; k < dim(); ++k) {
    if (other.lo_[k] < lo_[k] || other.hi_[k] > hi_[k]) return false;
  }
  return true;
}

bool Envelope::intersects(const Envelope& other) const {
  check_same_dim(dim(), other.dim());
  for (std::size_t k = 0; k < dim(); ++k) {
    if (other.lo_[k] > hi_[k] || other.hi_[k] < lo_[k]) return false;
  }
  return true;
}

double volume(const Envelope& e) {
  if (e.is_empty()) return 0.0;
  double v = 1.0;
  for (std::size_t k = 0; k < e.dim(); ++k) v *= e.side(k);
  return v;
}

double margin(const Envelope& e) {
  if (e.is_empty()) return 0.0;
  double s = 0.0;
  for (std::size_t k = 0; k < e.dim(); ++k) s += e.side(k);
  return s;
}

std::optional<Envelope> intersection(const Envelope& a, const Envelope& b) {
  check_same_dim(a.dim(), b.dim());
  std::vector<double> lo(a.dim());
  std::vector<double> hi(a.dim());
  for (std::size_t k = 0; k < a.dim(); ++k) {
    lo[k] = std::max(a.lo(k), b.lo(k));
    hi[k] = std::min(a.hi(k), b.hi(k));
    if (lo[k] > hi[k]) return std::nullopt;
  }
  return Envelope(std::move(lo), std::move(hi));
}

Envelope envelope_union(const Envelope& a, const Envelope& b) {
  Envelope u = a;
  u.extend(b);
  return u;
}

Envelope expand(const Envelope& e, std::span<const double> p) {
  Envelope u = e;
  u.extend(p);
  return u;
}

Enlargement enlargement(const Envelope& e, const Envelope& x) {
  const Envelope u = envelope_union(e, x);
  return {volume(u) - volume(e), margin(u) - margin(e)};
}

void PointSet::push_back(std::span<const double> p) {
  if (dim_ == 0) dim_ = p.size();
  check_same_dim(dim_, p.size());
  coords_.insert(coords_.end(), p.begin(), p.end());
}

Envelope PointSet::bounds() const {
  Envelope e = Envelope::empty(dim_);
  for (std::size_t i = 0; i < size(); ++i) e.extend((*this)[i]);
  return e;
}

}  // namespace rsgrove
