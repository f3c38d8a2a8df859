#pragma once

/**
 * @file tropical.hpp
 * @brief Max-plus (tropical) scalars, vectors and square matrices.
 *
 * In the max-plus semiring
 *   a (+) b = max(a, b)      identity: -inf
 *   a (x) b = a + b          identity: 0
 * and -inf is absorbing for (x).
 */

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace mpgrowth::tropical {

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct TropicalScalar {
  double value = neg_infinity_value;

  static constexpr double neg_infinity_value = -std::numeric_limits<double>::infinity();

  constexpr TropicalScalar() = default;
  constexpr TropicalScalar(double v) : value(v) {}  // NOLINT(google-explicit-constructor)

  static constexpr TropicalScalar zero() { return TropicalScalar{}; }   // (+)-identity
  static constexpr TropicalScalar unit() { return TropicalScalar{0.0}; }  // (x)-identity

  constexpr bool is_neg_infinity() const { return value == neg_infinity_value; }

  constexpr bool operator==(const TropicalScalar&) const = default;
};

inline constexpr TropicalScalar NEG_INFINITY{};

constexpr TropicalScalar oplus(TropicalScalar a, TropicalScalar b) {
  return a.value < b.value ? b : a;
}

constexpr TropicalScalar otimes(TropicalScalar a, TropicalScalar b) {
  if (a.is_neg_infinity() || b.is_neg_infinity()) return NEG_INFINITY;
  return TropicalScalar{a.value + b.value};
}

class TropicalVector {
 public:
  explicit TropicalVector(std::size_t n) : entries_(n) {
    if (n == 0) throw DimensionError("tropical vector dimension must be >= 1");
  }
  TropicalVector(std::initializer_list<TropicalScalar> init) : entries_(init) {
    if (entries_.empty()) throw DimensionError("tropical vector dimension must be >= 1");
  }

  std::size_t size() const { return entries_.size(); }
  TropicalScalar& operator[](std::size_t i) { return entries_[i]; }
  const TropicalScalar& operator[](std::size_t i) const { return entries_[i]; }

  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  bool operator==(const TropicalVector&) const = default;

 private:
  std::vector<TropicalScalar> entries_;
};

/// Square n x n matrix, row-major.
class TropicalMatrix {
 public:
  explicit TropicalMatrix(std::size_t n) : n_(n), entries_(n * n) {
    if (n == 0) throw DimensionError("tropical matrix dimension must be >= 1");
  }
  TropicalMatrix(std::initializer_list<std::initializer_list<TropicalScalar>> rows)
      : n_(rows.size()) {
    if (n_ == 0) throw DimensionError("tropical matrix dimension must be >= 1");
    entries_.reserve(n_ * n_);
    for (const auto& row : rows) {
      if (row.size() != n_) throw DimensionError("tropical matrix must be square");
      entries_.insert(entries_.end(), row.begin(), row.end());
    }
  }

  /// Max-plus identity: 0 on the diagonal, -inf elsewhere.
  static TropicalMatrix identity(std::size_t n) {
    TropicalMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = TropicalScalar::unit();
    return m;
  }

  /// diag(d_0, ..., d_{n-1}) with `off` in every off-diagonal slot.
  static TropicalMatrix diagonal(const std::vector<double>& d, TropicalScalar off) {
    TropicalMatrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i)
      for (std::size_t j = 0; j < d.size(); ++j) m(i, j) = i == j ? TropicalScalar{d[i]} : off;
    return m;
  }

  std::size_t size() const { return n_; }
  TropicalScalar& operator()(std::size_t i, std::size_t j) { return entries_[i * n_ + j]; }
  const TropicalScalar& operator()(std::size_t i, std::size_t j) const {
    return entries_[i * n_ + j];
  }

  bool operator==(const TropicalMatrix&) const = default;

 private:
  std::size_t n_;
  std::vector<TropicalScalar> entries_;
};

/// result_i = max_j (A_ij + z_j)
inline TropicalVector tmul(const TropicalMatrix& a, const TropicalVector& z) {
  if (a.size() != z.size()) {
    throw DimensionError("tmul: matrix is " + std::to_string(a.size()) + "x" +
                         std::to_string(a.size()) + " but vector has dimension " +
                         std::to_string(z.size()));
  }
  TropicalVector out(z.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    TropicalScalar acc = NEG_INFINITY;
    for (std::size_t j = 0; j < a.size(); ++j) acc = oplus(acc, otimes(a(i, j), z[j]));
    out[i] = acc;
  }
  return out;
}

inline TropicalMatrix tmul(const TropicalMatrix& a, const TropicalMatrix& b) {
  if (a.size() != b.size()) throw DimensionError("tmul: matrix dimensions differ");
  const std::size_t n = a.size();
  TropicalMatrix out(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      TropicalScalar acc = NEG_INFINITY;
      for (std::size_t k = 0; k < n; ++k) acc = oplus(acc, otimes(a(i, k), b(k, j)));
      out(i, j) = acc;
    }
  return out;
}

/// Idempotent norm: the largest entry.
inline TropicalScalar tnorm(const TropicalVector& z) {
  TropicalScalar acc = NEG_INFINITY;
  for (const auto& e : z) acc = oplus(acc, e);
  return acc;
}

}  // namespace mpgrowth::tropical
