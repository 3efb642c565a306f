#pragma once

// Dense symmetric matrices over exact rationals or binary64, stored as the
// packed lower triangle so symmetry holds by construction.

#include <algorithm>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "copkit/rational.hpp"

namespace copkit {

template <class T>
class SymMat {
 public:
  using value_type = T;

  SymMat() = default;
  explicit SymMat(std::size_t n) : n_(n), data_(n * (n + 1) / 2, T(0)) {}

  /// Builds from a full row-major table; throws if it is not square or not
  /// symmetric.
  static SymMat from_rows(const std::vector<std::vector<T>>& rows) {
    SymMat m(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows.size()) throw std::invalid_argument("matrix rows must be square");
      for (std::size_t j = 0; j <= i; ++j) {
        if (!(rows[i][j] == rows[j][i])) throw std::invalid_argument("matrix is not symmetric");
        m.set(i, j, rows[i][j]);
      }
    }
    return m;
  }

  static SymMat identity(std::size_t n) {
    SymMat m(n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, T(1));
    return m;
  }

  static SymMat ones(std::size_t n) {
    SymMat m(n);
    for (auto& v : m.data_) v = T(1);
    return m;
  }

  std::size_t size() const { return n_; }

  const T& operator()(std::size_t i, std::size_t j) const { return data_[index(i, j)]; }
  T& at(std::size_t i, std::size_t j) { return data_[index(i, j)]; }
  void set(std::size_t i, std::size_t j, const T& v) { data_[index(i, j)] = v; }

  std::span<const T> packed() const { return data_; }

  SymMat& operator+=(const SymMat& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  SymMat& operator-=(const SymMat& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  SymMat& operator*=(const T& s) {
    for (auto& v : data_) v *= s;
    return *this;
  }
  friend SymMat operator+(SymMat a, const SymMat& b) { return a += b; }
  friend SymMat operator-(SymMat a, const SymMat& b) { return a -= b; }
  friend SymMat operator*(const T& s, SymMat a) { return a *= s; }

  friend bool operator==(const SymMat& a, const SymMat& b) {
    if (a.n_ != b.n_) return false;
    for (std::size_t k = 0; k < a.data_.size(); ++k)
      if (!(a.data_[k] == b.data_[k])) return false;
    return true;
  }

  /// x^T M x.
  template <class V>
  T quadratic(std::span<const V> x) const {
    if (x.size() != n_) throw std::invalid_argument("vector length does not match matrix order");
    T acc(0);
    for (std::size_t i = 0; i < n_; ++i) {
      T row(0);
      for (std::size_t j = 0; j < i; ++j) row += (*this)(i, j) * T(x[j]);
      acc += T(x[i]) * (T(2) * row + (*this)(i, i) * T(x[i]));
    }
    return acc;
  }

  /// M x.
  template <class V>
  std::vector<T> apply(std::span<const V> x) const {
    if (x.size() != n_) throw std::invalid_argument("vector length does not match matrix order");
    std::vector<T> out(n_, T(0));
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) out[i] += (*this)(i, j) * T(x[j]);
    return out;
  }

 private:
  std::size_t index(std::size_t i, std::size_t j) const {
    if (i >= n_ || j >= n_) throw std::out_of_range("matrix index out of range");
    if (i < j) std::swap(i, j);
    return i * (i + 1) / 2 + j;
  }
  void check_same(const SymMat& o) const {
    if (o.n_ != n_) throw std::invalid_argument("matrix order mismatch");
  }

  std::size_t n_ = 0;
  std::vector<T> data_;
};

using RatMat = SymMat<Rational>;
using FloatMat = SymMat<double>;

FloatMat to_float(const RatMat& m);
RatMat to_rational(const FloatMat& m);

/// Exact LDL^T result. On success `pivots` lists the elimination order and
/// `diag` the pivot values (all >= 0); on failure `witness` satisfies
/// witness^T M witness < 0 exactly.
struct PsdCheck {
  bool psd = false;
  std::vector<std::size_t> pivots;
  std::vector<Rational> diag;
  std::vector<Rational> witness;
  std::size_t rank = 0;
};

PsdCheck psd_check_exact(const RatMat& m);

/// Raised when an iterative numeric kernel fails to converge.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// All eigenvalues (ascending) by cyclic Jacobi rotations, iterated until the
/// off-diagonal Frobenius norm is at most tol.
std::vector<double> jacobi_eigenvalues(const FloatMat& m, double tol, int max_sweeps = 100);

double min_eig_estimate(const FloatMat& m, double tol);

template <class T>
SymMat<T> principal_submatrix(const SymMat<T>& m, std::span<const std::size_t> rows) {
  if (rows.empty()) throw std::invalid_argument("principal submatrix needs a nonempty index set");
  std::vector<std::size_t> s(rows.begin(), rows.end());
  std::sort(s.begin(), s.end());
  if (std::adjacent_find(s.begin(), s.end()) != s.end())
    throw std::invalid_argument("duplicate index in principal submatrix");
  if (s.back() >= m.size()) throw std::out_of_range("principal submatrix index out of range");
  SymMat<T> out(s.size());
  for (std::size_t a = 0; a < s.size(); ++a)
    for (std::size_t b = 0; b <= a; ++b) out.set(a, b, m(s[a], s[b]));
  return out;
}

bool entrywise_nonneg(const RatMat& m);
bool entrywise_nonneg(const FloatMat& m, double tol);

/// Block-diagonal direct sum.
RatMat direct_sum(const RatMat& a, const RatMat& b);

/// Text format: first line "n", then n whitespace-separated rows whose
/// entries are integers, decimals, or "p/q". '#' starts a comment.
RatMat parse_matrix(std::string_view text);
RatMat read_matrix_file(const std::string& path);
std::string format_matrix(const RatMat& m);
std::string format_matrix(const FloatMat& m, int precision = 12);

}  // namespace copkit
