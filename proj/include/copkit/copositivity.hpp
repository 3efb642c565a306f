#pragma once

// Exact copositivity for small matrices: the minimum of x^T M x over the
// standard simplex by support enumeration, the zero set of a copositive
// form, and the strict complementarity check at its zeros. A floating-point
// variant covers matrices with irrational entries.

#include <optional>
#include <string>
#include <vector>

#include "copkit/symmat.hpp"

namespace copkit {

/// Largest order accepted by the enumerations (2^n - 1 supports).
inline constexpr std::size_t kSimplexCap = 20;

struct SimplexPoint {
  std::vector<Rational> x;
  std::vector<std::size_t> support;
};

/// A face of the simplex whose relative interior contains a positive-
/// dimensional set of zeros.
struct ZeroFamily {
  std::vector<std::size_t> support;
  std::size_t dimension = 0;
};

/// With infinitely many zeros, `finite_zeros` lists the zeros of minimal
/// support (the vertices of the zero polytopes).
struct ZeroSet {
  std::vector<SimplexPoint> finite_zeros;
  std::vector<ZeroFamily> infinite_families;
  bool is_finite = true;
};

struct SimplexMinimum {
  Rational value;
  SimplexPoint witness;
  /// The minimizer set, as the zero set of M - value * J.
  ZeroSet minimizers;
};

SimplexMinimum simplex_minimize(const RatMat& m);

enum class CopositivityClass { StrictlyCopositive, Boundary, NotCopositive };
std::string to_string(CopositivityClass c);

struct ClassReport {
  CopositivityClass cls = CopositivityClass::StrictlyCopositive;
  Rational min_value;
  /// A minimizer for boundary and non-copositive matrices.
  std::optional<SimplexPoint> witness;
};

ClassReport copositivity_class(const RatMat& m);

/// All zeros of x^T M x in the simplex; requires M to be on the boundary.
ZeroSet zeros_in_simplex(const RatMat& m);

struct SccEntry {
  SimplexPoint zero;
  bool holds = false;
  std::vector<Rational> mu;  // (M u)_i for i off the support, in index order
};

/// Requires a finite zero set.
std::vector<SccEntry> check_scc(const RatMat& m);

struct ConsistencyReport {
  bool pass = false;
  std::string message;
};

/// For an Spn certificate P of M and a zero x: P x = 0 and P[S] = M[S] on
/// S = Supp(x). Fails when the premises themselves fail.
ConsistencyReport k0_zero_consistency(const RatMat& m, const RatMat& p, const std::vector<Rational>& x);
ConsistencyReport k0_zero_consistency(const FloatMat& m, const FloatMat& p, const std::vector<double>& x,
                                      double tol = 1e-9);

// Floating-point path, labeled numeric in reports.

struct NumericPoint {
  std::vector<double> x;
  std::vector<std::size_t> support;
};

struct NumericZeroSet {
  std::vector<NumericPoint> finite_zeros;
  std::vector<ZeroFamily> infinite_families;
  bool is_finite = true;
};

struct NumericMinimum {
  double value = 0;
  NumericPoint witness;
};

NumericMinimum simplex_minimize_numeric(const FloatMat& m, double tol = 1e-10);
CopositivityClass copositivity_class_numeric(const FloatMat& m, double tol = 1e-10);
NumericZeroSet zeros_in_simplex_numeric(const FloatMat& m, double tol = 1e-10);

struct NumericSccEntry {
  NumericPoint zero;
  bool holds = false;
  double min_off_support = 0;  // smallest (M u)_i off the support
};

/// SCC at a given zero: (M u)_i > threshold for every i off the support.
NumericSccEntry scc_at(const FloatMat& m, const std::vector<double>& u, double threshold = 1e-8,
                       double support_tol = 1e-12);
std::vector<NumericSccEntry> check_scc_numeric(const FloatMat& m, double tol = 1e-10, double threshold = 1e-8);

}  // namespace copkit
