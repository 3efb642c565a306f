#pragma once

// Sparse multivariate polynomials with exact rational coefficients.
//
// Terms live in an ordered map under graded lexicographic order, so two
// polynomials are equal exactly when their term maps compare equal. Zero
// coefficients are never stored.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "copkit/rational.hpp"
#include "copkit/symmat.hpp"

namespace copkit {

class Exponent {
 public:
  Exponent() = default;
  explicit Exponent(std::size_t nvars) : e_(nvars, 0) {}
  Exponent(std::initializer_list<unsigned> e);
  explicit Exponent(std::vector<unsigned> e);

  static Exponent unit(std::size_t nvars, std::size_t i);

  std::size_t size() const { return e_.size(); }
  unsigned degree() const { return degree_; }
  unsigned operator[](std::size_t i) const { return e_[i]; }
  const std::vector<unsigned>& entries() const { return e_; }

  void set(std::size_t i, unsigned v);

  Exponent operator+(const Exponent& o) const;
  /// Entrywise doubling: the exponent of m(x°2) for the monomial m.
  Exponent doubled() const;
  /// Parity pattern (entries mod 2) packed into a bit mask.
  std::uint64_t parity_mask() const;

  friend bool operator==(const Exponent& a, const Exponent& b) { return a.e_ == b.e_; }
  friend bool operator!=(const Exponent& a, const Exponent& b) { return a.e_ != b.e_; }

 private:
  std::vector<unsigned> e_;
  unsigned degree_ = 0;
};

/// Graded lexicographic order: lower total degree first, ties broken so that
/// x1 > x2 > ... (x1^2 sorts after x1*x2).
struct GrlexLess {
  bool operator()(const Exponent& a, const Exponent& b) const;
};

/// All exponents in nvars variables with total degree exactly d, grlex order.
std::vector<Exponent> exponents_of_degree(std::size_t nvars, unsigned d);
/// All exponents with total degree at most d.
std::vector<Exponent> exponents_up_to_degree(std::size_t nvars, unsigned d);

class Polynomial {
 public:
  using TermMap = std::map<Exponent, Rational, GrlexLess>;

  Polynomial() = default;
  explicit Polynomial(std::size_t nvars) : nvars_(nvars) {}

  static Polynomial constant(std::size_t nvars, const Rational& c);
  static Polynomial monomial(const Exponent& e, const Rational& c = 1);
  static Polynomial variable(std::size_t nvars, std::size_t i);
  /// x1 + ... + xn.
  static Polynomial linear_sum(std::size_t nvars);
  /// x1^2 + ... + xn^2.
  static Polynomial square_sum(std::size_t nvars);

  std::size_t nvars() const { return nvars_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }

  /// Total degree; -1 for the zero polynomial.
  int degree() const;
  bool is_homogeneous() const;

  Rational coefficient(const Exponent& e) const;
  void add_term(const Exponent& e, const Rational& c);

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(const Rational& s);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Rational& s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }

  /// Largest absolute coefficient (0 for the zero polynomial).
  Rational max_abs_coefficient() const;

 private:
  void check_vars(const Polynomial& o) const;

  std::size_t nvars_ = 0;
  TermMap terms_;
};

Polynomial poly_mul(const Polynomial& a, const Polynomial& b);
Polynomial poly_pow(const Polynomial& a, unsigned r);

/// x^T M x as a polynomial: M_ii on x_i^2 and 2 M_ij on x_i x_j.
Polynomial quad_form(const RatMat& m);

/// p(x°2): every exponent doubled.
Polynomial substitute_squares(const Polynomial& p);

enum class PolyaMode { ClosedForm, Convolution };

/// (x1 + ... + xn)^r * x^T M x.
Polynomial polya_expand(const RatMat& m, unsigned r, PolyaMode mode = PolyaMode::ClosedForm);

/// Coefficient of x^beta (|beta| = r + 2) in (sum x)^r x^T M x, from the
/// closed form r! (beta^T M beta - sum_i M_ii beta_i) / prod_i beta_i!.
Rational polya_coefficient(const RatMat& m, const Exponent& beta, unsigned r);

Rational poly_eval(const Polynomial& p, std::span<const Rational> x);
double poly_eval(const Polynomial& p, std::span<const double> x);

/// "c x1^a1 x2^a2 ..." terms joined by " + " / " - ", highest degree first.
std::string to_string(const Polynomial& p);

}  // namespace copkit
