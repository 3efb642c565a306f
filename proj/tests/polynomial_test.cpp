#include "copkit/polynomial.hpp"

#include <gtest/gtest.h>

#include <random>

namespace copkit {
namespace {

RatMat random_matrix(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> d(-5, 5);
  RatMat m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
        Rational q(d(rng), 1 + (d(rng) + 5) % 3);
        q.canonicalize();
        m.set(i, j, q);
      }
  return m;
}

TEST(PolynomialTest, ExponentEnumerationCounts) {
  EXPECT_EQ(exponents_of_degree(3, 2).size(), 6u);
  EXPECT_EQ(exponents_of_degree(5, 4).size(), 70u);
  EXPECT_EQ(exponents_up_to_degree(2, 3).size(), 10u);
  auto e = exponents_of_degree(2, 2);
  // Ascending grlex: x2^2 < x1 x2 < x1^2.
  EXPECT_EQ(e.front(), Exponent({0, 2}));
  EXPECT_EQ(e.back(), Exponent({2, 0}));
}

TEST(PolynomialTest, ArithmeticDropsZeros) {
  Polynomial x = Polynomial::variable(2, 0), y = Polynomial::variable(2, 1);
  Polynomial p = (x + y) * (x - y);
  EXPECT_EQ(p.term_count(), 2u);
  EXPECT_EQ(p.coefficient(Exponent({1, 1})), 0);
  EXPECT_EQ(p - p, Polynomial(2));
  EXPECT_EQ(to_string(p), "x1^2 - x2^2");
  EXPECT_EQ(poly_pow(x + y, 0), Polynomial::constant(2, 1));
  EXPECT_EQ(poly_pow(x + y, 3).coefficient(Exponent({2, 1})), 3);
}

TEST(PolynomialTest, PolyaClosedFormMatchesConvolution) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 30; ++t) {
    std::size_t n = 2 + t % 4;
    unsigned r = t % 4;
    RatMat m = random_matrix(rng, n);
    EXPECT_EQ(polya_expand(m, r, PolyaMode::ClosedForm), polya_expand(m, r, PolyaMode::Convolution));
  }
}

TEST(PolynomialTest, EvaluationAgrees) {
  std::mt19937_64 rng(23);
  RatMat m = random_matrix(rng, 3);
  Polynomial p = polya_expand(m, 2);
  std::vector<Rational> x{Rational(1, 2), Rational(-2), Rational(3, 7)};
  Rational s = x[0] + x[1] + x[2];
  EXPECT_EQ(poly_eval(p, std::span<const Rational>(x)), s * s * m.quadratic(std::span<const Rational>(x)));
  std::vector<double> xd{0.5, -2, 3.0 / 7};
  EXPECT_NEAR(poly_eval(p, std::span<const double>(xd)), Rational(s * s * m.quadratic(std::span<const Rational>(x))).get_d(),
              1e-12);
}

TEST(PolynomialTest, SubstituteSquaresAndParity) {
  Polynomial q = quad_form(RatMat::from_rows({{1, -1}, {-1, 1}}));
  Polynomial s = substitute_squares(q);
  EXPECT_EQ(s.coefficient(Exponent({2, 2})), -2);
  EXPECT_EQ(Exponent({1, 2, 3}).parity_mask(), 0b101u);
}

TEST(PolynomialTest, MismatchedVariablesThrow) {
  EXPECT_THROW(Polynomial(2) + Polynomial(3), std::invalid_argument);
  EXPECT_THROW(polya_coefficient(RatMat::identity(2), Exponent({1, 1}), 1), std::invalid_argument);
}

}  // namespace
}  // namespace copkit
