#include "copkit/symmat.hpp"

#include <gtest/gtest.h>

#include <random>

namespace copkit {
namespace {

RatMat random_gram(std::mt19937_64& rng, std::size_t n, std::size_t rank) {
  std::uniform_int_distribution<int> d(-3, 3);
  std::vector<std::vector<Rational>> v(rank, std::vector<Rational>(n));
  for (auto& row : v)
    for (auto& x : row) x = d(rng);
  RatMat m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      Rational s = 0;
      for (const auto& row : v) s += row[i] * row[j];
      m.set(i, j, s);
    }
  return m;
}

TEST(SymMatTest, FromRowsRejectsAsymmetric) {
  EXPECT_THROW(RatMat::from_rows({{1, 2}, {3, 1}}), std::invalid_argument);
  EXPECT_THROW(RatMat::from_rows({{1, 2}}), std::invalid_argument);
}

TEST(SymMatTest, QuadraticAndApply) {
  RatMat m = RatMat::from_rows({{2, -1}, {-1, 3}});
  std::vector<Rational> x{1, 2};
  EXPECT_EQ(m.quadratic(std::span<const Rational>(x)), Rational(2 - 4 + 12));
  auto y = m.apply(std::span<const Rational>(x));
  EXPECT_EQ(y[0], 0);
  EXPECT_EQ(y[1], 5);
}

TEST(SymMatTest, PsdCheckAcceptsGramMatrices) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    std::size_t n = 1 + t % 7, r = 1 + t % 4;
    RatMat m = random_gram(rng, n, r);
    auto c = psd_check_exact(m);
    EXPECT_TRUE(c.psd);
    EXPECT_LE(c.rank, std::min(n, r));
  }
}

TEST(SymMatTest, PsdCheckWitnessIsNegative) {
  std::mt19937_64 rng(5);
  int rejected = 0;
  for (int t = 0; t < 100; ++t) {
    std::size_t n = 2 + t % 6;
    RatMat m = random_gram(rng, n, 2);
    // Perturb a random entry; the result is usually indefinite.
    std::uniform_int_distribution<std::size_t> idx(0, n - 1);
    std::size_t i = idx(rng), j = idx(rng);
    m.at(i, j) -= 5;
    auto c = psd_check_exact(m);
    double me = min_eig_estimate(to_float(m), 1e-12);
    if (!c.psd) {
      ++rejected;
      EXPECT_LT(m.quadratic(std::span<const Rational>(c.witness)), 0);
      EXPECT_LT(me, 1e-9);
    } else {
      EXPECT_GT(me, -1e-9);
    }
  }
  EXPECT_GT(rejected, 50);
}

TEST(SymMatTest, PsdCheckZeroDiagonalWitness) {
  RatMat m = RatMat::from_rows({{0, 1}, {1, 0}});
  auto c = psd_check_exact(m);
  ASSERT_FALSE(c.psd);
  EXPECT_LT(m.quadratic(std::span<const Rational>(c.witness)), 0);
  RatMat z(3);
  EXPECT_TRUE(psd_check_exact(z).psd);
}

TEST(SymMatTest, JacobiMatchesKnownSpectrum) {
  FloatMat m = FloatMat::from_rows({{2, 1, 0}, {1, 2, 1}, {0, 1, 2}});
  auto e = jacobi_eigenvalues(m, 1e-13);
  EXPECT_NEAR(e[0], 2 - std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(e[1], 2, 1e-12);
  EXPECT_NEAR(e[2], 2 + std::sqrt(2.0), 1e-12);
  EXPECT_THROW(jacobi_eigenvalues(m, 0), std::invalid_argument);
}

TEST(SymMatTest, PrincipalSubmatrixAndDirectSum) {
  RatMat m = RatMat::from_rows({{1, 2, 3}, {2, 4, 5}, {3, 5, 6}});
  std::vector<std::size_t> rows{2, 0};
  RatMat s = principal_submatrix(m, std::span<const std::size_t>(rows));
  EXPECT_EQ(s, RatMat::from_rows({{1, 3}, {3, 6}}));
  std::vector<std::size_t> dup{1, 1};
  EXPECT_THROW(principal_submatrix(m, std::span<const std::size_t>(dup)), std::invalid_argument);
  RatMat d = direct_sum(s, RatMat::identity(1));
  EXPECT_EQ(d.size(), 3u);
  EXPECT_EQ(d(2, 2), 1);
  EXPECT_EQ(d(2, 0), 0);
}

TEST(SymMatTest, ParseAndFormat) {
  RatMat m = parse_matrix("# comment\n2\n1 -1/2\n-0.5 3\n");
  EXPECT_EQ(m(0, 1), Rational(-1, 2));
  EXPECT_EQ(parse_matrix(format_matrix(m)), m);
  EXPECT_THROW(parse_matrix("2\n1 2 3"), std::invalid_argument);
  EXPECT_THROW(parse_matrix("2\n1 2 3 4"), std::invalid_argument);
  EXPECT_THROW(parse_matrix(""), std::invalid_argument);
}

}  // namespace
}  // namespace copkit
