#include "copkit/catalog.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "copkit/cones.hpp"
#include "copkit/copositivity.hpp"
#include "copkit/graphs.hpp"

namespace copkit {
namespace {

TPsiParams uniform_psi(double v) {
  TPsiParams p;
  p.psi.fill(v);
  return p;
}

TEST(CatalogTest, Horn) {
  RatMat h = horn();
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(h(i, i), 1);
  EXPECT_EQ(horn_scaled(1), h);
  EXPECT_EQ(h, graph_matrix(cycle_graph(5)));
}

TEST(CatalogTest, ScaledHornStrictlyInsideButNotSpn) {
  RatMat h = horn_scaled(Rational(11, 10));
  EXPECT_EQ(h(0, 0), Rational(11, 10));
  EXPECT_EQ(h(0, 2), -1);
  EXPECT_EQ(copositivity_class(h).cls, CopositivityClass::StrictlyCopositive);
  EXPECT_EQ(spn_membership(h).decision, Decision::No);
}

TEST(CatalogTest, TPsi) {
  const TPsiParams p = uniform_psi(std::numbers::pi / 10);
  FloatMat t = t_psi(p);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(t(i, i), 1.0);
  auto zeros = t_psi_zeros(p);
  for (const auto& v : zeros) EXPECT_LE(std::abs(t.quadratic(std::span<const double>(v))), 1e-10);
  // u_1 proportional to (sin psi_5, sin(psi_4 + psi_5), sin psi_4, 0, 0).
  const double s = std::sin(std::numbers::pi / 10), s2 = std::sin(std::numbers::pi / 5);
  EXPECT_NEAR(zeros[0][1] / zeros[0][0], s2 / s, 1e-12);
  EXPECT_NEAR(zeros[0][2] / zeros[0][0], 1.0, 1e-12);
  EXPECT_EQ(zeros[0][3], 0.0);
  EXPECT_THROW(t_psi(uniform_psi(1.0)), std::invalid_argument);
  EXPECT_THROW(t_psi(uniform_psi(0.0)), std::invalid_argument);
}

TEST(CatalogTest, Motzkin) {
  std::vector<Rational> one{1, 1};
  EXPECT_EQ(poly_eval(motzkin_poly(), std::span<const Rational>(one)), 0);
  EXPECT_TRUE(motzkin_form().is_homogeneous());
  EXPECT_EQ(motzkin_form().degree(), 6);
  EXPECT_EQ(motzkin_q().nvars(), 4u);
  EXPECT_EQ(motzkin_q().degree(), 12);
}

TEST(CatalogTest, BlockExamples) {
  auto ex = block_examples();
  ASSERT_EQ(ex[0].name, "horn_plus_zero");
  EXPECT_EQ(ex[0].matrix.size(), 6u);
  std::vector<std::size_t> lead{0, 1, 2, 3, 4};
  EXPECT_EQ(principal_submatrix(ex[0].matrix, std::span<const std::size_t>(lead)), horn());
  EXPECT_EQ(ex[1].matrix.size(), 7u);
  EXPECT_EQ(matrix_m(), RatMat::from_rows({{0, 1, 0}, {1, 0, 0}, {0, 0, 0}}));
  RatMat pad = padding_block(3);
  EXPECT_EQ(pad(0, 0), 1);
  EXPECT_EQ(pad(0, 1), Rational(-1, 2));
  std::vector<Rational> e{1, 1, 1};
  EXPECT_EQ(pad.quadratic(std::span<const Rational>(e)), 0);
  for (const auto& m : ex)
    if (m.name != "matrix_m")
      for (std::size_t i = 0; i < m.matrix.size(); ++i)
        EXPECT_TRUE(m.matrix(i, i) == 0 || m.matrix(i, i) == 1) << m.name;
}

TEST(CatalogTest, HornIdentity) {
  EXPECT_TRUE(verify_horn_identity().pass);
  EXPECT_FALSE(verify_horn_identity(horn(), {4, 4, 5, 4, 4}).pass);
  EXPECT_FALSE(verify_horn_identity(horn_scaled(Rational(11, 10)), {4, 4, 4, 4, 4}).pass);
}

TEST(CatalogTest, MotzkinCertificate) {
  EXPECT_TRUE(verify_motzkin_certificate().pass);
  EXPECT_FALSE(verify_motzkin_certificate(true).pass);
  IdentitySides s = motzkin_certificate_sides();
  std::vector<Rational> pt{2, 3};
  EXPECT_EQ(poly_eval(s.lhs, std::span<const Rational>(pt)), poly_eval(s.rhs, std::span<const Rational>(pt)));
  // Independent arithmetic: (4+9)^2 * (16*9 + 4*81 - 3*36 + 1).
  EXPECT_EQ(poly_eval(s.lhs, std::span<const Rational>(pt)), Rational(169 * 361));
}

TEST(CatalogTest, Lookup) {
  EXPECT_EQ(*catalog_lookup("horn").exact, horn());
  EXPECT_EQ(*catalog_lookup("horn_scaled:11/10").exact, horn_scaled(Rational(11, 10)));
  EXPECT_EQ(catalog_lookup("tpsi:0.314,0.314,0.314,0.314,0.314").numeric->size(), 5u);
  EXPECT_EQ(*catalog_lookup("matrix_m").exact, matrix_m());
  EXPECT_EQ(catalog_lookup("horn_plus_zero").exact->size(), 6u);
  EXPECT_EQ(*catalog_lookup("motzkin").polynomial, motzkin_form());
  EXPECT_THROW(catalog_lookup("hornn"), std::invalid_argument);
  EXPECT_THROW(catalog_lookup("horn:2"), std::invalid_argument);
  EXPECT_THROW(catalog_lookup("tpsi:1,2"), std::invalid_argument);
  EXPECT_THROW(catalog_lookup("tpsi:1,1,1,1,1"), std::invalid_argument);
}

// Properties.

TEST(CatalogProperty, MotzkinNonnegativeOnGrid) {
  const Polynomial h = motzkin_poly();
  double worst = 1;
  for (int a = 0; a <= 200; ++a)
    for (int b = 0; b <= 200; ++b) {
      std::vector<double> pt{-5 + a * 0.05, -5 + b * 0.05};
      worst = std::min(worst, poly_eval(h, std::span<const double>(pt)));
    }
  EXPECT_GE(worst, -1e-9);
}

TEST(CatalogProperty, MotzkinNotSos) {
  Verdict v = sos_membership(motzkin_form());
  EXPECT_EQ(v.decision, Decision::No);
  EXPECT_LT(v.margin, -1e-7);
}

TEST(CatalogProperty, QNotSosAtLowOrders) {
  const Polynomial q = motzkin_q();
  Polynomial s = Polynomial::constant(4, 1);
  for (unsigned r = 0; r <= 1; ++r) {
    Verdict v = sos_membership(s * q);
    EXPECT_EQ(v.decision, Decision::No) << "r=" << r << " margin " << v.margin;
    s = s * Polynomial::square_sum(4);
  }
}

TEST(CatalogProperty, TPsiZerosOnRandomSamples) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int t = 0; t < 25; ++t) {
    TPsiParams p;
    double total = 0;
    for (auto& v : p.psi) total += (v = u(rng));
    const double scale = u(rng) * std::numbers::pi / total * 0.99;
    for (auto& v : p.psi) v *= scale;
    ASSERT_TRUE(p.valid());
    FloatMat m = t_psi(p);
    for (const auto& z : t_psi_zeros(p)) EXPECT_LE(std::abs(m.quadratic(std::span<const double>(z))), 1e-10);
    EXPECT_EQ(copositivity_class_numeric(m, 1e-9), CopositivityClass::Boundary);
  }
}

}  // namespace
}  // namespace copkit
