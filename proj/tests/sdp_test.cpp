#include "copkit/sdp.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "sdp_gen.hpp"

namespace copkit {
namespace {

TEST(SdpTest, PlantedOptimaAreRecovered) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    auto planted = testing::planted_sdp(seed);
    SdpSolution s = solve(planted.problem);
    ASSERT_EQ(s.status, SdpStatus::Optimal) << "seed " << seed << " " << s.message;
    EXPECT_NEAR(s.objective, planted.optimum, 1e-6 * (1 + std::abs(planted.optimum))) << "seed " << seed;
    Residuals r = residuals(planted.problem, s);
    EXPECT_LE(r.primal, 1e-7);
    EXPECT_LE(r.dual, 1e-7);
    EXPECT_LE(r.gap, 1e-7);
  }
}

TEST(SdpTest, Deterministic) {
  auto planted = testing::planted_sdp(99);
  SdpSolution a = solve(planted.problem), b = solve(planted.problem);
  EXPECT_EQ(a.objective, b.objective);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(SdpTest, MaxEigenvalueByTrace) {
  // max <C, X> s.t. tr X = 1 equals the largest eigenvalue of C.
  SdpProblem p;
  p.add_block(3);
  LinearFunctional tr;
  for (std::size_t i = 0; i < 3; ++i) tr.blocks.push_back({0, i, i, 1});
  p.add_constraint(tr, 1);
  LinearFunctional c;
  c.blocks = {{0, 0, 0, 2}, {0, 1, 1, 2}, {0, 2, 2, 2}, {0, 0, 1, 2}, {0, 1, 2, 2}};
  p.set_objective(c, Sense::Maximize);
  SdpSolution s = solve(p);
  ASSERT_EQ(s.status, SdpStatus::Optimal);
  EXPECT_NEAR(s.objective, 2 + std::sqrt(2.0), 1e-7);
}

TEST(SdpTest, DuplicateRowsArePresolved) {
  SdpProblem p;
  p.add_block(2);
  p.add_nonneg(1);
  LinearFunctional f;
  f.blocks = {{0, 0, 0, 1}, {0, 1, 1, 1}};
  f.nonneg = {{0, 1}};
  p.add_constraint(f, 2);
  p.add_constraint(f, 2);
  LinearFunctional g = f;
  for (auto& t : g.blocks) t.coef *= 2;
  g.nonneg[0].coef *= 2;
  p.add_constraint(g, 4);
  LinearFunctional obj;
  obj.blocks = {{0, 0, 0, 1}, {0, 1, 1, 3}};
  obj.nonneg = {{0, 2}};
  p.set_objective(obj, Sense::Minimize);
  SdpSolution s = solve(p);
  ASSERT_EQ(s.status, SdpStatus::Optimal);
  EXPECT_EQ(s.dropped_rows, 2u);
  EXPECT_NEAR(s.objective, 2, 1e-7);
  EXPECT_NEAR(s.blocks[0](0, 0), 2, 1e-6);
}

TEST(SdpTest, InconsistentRowsAreReported) {
  SdpProblem p;
  p.add_nonneg(2);
  LinearFunctional f;
  f.nonneg = {{0, 1}, {1, 1}};
  p.add_constraint(f, 1);
  p.add_constraint(f, 2);
  p.set_objective(f, Sense::Minimize);
  EXPECT_EQ(solve(p).status, SdpStatus::Inconsistent);
}

TEST(SdpTest, InfeasibleDoesNotClaimOptimal) {
  // X PSD with X_00 = -1.
  SdpProblem p;
  p.add_block(2);
  LinearFunctional f;
  f.blocks = {{0, 0, 0, 1}};
  p.add_constraint(f, -1);
  p.set_objective(LinearFunctional{}, Sense::Minimize);
  EXPECT_NE(solve(p).status, SdpStatus::Optimal);
}

TEST(SdpTest, ValidateRejectsBadIndices) {
  SdpProblem p;
  p.add_block(2);
  LinearFunctional f;
  f.blocks = {{0, 0, 2, 1}};
  p.add_constraint(f, 1);
  EXPECT_THROW(solve(p), std::invalid_argument);
  EXPECT_THROW(p.add_block(0), std::invalid_argument);
}

TEST(SdpTest, MarginSignsDecideFeasibility) {
  // G PSD with G_00 = 1, G_11 = 1, G_01 = t: margin 1 - |t|.
  for (double t : {0.0, 0.5, 1.0, 1.5}) {
    SdpProblem p;
    p.add_block(2);
    LinearFunctional a, b, c;
    a.blocks = {{0, 0, 0, 1}};
    b.blocks = {{0, 1, 1, 1}};
    c.blocks = {{0, 0, 1, 1}};
    p.add_constraint(a, 1);
    p.add_constraint(b, 1);
    p.add_constraint(c, t);
    MarginResult m = margin_maximize(p);
    ASSERT_EQ(m.solution.status, SdpStatus::Optimal) << t;
    EXPECT_NEAR(m.margin, 1 - t, 1e-7) << t;
    EXPECT_NEAR(m.solution.blocks[0](0, 0), 1, 1e-7);
    EXPECT_NEAR(m.solution.blocks[0](0, 1), t, 1e-7);
  }
}

TEST(SdpTest, DumpListsEveryRow) {
  auto planted = testing::planted_sdp(4);
  std::ostringstream os;
  planted.problem.dump(os);
  std::size_t lines = 0;
  for (char ch : os.str()) lines += ch == '\n';
  EXPECT_EQ(lines, planted.problem.constraint_count() + 2);
}

}  // namespace
}  // namespace copkit
