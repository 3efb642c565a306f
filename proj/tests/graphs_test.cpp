#include "copkit/graphs.hpp"

#include <gtest/gtest.h>

#include <random>

namespace copkit {
namespace {

// Brute force over all vertex subsets.
std::size_t alpha_oracle(const Graph& g) {
  const std::size_t n = g.order();
  std::size_t best = 0;
  for (std::uint64_t s = 0; s < (std::uint64_t{1} << n); ++s) {
    bool stable = true;
    for (const auto& [i, j] : g.edges())
      if (((s >> i) & 1u) && ((s >> j) & 1u)) stable = false;
    if (stable) best = std::max<std::size_t>(best, static_cast<std::size_t>(std::popcount(s)));
  }
  return best;
}

Graph random_graph(std::mt19937_64& rng, std::size_t n, double p) {
  std::bernoulli_distribution coin(p);
  Graph g(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (coin(rng)) g.add_edge(i, j);
  return g;
}

std::vector<Rational> point(std::initializer_list<Rational> v) { return std::vector<Rational>(v); }

TEST(GraphTest, ParseFile) {
  Graph g = parse_graph("# five cycle\n5 5\n1 2\n2 3\n\n3 4 # chord-free\n4 5\n5 1\n");
  EXPECT_EQ(g.order(), 5u);
  EXPECT_EQ(g.size(), 5u);
  EXPECT_TRUE(g.adjacent(0, 4));
  EXPECT_THROW(parse_graph("3 1\n1 1\n"), std::invalid_argument);
  EXPECT_THROW(parse_graph("3 2\n1 2\n2 1\n"), std::invalid_argument);
  EXPECT_THROW(parse_graph("3 1\n1 4\n"), std::invalid_argument);
  EXPECT_THROW(parse_graph("3 2\n1 2\n"), std::invalid_argument);
  EXPECT_THROW(parse_graph("3 x\n"), std::invalid_argument);
}

TEST(GraphTest, Generators) {
  EXPECT_EQ(graph_from_generator("cycle:7").size(), 7u);
  EXPECT_EQ(graph_from_generator("complete:4").size(), 6u);
  EXPECT_EQ(graph_from_generator("path:4").size(), 3u);
  EXPECT_EQ(graph_from_generator("petersen").size(), 15u);
  EXPECT_THROW(graph_from_generator("wheel:5"), std::invalid_argument);
  EXPECT_THROW(graph_from_generator("cycle:"), std::invalid_argument);
  EXPECT_THROW(Graph(kGraphCap + 1), std::invalid_argument);
}

TEST(StabilityTest, Examples) {
  StableSets c5 = stability_number(cycle_graph(5));
  EXPECT_EQ(c5.alpha, 2u);
  EXPECT_EQ(c5.sets.size(), 5u);
  for (std::size_t n = 1; n <= 6; ++n) {
    StableSets k = stability_number(complete_graph(n));
    EXPECT_EQ(k.alpha, 1u);
    EXPECT_EQ(k.sets.size(), n);
  }
  Graph p = petersen_graph();
  StableSets ps = stability_number(p);
  EXPECT_EQ(ps.alpha, 4u);
  EXPECT_EQ(ps.alpha, alpha_oracle(p));
  EXPECT_EQ(ps.sets.size(), 5u);
}

TEST(CriticalEdgesTest, Examples) {
  EXPECT_EQ(critical_edges(cycle_graph(5)).size(), 5u);
  EXPECT_TRUE(critical_edges(cycle_graph(6)).empty());
  EXPECT_TRUE(critical_edges(petersen_graph()).empty());
  EXPECT_EQ(critical_edges(path_graph(2)).size(), 1u);
  GraphReport r = analyze_graph(cycle_graph(6));
  EXPECT_EQ(r.alpha, 3u);
  EXPECT_TRUE(r.acritical);
  EXPECT_EQ(r.max_stable_sets.size(), 2u);
}

TEST(GraphMatrixTest, Examples) {
  RatMat horn = RatMat::from_rows({{1, 1, -1, -1, 1},
                                   {1, 1, 1, -1, -1},
                                   {-1, 1, 1, 1, -1},
                                   {-1, -1, 1, 1, 1},
                                   {1, -1, -1, 1, 1}});
  EXPECT_EQ(graph_matrix(cycle_graph(5)), horn);
  EXPECT_EQ(graph_matrix(complete_graph(4)), RatMat(4));
  EXPECT_EQ(graph_matrix(Graph(1)), RatMat(1));
}

TEST(GraphZerosTest, FourCycle) {
  ZeroSet z = graph_matrix_zeros(cycle_graph(4));
  EXPECT_TRUE(z.is_finite);
  ASSERT_EQ(z.finite_zeros.size(), 2u);
  EXPECT_EQ(z.finite_zeros[0].x, point({Rational(1, 2), 0, Rational(1, 2), 0}));
  EXPECT_EQ(z.finite_zeros[1].x, point({0, Rational(1, 2), 0, Rational(1, 2)}));
}

TEST(GraphZerosTest, FiveCycleHasFamilies) {
  bool truncated = true;
  ZeroSet z = graph_matrix_zeros(cycle_graph(5), &truncated);
  EXPECT_FALSE(truncated);
  EXPECT_FALSE(z.is_finite);
  EXPECT_EQ(z.finite_zeros.size(), 5u);
  ASSERT_EQ(z.infinite_families.size(), 5u);
  for (const auto& f : z.infinite_families) EXPECT_EQ(f.dimension, 1u);
}

TEST(GraphZerosTest, SixCycleFinite) {
  ZeroSet z = graph_matrix_zeros(cycle_graph(6));
  EXPECT_TRUE(z.is_finite);
  EXPECT_EQ(z.finite_zeros.size(), 2u);
}

TEST(ZeroCharacterizationTest, Examples) {
  Graph c4 = cycle_graph(4);
  EXPECT_TRUE(check_zero_characterization(c4, point({Rational(1, 2), 0, Rational(1, 2), 0})).pass);
  ZeroCharacterization r = check_zero_characterization(c4, point({Rational(1, 2), Rational(1, 2), 0, 0}));
  EXPECT_FALSE(r.pass);
  EXPECT_FALSE(r.reason.empty());
  Graph c5 = cycle_graph(5);
  EXPECT_TRUE(check_zero_characterization(c5, point({Rational(1, 2), 0, Rational(1, 6), Rational(1, 3), 0})).pass);
  EXPECT_FALSE(check_zero_characterization(c5, point({Rational(1, 3), 0, Rational(1, 3), Rational(1, 3), 0})).pass);
  EXPECT_THROW(check_zero_characterization(c4, point({1, 1, 0, 0})), std::invalid_argument);
}

// Properties.

TEST(GraphProperty, StabilityMatchesOracle) {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 60; ++t) {
    Graph g = random_graph(rng, 3 + t % 10, 0.2 + 0.1 * (t % 5));
    StableSets s = stability_number(g);
    EXPECT_EQ(s.alpha, alpha_oracle(g));
    for (const auto& set : s.sets) {
      EXPECT_EQ(set.size(), s.alpha);
      for (std::size_t a = 0; a < set.size(); ++a)
        for (std::size_t b = a + 1; b < set.size(); ++b) EXPECT_FALSE(g.adjacent(set[a], set[b]));
    }
  }
}

TEST(GraphProperty, ZerosAgreeWithCopositivity) {
  std::mt19937_64 rng(32);
  for (int t = 0; t < 40; ++t) {
    Graph g = random_graph(rng, 3 + t % 5, 0.3 + 0.1 * (t % 4));
    RatMat m = graph_matrix(g);
    ASSERT_EQ(copositivity_class(m).cls, CopositivityClass::Boundary);
    ZeroSet a = graph_matrix_zeros(g), b = zeros_in_simplex(m);
    EXPECT_EQ(a.is_finite, b.is_finite);
    EXPECT_EQ(a.is_finite, critical_edges(g).empty());
    ASSERT_EQ(a.finite_zeros.size(), b.finite_zeros.size());
    for (const auto& p : a.finite_zeros) {
      bool found = false;
      for (const auto& q : b.finite_zeros) found = found || p.x == q.x;
      EXPECT_TRUE(found);
    }
    ASSERT_EQ(a.infinite_families.size(), b.infinite_families.size());
    for (const auto& f : a.infinite_families) {
      bool found = false;
      for (const auto& h : b.infinite_families) found = found || (f.support == h.support && f.dimension == h.dimension);
      EXPECT_TRUE(found);
    }
  }
}

TEST(GraphProperty, AcriticalZerosAreStrict) {
  std::mt19937_64 rng(33);
  int acritical = 0;
  for (int t = 0; t < 80; ++t) {
    Graph g = random_graph(rng, 4 + t % 6, 0.3 + 0.1 * (t % 4));
    if (!critical_edges(g).empty()) continue;
    ++acritical;
    RatMat m = graph_matrix(g);
    for (const auto& p : graph_matrix_zeros(g).finite_zeros) {
      std::vector<Rational> mx = m.apply(std::span<const Rational>(p.x));
      for (std::size_t i = 0; i < g.order(); ++i)
        if (p.x[i] == 0) EXPECT_GT(mx[i], 0);
    }
  }
  EXPECT_GT(acritical, 0);
}

TEST(GraphProperty, SupportEdgesAreCritical) {
  std::mt19937_64 rng(34);
  for (int t = 0; t < 40; ++t) {
    Graph g = random_graph(rng, 4 + t % 5, 0.4);
    auto crit = critical_edges(g);
    for (const auto& f : graph_matrix_zeros(g).infinite_families)
      for (std::size_t a = 0; a < f.support.size(); ++a)
        for (std::size_t b = a + 1; b < f.support.size(); ++b)
          if (g.adjacent(f.support[a], f.support[b]))
            EXPECT_TRUE(std::find(crit.begin(), crit.end(), Edge{f.support[a], f.support[b]}) != crit.end());
  }
}

TEST(GraphProperty, CharacterizationOnRandomPoints) {
  std::mt19937_64 rng(35);
  for (int t = 0; t < 30; ++t) {
    Graph g = random_graph(rng, 5, 0.5);
    ZeroSet z = graph_matrix_zeros(g);
    for (const auto& p : z.finite_zeros) EXPECT_TRUE(check_zero_characterization(g, p.x).pass);
    std::uniform_int_distribution<int> w(0, 2);
    std::vector<Rational> x(5);
    int total = 0;
    for (auto& v : x) {
      const int k = w(rng);
      v = k;
      total += k;
    }
    if (total == 0) continue;
    for (auto& v : x) {
      v /= total;
      v.canonicalize();
    }
    EXPECT_NO_THROW(check_zero_characterization(g, x));
  }
}

}  // namespace
}  // namespace copkit
