#include "copkit/graphs.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace copkit {

Graph::Graph(std::size_t n) : adj_(n, 0) {
  if (n > kGraphCap) throw std::invalid_argument("graph order is capped at " + std::to_string(kGraphCap));
}

void Graph::add_edge(std::size_t i, std::size_t j) {
  if (i >= order() || j >= order()) throw std::invalid_argument("edge endpoint out of range");
  if (i == j) throw std::invalid_argument("loops are not allowed");
  if (adjacent(i, j)) throw std::invalid_argument("duplicate edge");
  adj_[i] |= std::uint64_t{1} << j;
  adj_[j] |= std::uint64_t{1} << i;
  Edge e = std::minmax(i, j);
  edges_.insert(std::lower_bound(edges_.begin(), edges_.end(), e), e);
}

Graph Graph::without_edge(const Edge& e) const {
  Graph h(order());
  for (const auto& f : edges_)
    if (f != e) h.add_edge(f.first, f.second);
  return h;
}

Graph parse_graph(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<std::vector<long long>> rows;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<long long> nums;
    std::string tok;
    while (ls >> tok) {
      std::size_t used = 0;
      long long v = 0;
      try {
        v = std::stoll(tok, &used);
      } catch (const std::exception&) {
        throw std::invalid_argument("graph file: not an integer: " + tok);
      }
      if (used != tok.size()) throw std::invalid_argument("graph file: not an integer: " + tok);
      nums.push_back(v);
    }
    if (!nums.empty()) rows.push_back(std::move(nums));
  }
  if (rows.empty() || rows[0].size() != 2) throw std::invalid_argument("graph file: header must be \"n m\"");
  const long long n = rows[0][0], m = rows[0][1];
  if (n < 1 || m < 0) throw std::invalid_argument("graph file: bad header");
  if (static_cast<long long>(rows.size()) - 1 != m)
    throw std::invalid_argument("graph file: expected " + std::to_string(m) + " edge lines");
  Graph g(static_cast<std::size_t>(n));
  for (std::size_t k = 1; k < rows.size(); ++k) {
    if (rows[k].size() != 2) throw std::invalid_argument("graph file: edge line must be \"i j\"");
    const long long i = rows[k][0], j = rows[k][1];
    if (i < 1 || j < 1 || i > n || j > n) throw std::invalid_argument("graph file: vertex out of range");
    g.add_edge(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1));
  }
  return g;
}

Graph read_graph_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot open graph file: " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_graph(buf.str());
}

Graph cycle_graph(std::size_t n) {
  if (n < 3) throw std::invalid_argument("a cycle needs at least 3 vertices");
  Graph g(n);
  for (std::size_t i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
  return g;
}

Graph complete_graph(std::size_t n) {
  if (n < 1) throw std::invalid_argument("a complete graph needs at least 1 vertex");
  Graph g(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) g.add_edge(i, j);
  return g;
}

Graph path_graph(std::size_t n) {
  if (n < 1) throw std::invalid_argument("a path needs at least 1 vertex");
  Graph g(n);
  for (std::size_t i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1);
  return g;
}

Graph petersen_graph() {
  Graph g(10);
  for (std::size_t i = 0; i < 5; ++i) {
    g.add_edge(i, (i + 1) % 5);
    g.add_edge(i, i + 5);
    g.add_edge(5 + i, 5 + (i + 2) % 5);
  }
  return g;
}

Graph graph_from_generator(const std::string& spec) {
  if (spec == "petersen") return petersen_graph();
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("unknown graph generator: " + spec);
  const std::string kind = spec.substr(0, colon), arg = spec.substr(colon + 1);
  std::size_t used = 0;
  unsigned long n = 0;
  try {
    n = std::stoul(arg, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != arg.size()) throw std::invalid_argument("graph generator needs a size: " + spec);
  if (kind == "cycle") return cycle_graph(n);
  if (kind == "complete") return complete_graph(n);
  if (kind == "path") return path_graph(n);
  throw std::invalid_argument("unknown graph generator: " + spec);
}

namespace {

std::vector<std::size_t> members(std::uint64_t s) {
  std::vector<std::size_t> out;
  while (s) {
    out.push_back(static_cast<std::size_t>(std::countr_zero(s)));
    s &= s - 1;
  }
  return out;
}

// Number of cliques in a greedy clique cover of `p`; bounds any stable set
// inside p.
std::size_t clique_cover_bound(const Graph& g, std::uint64_t p) {
  std::size_t count = 0;
  while (p) {
    const std::size_t v = static_cast<std::size_t>(std::countr_zero(p));
    std::uint64_t clique = std::uint64_t{1} << v;
    std::uint64_t cand = p & g.neighbours(v);
    while (cand) {
      const std::size_t u = static_cast<std::size_t>(std::countr_zero(cand));
      clique |= std::uint64_t{1} << u;
      cand &= g.neighbours(u);
    }
    p &= ~clique;
    ++count;
  }
  return count;
}

}  // namespace

StableSets stability_number(const Graph& g) {
  StableSets out;
  const std::size_t n = g.order();
  if (n == 0) {
    out.sets.push_back({});
    return out;
  }
  std::vector<std::uint64_t> found;
  std::function<void(std::uint64_t, std::uint64_t, std::size_t)> search = [&](std::uint64_t chosen,
                                                                              std::uint64_t cand, std::size_t size) {
    if (!cand) {
      if (size > out.alpha) {
        out.alpha = size;
        found.clear();
      }
      if (size == out.alpha) found.push_back(chosen);
      return;
    }
    if (size + clique_cover_bound(g, cand) < out.alpha) return;
    const std::size_t v = static_cast<std::size_t>(std::countr_zero(cand));
    const std::uint64_t bit = std::uint64_t{1} << v;
    search(chosen | bit, cand & ~bit & ~g.neighbours(v), size + 1);
    // Excluding v is pointless when v has no candidate neighbour: any stable
    // set avoiding v could add it.
    if (cand & g.neighbours(v)) search(chosen, cand & ~bit, size);
  };
  search(0, n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1, 0);
  std::sort(found.begin(), found.end());
  found.erase(std::unique(found.begin(), found.end()), found.end());
  for (auto s : found) out.sets.push_back(members(s));
  std::sort(out.sets.begin(), out.sets.end());
  return out;
}

std::vector<Edge> critical_edges(const Graph& g) {
  const std::size_t alpha = stability_number(g).alpha;
  std::vector<Edge> out;
  for (const auto& e : g.edges())
    if (stability_number(g.without_edge(e)).alpha == alpha + 1) out.push_back(e);
  return out;
}

GraphReport analyze_graph(const Graph& g) {
  GraphReport r;
  StableSets s = stability_number(g);
  r.alpha = s.alpha;
  r.max_stable_sets = std::move(s.sets);
  r.critical_edges = critical_edges(g);
  r.acritical = r.critical_edges.empty();
  return r;
}

RatMat graph_matrix(const Graph& g) {
  const std::size_t n = g.order();
  const Rational alpha(static_cast<long>(stability_number(g).alpha));
  RatMat m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) m.set(i, j, (i == j || g.adjacent(i, j) ? alpha : Rational(0)) - 1);
  return m;
}

namespace {

// Connected components of G[S].
std::vector<std::uint64_t> components(const Graph& g, std::uint64_t s) {
  std::vector<std::uint64_t> out;
  while (s) {
    std::uint64_t comp = s & (~s + 1);
    std::uint64_t frontier = comp;
    while (frontier) {
      const std::size_t v = static_cast<std::size_t>(std::countr_zero(frontier));
      frontier &= frontier - 1;
      std::uint64_t add = g.neighbours(v) & s & ~comp;
      comp |= add;
      frontier |= add;
    }
    out.push_back(comp);
    s &= ~comp;
  }
  return out;
}

bool is_clique(const Graph& g, std::uint64_t c) {
  for (std::size_t v : members(c))
    if ((c & ~(std::uint64_t{1} << v) & ~g.neighbours(v)) != 0) return false;
  return true;
}

}  // namespace

ZeroSet graph_matrix_zeros(const Graph& g, bool* truncated) {
  const std::size_t n = g.order();
  const StableSets st = stability_number(g);
  const std::size_t alpha = st.alpha;
  const std::size_t cap = alpha + 4;
  ZeroSet z;
  for (const auto& s : st.sets) {
    SimplexPoint p;
    p.x.assign(n, 0);
    for (auto v : s) p.x[v] = Rational(1, static_cast<long>(alpha));
    p.support = s;
    z.finite_zeros.push_back(std::move(p));
  }
  // Supports inducing a disjoint union of alpha cliques with more than alpha
  // vertices. An induced path on three vertices persists in every superset,
  // so such branches are cut.
  bool cut = false;
  std::function<void(std::uint64_t, std::size_t, std::size_t)> grow = [&](std::uint64_t s, std::size_t size,
                                                                          std::size_t start) {
    for (std::size_t v = start; v < n; ++v) {
      const std::uint64_t t = s | (std::uint64_t{1} << v);
      auto comps = components(g, t);
      bool cluster = true;
      for (auto c : comps) cluster = cluster && is_clique(g, c);
      if (!cluster) continue;
      if (comps.size() == alpha && size + 1 > alpha) z.infinite_families.push_back({members(t), size + 1 - alpha});
      if (size + 1 >= cap) {
        if (v + 1 < n) cut = true;
        continue;
      }
      grow(t, size + 1, v + 1);
    }
  };
  grow(0, 0, 0);
  std::sort(z.infinite_families.begin(), z.infinite_families.end(),
            [](const ZeroFamily& a, const ZeroFamily& b) { return a.support < b.support; });
  z.is_finite = z.infinite_families.empty();
  if (truncated) *truncated = cut;
  return z;
}

ZeroCharacterization check_zero_characterization(const Graph& g, const std::vector<Rational>& x) {
  const std::size_t n = g.order();
  if (x.size() != n) throw std::invalid_argument("point has the wrong dimension");
  Rational total = 0;
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] < 0) throw std::invalid_argument("point is not in the simplex");
    if (x[i] > 0) s |= std::uint64_t{1} << i;
    total += x[i];
  }
  if (total != 1) throw std::invalid_argument("point is not in the simplex");
  const std::size_t alpha = stability_number(g).alpha;
  ZeroCharacterization r;
  auto comps = components(g, s);
  for (auto c : comps) r.components.push_back(members(c));
  bool combinatorial = comps.size() == alpha;
  if (!combinatorial) r.reason = "support has " + std::to_string(comps.size()) + " components, alpha is " +
                                 std::to_string(alpha);
  for (auto c : comps) {
    if (!combinatorial) break;
    if (!is_clique(g, c)) {
      combinatorial = false;
      r.reason = "a component of the support is not a clique";
      break;
    }
    Rational w = 0;
    for (auto v : members(c)) w += x[v];
    if (w != Rational(1, static_cast<long>(alpha))) {
      combinatorial = false;
      r.reason = "a component does not carry weight 1/alpha";
    }
  }
  const bool direct = graph_matrix(g).quadratic(std::span<const Rational>(x)) == 0;
  if (direct != combinatorial)
    throw std::logic_error("clique criterion and direct evaluation disagree on a zero of the graph form");
  r.pass = direct;
  return r;
}

}  // namespace copkit
