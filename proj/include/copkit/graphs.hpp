#pragma once

// Simple undirected graphs: exact stability number with all maximum stable
// sets, critical edges, the graph matrix alpha(G)(I + A_G) - J and the zeros
// of its quadratic form.

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "copkit/copositivity.hpp"
#include "copkit/symmat.hpp"

namespace copkit {

/// Largest order accepted by the stable-set search.
inline constexpr std::size_t kGraphCap = 40;

using Edge = std::pair<std::size_t, std::size_t>;  // first < second

class Graph {
 public:
  Graph() = default;
  explicit Graph(std::size_t n);

  /// Throws on loops, duplicates and out-of-range vertices.
  void add_edge(std::size_t i, std::size_t j);

  std::size_t order() const { return adj_.size(); }
  std::size_t size() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  bool adjacent(std::size_t i, std::size_t j) const { return (adj_[i] >> j) & 1u; }
  std::uint64_t neighbours(std::size_t i) const { return adj_[i]; }

  Graph without_edge(const Edge& e) const;

 private:
  std::vector<std::uint64_t> adj_;
  std::vector<Edge> edges_;
};

/// "n m" then m lines "i j" with 1-based vertices; '#' comments and blank
/// lines ignored.
Graph parse_graph(std::string_view text);
Graph read_graph_file(const std::string& path);
/// "cycle:N", "complete:N", "path:N", "petersen"; nothing else.
Graph graph_from_generator(const std::string& spec);

Graph cycle_graph(std::size_t n);
Graph complete_graph(std::size_t n);
Graph path_graph(std::size_t n);
Graph petersen_graph();

struct StableSets {
  std::size_t alpha = 0;
  std::vector<std::vector<std::size_t>> sets;  // every maximum stable set, sorted
};

StableSets stability_number(const Graph& g);

/// Edges e with alpha(G \ e) = alpha(G) + 1.
std::vector<Edge> critical_edges(const Graph& g);

struct GraphReport {
  std::size_t alpha = 0;
  std::vector<std::vector<std::size_t>> max_stable_sets;
  std::vector<Edge> critical_edges;
  bool acritical = true;
};

GraphReport analyze_graph(const Graph& g);

RatMat graph_matrix(const Graph& g);

/// Zeros of x^T M_G x in the simplex from the clique characterization.
/// Families are enumerated for supports of size at most alpha + 4; when the
/// cap cut the enumeration short `truncated` is set.
ZeroSet graph_matrix_zeros(const Graph& g, bool* truncated = nullptr);

struct ZeroCharacterization {
  bool pass = false;  // x is a zero
  std::vector<std::vector<std::size_t>> components;  // of G[Supp(x)]
  std::string reason;
};

/// Decides x^T M_G x = 0 by the clique criterion and by direct evaluation;
/// throws std::logic_error if the two disagree.
ZeroCharacterization check_zero_characterization(const Graph& g, const std::vector<Rational>& x);

}  // namespace copkit
