#pragma once

// Dense multi-block semidefinite programming.
//
// Variables are symmetric PSD blocks, nonnegative scalars and free scalars.
// A linear functional lists coefficients on individual variables; a block
// coefficient (b, i, j, c) with i <= j multiplies the single variable X_b[i][j]
// (the off-diagonal pair is one variable). Constraints are equalities.
//
// The solver is an infeasible-start primal-dual path-following method with
// Nesterov-Todd scaling and Mehrotra predictor-corrector steps; the Schur
// complement is formed densely and factored with a Cholesky-type LDL^T.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "copkit/symmat.hpp"

namespace copkit {

struct BlockTerm {
  std::size_t block;
  std::size_t i;
  std::size_t j;
  double coef;
};

struct ScalarTerm {
  std::size_t index;
  double coef;
};

struct LinearFunctional {
  std::vector<BlockTerm> blocks;
  std::vector<ScalarTerm> nonneg;
  std::vector<ScalarTerm> free;

  bool empty() const { return blocks.empty() && nonneg.empty() && free.empty(); }
};

enum class Sense { Minimize, Maximize };

class SdpProblem {
 public:
  std::size_t add_block(std::size_t size);
  /// Returns the index of the first of `count` new variables.
  std::size_t add_nonneg(std::size_t count = 1);
  std::size_t add_free(std::size_t count = 1);
  void add_constraint(LinearFunctional f, double rhs);
  void set_objective(LinearFunctional f, Sense sense);

  const std::vector<std::size_t>& block_sizes() const { return blocks_; }
  std::size_t nonneg_count() const { return nonneg_; }
  std::size_t free_count() const { return free_; }
  std::size_t constraint_count() const { return rows_.size(); }
  const std::vector<LinearFunctional>& rows() const { return rows_; }
  const std::vector<double>& rhs() const { return rhs_; }
  const LinearFunctional& objective() const { return objective_; }
  Sense sense() const { return sense_; }

  /// Throws std::invalid_argument when a functional references an undeclared
  /// variable or an index outside its block.
  void validate() const;

  /// Plain-text sparse dump: a header line, then one line per constraint
  /// "rhs | b:i:j:coef ... | n:k:coef ... | f:k:coef ...", then the objective.
  void dump(std::ostream& os) const;

 private:
  void check(const LinearFunctional& f) const;

  std::vector<std::size_t> blocks_;
  std::size_t nonneg_ = 0;
  std::size_t free_ = 0;
  std::vector<LinearFunctional> rows_;
  std::vector<double> rhs_;
  LinearFunctional objective_;
  Sense sense_ = Sense::Minimize;
};

struct SdpConfig {
  double tol_gap = 1e-8;
  double tol_feas = 1e-8;
  int max_iters = 120;
  /// Seeds a tiny deterministic perturbation of the starting point; 0 keeps
  /// the plain scaled-identity start.
  std::uint64_t seed = 0;
};

enum class SdpStatus { Optimal, MaxIterations, NumericalFailure, Inconsistent };

std::string to_string(SdpStatus s);

struct Residuals {
  double primal = 0;  // ||b - A(x)|| / (1 + ||b||)
  double dual = 0;    // ||c - A^T y - z|| / (1 + ||c||), free rows included
  double gap = 0;     // |pobj - dobj| / (1 + |pobj| + |dobj|)
};

struct SdpSolution {
  SdpStatus status = SdpStatus::NumericalFailure;
  std::vector<FloatMat> blocks;
  std::vector<double> nonneg;
  std::vector<double> free;
  std::vector<double> dual;           // y, one per original constraint
  std::vector<FloatMat> dual_blocks;  // Z
  std::vector<double> dual_nonneg;    // z
  double objective = 0;               // primal objective in the problem's sense
  double dual_objective = 0;
  Residuals residuals;
  int iterations = 0;
  std::size_t dropped_rows = 0;
  std::string message;
};

SdpSolution solve(const SdpProblem& p, const SdpConfig& cfg = {});

/// Residuals recomputed from the variables stored in `s`.
Residuals residuals(const SdpProblem& p, const SdpSolution& s);

struct MarginResult {
  double margin = 0;  // lambda*
  SdpSolution solution;  // blocks hold G' = G + lambda I (the original variables)
  double trace_cap = 0;
  double cap_dual = 0;  // multiplier of the trace-cap row
};

/// 1e3 * (shifted dimension) * (1 + max |rhs|).
double default_trace_cap(const SdpProblem& p, const std::vector<std::size_t>& margin_blocks = {});

/// Decides feasibility of the PSD system in `p` (its objective is ignored):
/// maximizes lambda subject to the original constraints with every PSD block
/// listed in `margin_blocks` (all blocks when empty) shifted to G' with
/// G' - lambda I PSD. A total-trace cap keeps the problem bounded.
MarginResult margin_maximize(const SdpProblem& p, const std::vector<std::size_t>& margin_blocks = {},
                             const SdpConfig& cfg = {}, double trace_cap = 0);

}  // namespace copkit
