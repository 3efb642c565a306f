#pragma once

// Exact linear systems over PSD blocks, nonnegative and free scalars, kept
// next to their floating-point SDP image so that solver output can be
// rounded back onto the exact constraint set.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "copkit/polynomial.hpp"
#include "copkit/sdp.hpp"

namespace copkit::detail {

enum class VarKind { Block, Nonneg, Free };

struct ExactTerm {
  VarKind kind;
  std::size_t index;  // block index or scalar index
  std::size_t i = 0, j = 0;
  Rational coef;
};

struct ConicSystem {
  std::vector<std::size_t> blocks;
  std::size_t nonneg = 0;
  std::size_t free = 0;
  std::vector<std::vector<ExactTerm>> rows;
  std::vector<Rational> rhs;

  std::size_t add_block(std::size_t n) {
    blocks.push_back(n);
    return blocks.size() - 1;
  }
  std::size_t add_nonneg() { return nonneg++; }
  std::size_t add_free() { return free++; }
  void add_row(std::vector<ExactTerm> row, Rational r) {
    rows.push_back(std::move(row));
    rhs.push_back(std::move(r));
  }

  SdpProblem to_sdp() const;
};

struct ConicPoint {
  std::vector<RatMat> blocks;
  std::vector<Rational> nonneg;
  std::vector<Rational> free;
};

/// Exact residual check: every row holds, blocks PSD, nonneg scalars >= 0.
bool satisfies_exactly(const ConicSystem& sys, const ConicPoint& x);

/// Exact values of the solver output (each double converted without loss).
ConicPoint point_from_solution(const ConicSystem& sys, const SdpSolution& s);

struct RoundingOptions {
  std::vector<std::uint64_t> denominators{1, 2, 6, 12, 60, 360, 2520, 27720};
  std::uint64_t denominator_bound = 27720;
  double kernel_gap = 1e3;       // eigenvalue ratio separating a numerical kernel
  double kernel_ceiling = 1e-5;  // kernel eigenvalues must be below this times the largest
  double slack_tol = 1e-6;       // nonnegative scalars below this are pinned to zero
  std::size_t max_elimination_ops = 5'000'000;   // exact projection work before giving up
};

/// Rounds a floating-point feasible point onto the exact system: numerical
/// kernels of the PSD blocks and near-zero nonnegative scalars are pinned,
/// entries are replaced by continued-fraction approximations, and the result
/// is projected (minimum-norm, exact) onto the affine constraints. Returns a
/// point that satisfies the system exactly, or nothing.
std::optional<ConicPoint> round_point(const ConicSystem& sys, const ConicPoint& approx,
                                      const RoundingOptions& opt = {});

/// Builds coefficient-matching systems: target = sum of multiplier * Gram
/// forms + nonnegative/free scalar multiples of fixed polynomials.
class IdentityBuilder {
 public:
  explicit IdentityBuilder(std::size_t nvars) : nvars_(nvars) {}

  /// multiplier(x) * b(x)^T G b(x) with a new PSD block G over `basis`.
  std::size_t add_gram(const std::vector<Exponent>& basis, const Polynomial& multiplier);
  /// c * p(x) with c >= 0.
  std::size_t add_nonneg_poly(const Polynomial& p);
  /// c * p(x) with c free.
  std::size_t add_free_poly(const Polynomial& p);

  /// One equality per monomial appearing in the target or in any term.
  ConicSystem finish(const Polynomial& target) const;

 private:
  std::size_t nvars_;
  ConicSystem sys_;
  std::map<Exponent, std::vector<ExactTerm>, GrlexLess> by_monomial_;
};

/// Polynomial b^T G b.
Polynomial gram_form(const std::vector<Exponent>& basis, const RatMat& g);

}  // namespace copkit::detail
