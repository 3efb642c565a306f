#include "conic_system.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace copkit::detail {

SdpProblem ConicSystem::to_sdp() const {
  SdpProblem p;
  for (auto n : blocks) p.add_block(n);
  p.add_nonneg(nonneg);
  p.add_free(free);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    LinearFunctional f;
    for (const auto& t : rows[k]) {
      const double c = t.coef.get_d();
      switch (t.kind) {
        case VarKind::Block: f.blocks.push_back({t.index, t.i, t.j, c}); break;
        case VarKind::Nonneg: f.nonneg.push_back({t.index, c}); break;
        case VarKind::Free: f.free.push_back({t.index, c}); break;
      }
    }
    p.add_constraint(std::move(f), rhs[k].get_d());
  }
  return p;
}

namespace {

Rational value_of(const ConicPoint& x, const ExactTerm& t) {
  switch (t.kind) {
    case VarKind::Block: return x.blocks[t.index](t.i, t.j);
    case VarKind::Nonneg: return x.nonneg[t.index];
    case VarKind::Free: return x.free[t.index];
  }
  return 0;
}

// Flat variable numbering: upper triangles of the blocks, then scalars.
struct Layout {
  std::vector<std::size_t> block_offset;
  std::size_t nonneg_offset = 0, free_offset = 0, total = 0;
  std::vector<std::size_t> sizes;

  explicit Layout(const ConicSystem& s) : sizes(s.blocks) {
    std::size_t off = 0;
    for (auto n : s.blocks) {
      block_offset.push_back(off);
      off += n * (n + 1) / 2;
    }
    nonneg_offset = off;
    free_offset = off + s.nonneg;
    total = free_offset + s.free;
  }
  std::size_t index(const ExactTerm& t) const {
    switch (t.kind) {
      case VarKind::Block: {
        std::size_t i = std::min(t.i, t.j), j = std::max(t.i, t.j);
        return block_offset[t.index] + j * (j + 1) / 2 + i;
      }
      case VarKind::Nonneg: return nonneg_offset + t.index;
      case VarKind::Free: return free_offset + t.index;
    }
    return 0;
  }
};

using SparseRow = std::map<std::size_t, Rational>;

std::vector<Rational> flatten(const Layout& lay, const ConicPoint& x) {
  std::vector<Rational> v(lay.total);
  for (std::size_t b = 0; b < lay.sizes.size(); ++b)
    for (std::size_t j = 0; j < lay.sizes[b]; ++j)
      for (std::size_t i = 0; i <= j; ++i) v[lay.block_offset[b] + j * (j + 1) / 2 + i] = x.blocks[b](i, j);
  for (std::size_t k = 0; k < x.nonneg.size(); ++k) v[lay.nonneg_offset + k] = x.nonneg[k];
  for (std::size_t k = 0; k < x.free.size(); ++k) v[lay.free_offset + k] = x.free[k];
  return v;
}

ConicPoint unflatten(const Layout& lay, const ConicSystem& sys, const std::vector<Rational>& v) {
  ConicPoint x;
  for (std::size_t b = 0; b < lay.sizes.size(); ++b) {
    RatMat m(lay.sizes[b]);
    for (std::size_t j = 0; j < lay.sizes[b]; ++j)
      for (std::size_t i = 0; i <= j; ++i) m.set(i, j, v[lay.block_offset[b] + j * (j + 1) / 2 + i]);
    x.blocks.push_back(std::move(m));
  }
  x.nonneg.assign(v.begin() + static_cast<std::ptrdiff_t>(lay.nonneg_offset),
                  v.begin() + static_cast<std::ptrdiff_t>(lay.nonneg_offset + sys.nonneg));
  x.free.assign(v.begin() + static_cast<std::ptrdiff_t>(lay.free_offset),
                v.begin() + static_cast<std::ptrdiff_t>(lay.free_offset + sys.free));
  return x;
}

// Minimum-norm exact correction: x + A^T w with (A A^T) w = b - A x.
// Gives up (setting *exhausted) once elimination has used `budget` updates.
std::optional<std::vector<Rational>> project(const std::vector<SparseRow>& a, const std::vector<Rational>& b,
                                             std::vector<Rational> x, std::size_t budget, bool* exhausted) {
  std::size_t ops = 0;
  const std::size_t m = a.size();
  std::vector<Rational> r(m);
  for (std::size_t k = 0; k < m; ++k) {
    Rational s = b[k];
    for (const auto& [c, v] : a[k]) s -= v * x[c];
    r[k] = s;
  }
  if (std::all_of(r.begin(), r.end(), [](const Rational& q) { return q == 0; })) return x;

  // Normal matrix, sparse: rows sharing a variable.
  std::map<std::size_t, std::vector<std::size_t>> rows_of_var;
  for (std::size_t k = 0; k < m; ++k)
    for (const auto& [c, v] : a[k]) rows_of_var[c].push_back(k);
  std::vector<SparseRow> n(m);
  for (const auto& [c, rs] : rows_of_var)
    for (std::size_t p : rs)
      for (std::size_t q : rs) n[p][q] += a[p].at(c) * a[q].at(c);

  struct Pivot {
    SparseRow row;
    Rational rhs;
    std::size_t col;
  };
  std::vector<Pivot> piv;
  std::map<std::size_t, std::size_t> pivot_of_col;
  for (std::size_t k = 0; k < m; ++k) {
    SparseRow row = n[k];
    Rational rhs = r[k];
    for (auto it = row.begin(); it != row.end();) {
      if (it->second == 0) {
        it = row.erase(it);
        continue;
      }
      auto pc = pivot_of_col.find(it->first);
      if (pc == pivot_of_col.end()) {
        ++it;
        continue;
      }
      const Pivot& p = piv[pc->second];
      Rational f = it->second / p.row.at(p.col);
      for (const auto& [c, v] : p.row) row[c] -= f * v;
      rhs -= f * p.rhs;
      ops += p.row.size();
      if (ops > budget) {
        *exhausted = true;
        return std::nullopt;
      }
      // Restart: the subtraction may have created entries at smaller columns.
      it = row.begin();
    }
    if (row.empty()) {
      if (rhs != 0) return std::nullopt;
      continue;
    }
    const std::size_t col = row.begin()->first;
    pivot_of_col[col] = piv.size();
    piv.push_back({std::move(row), std::move(rhs), col});
  }
  std::vector<Rational> w(m, Rational(0));
  for (std::size_t t = piv.size(); t-- > 0;) {
    const Pivot& p = piv[t];
    Rational s = p.rhs;
    for (const auto& [c, v] : p.row)
      if (c != p.col) s -= v * w[c];
    w[p.col] = s / p.row.at(p.col);
  }
  for (std::size_t k = 0; k < m; ++k) {
    if (w[k] == 0) continue;
    for (const auto& [c, v] : a[k]) x[c] += v * w[k];
  }
  return x;
}

// Rational basis of the span of the columns of v (n x k, orthonormal), in
// reduced echelon form, with entries approximated to denominators <= den.
std::vector<std::vector<Rational>> rational_span(const Eigen::MatrixXd& v, std::uint64_t den) {
  Eigen::MatrixXd r = v.transpose();  // k x n
  const Eigen::Index k = r.rows(), n = r.cols();
  std::vector<Eigen::Index> pivcol;
  for (Eigen::Index row = 0; row < k; ++row) {
    Eigen::Index best = -1;
    double bv = 0;
    for (Eigen::Index c = 0; c < n; ++c) {
      if (std::find(pivcol.begin(), pivcol.end(), c) != pivcol.end()) continue;
      if (std::abs(r(row, c)) > bv + 1e-12) bv = std::abs(r(row, c)), best = c;
    }
    if (best < 0 || bv < 1e-9) return {};
    r.row(row) /= r(row, best);
    for (Eigen::Index o = 0; o < k; ++o)
      if (o != row) r.row(o) -= r(o, best) * r.row(row);
    pivcol.push_back(best);
  }
  std::vector<std::vector<Rational>> out;
  for (Eigen::Index row = 0; row < k; ++row) {
    std::vector<Rational> vec(static_cast<std::size_t>(n));
    for (Eigen::Index c = 0; c < n; ++c) {
      if (std::find(pivcol.begin(), pivcol.end(), c) != pivcol.end())
        vec[static_cast<std::size_t>(c)] = c == pivcol[static_cast<std::size_t>(row)] ? 1 : 0;
      else
        vec[static_cast<std::size_t>(c)] = approximate(r(row, c), den);
    }
    out.push_back(std::move(vec));
  }
  return out;
}

// Numerical kernel of a PSD block: eigenvectors below the largest eigenvalue
// gap, provided the gap is pronounced.
Eigen::MatrixXd numerical_kernel(const RatMat& g, const RoundingOptions& opt) {
  const Eigen::Index n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = g(i, j).get_d();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  const auto& ev = es.eigenvalues();
  const double top = ev(n - 1);
  if (top <= 1e-9) return es.eigenvectors();  // numerically zero block
  Eigen::Index cut = 0;
  double best_ratio = opt.kernel_gap;
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    if (ev(k) > opt.kernel_ceiling * top) break;
    double ratio = ev(k + 1) / std::max(std::abs(ev(k)), 1e-300);
    if (ratio >= best_ratio) best_ratio = ratio, cut = k + 1;
  }
  return es.eigenvectors().leftCols(cut);
}

}  // namespace

bool satisfies_exactly(const ConicSystem& sys, const ConicPoint& x) {
  if (x.blocks.size() != sys.blocks.size() || x.nonneg.size() != sys.nonneg || x.free.size() != sys.free)
    return false;
  for (std::size_t k = 0; k < sys.rows.size(); ++k) {
    Rational s = 0;
    for (const auto& t : sys.rows[k]) s += t.coef * value_of(x, t);
    if (s != sys.rhs[k]) return false;
  }
  for (const auto& v : x.nonneg)
    if (v < 0) return false;
  for (const auto& b : x.blocks)
    if (!psd_check_exact(b).psd) return false;
  return true;
}

ConicPoint point_from_solution(const ConicSystem& sys, const SdpSolution& s) {
  ConicPoint x;
  for (std::size_t b = 0; b < sys.blocks.size(); ++b) x.blocks.push_back(to_rational(s.blocks.at(b)));
  for (std::size_t k = 0; k < sys.nonneg; ++k) x.nonneg.push_back(from_double(s.nonneg.at(k)));
  for (std::size_t k = 0; k < sys.free; ++k) x.free.push_back(from_double(s.free.at(k)));
  return x;
}

std::optional<ConicPoint> round_point(const ConicSystem& sys, const ConicPoint& approx, const RoundingOptions& opt) {
  const Layout lay(sys);
  std::vector<SparseRow> base;
  for (const auto& row : sys.rows) {
    SparseRow r;
    for (const auto& t : row) r[lay.index(t)] += t.coef;
    for (auto it = r.begin(); it != r.end();) it = it->second == 0 ? r.erase(it) : std::next(it);
    base.push_back(std::move(r));
  }

  std::vector<Eigen::MatrixXd> kernels;
  for (const auto& b : approx.blocks) kernels.push_back(numerical_kernel(b, opt));

  double slack_scale = 1;
  for (const auto& v : approx.nonneg) slack_scale = std::max(slack_scale, std::abs(v.get_d()));
  std::vector<std::size_t> pinned_slacks;
  for (std::size_t k = 0; k < approx.nonneg.size(); ++k)
    if (approx.nonneg[k].get_d() <= opt.slack_tol * slack_scale) pinned_slacks.push_back(k);

  const std::vector<Rational> flat = flatten(lay, approx);
  for (bool with_faces : {true, false}) {
    for (std::uint64_t den : opt.denominators) {
      if (den > opt.denominator_bound) break;
      std::vector<SparseRow> a = base;
      std::vector<Rational> rhs = sys.rhs;
      if (with_faces) {
        bool ok = true;
        for (std::size_t b = 0; b < kernels.size() && ok; ++b) {
          if (kernels[b].cols() == 0) continue;
          auto vecs = rational_span(kernels[b], den);
          if (vecs.empty()) {
            ok = false;
            break;
          }
          const std::size_t n = sys.blocks[b];
          for (const auto& v : vecs)
            for (std::size_t i = 0; i < n; ++i) {
              SparseRow r;
              for (std::size_t j = 0; j < n; ++j)
                if (v[j] != 0) r[lay.index({VarKind::Block, b, i, j, 0})] += v[j];
              for (auto it = r.begin(); it != r.end();) it = it->second == 0 ? r.erase(it) : std::next(it);
              if (r.empty()) continue;
              a.push_back(std::move(r));
              rhs.push_back(0);
            }
        }
        if (!ok) continue;
        for (std::size_t k : pinned_slacks) {
          a.push_back(SparseRow{{lay.nonneg_offset + k, Rational(1)}});
          rhs.push_back(0);
        }
      }
      std::vector<Rational> x0(flat.size());
      for (std::size_t k = 0; k < flat.size(); ++k) x0[k] = approximate(flat[k].get_d(), den);
      bool exhausted = false;
      auto x = project(a, rhs, std::move(x0), opt.max_elimination_ops, &exhausted);
      if (exhausted) return std::nullopt;
      if (!x) continue;
      ConicPoint p = unflatten(lay, sys, *x);
      if (satisfies_exactly(sys, p)) return p;
    }
  }
  return std::nullopt;
}

std::size_t IdentityBuilder::add_gram(const std::vector<Exponent>& basis, const Polynomial& multiplier) {
  const std::size_t blk = sys_.add_block(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = i; j < basis.size(); ++j) {
      const Exponent prod = basis[i] + basis[j];
      const Rational factor = i == j ? 1 : 2;
      for (const auto& [e, c] : multiplier.terms())
        by_monomial_[e + prod].push_back({VarKind::Block, blk, i, j, factor * c});
    }
  return blk;
}

std::size_t IdentityBuilder::add_nonneg_poly(const Polynomial& p) {
  const std::size_t idx = sys_.add_nonneg();
  for (const auto& [e, c] : p.terms()) by_monomial_[e].push_back({VarKind::Nonneg, idx, 0, 0, c});
  return idx;
}

std::size_t IdentityBuilder::add_free_poly(const Polynomial& p) {
  const std::size_t idx = sys_.add_free();
  for (const auto& [e, c] : p.terms()) by_monomial_[e].push_back({VarKind::Free, idx, 0, 0, c});
  return idx;
}

ConicSystem IdentityBuilder::finish(const Polynomial& target) const {
  if (target.nvars() != nvars_) throw std::invalid_argument("target polynomial has the wrong variable count");
  ConicSystem out = sys_;
  auto monomials = by_monomial_;
  for (const auto& [e, c] : target.terms()) monomials.try_emplace(e);
  for (const auto& [e, terms] : monomials) out.add_row(terms, target.coefficient(e));
  return out;
}

Polynomial gram_form(const std::vector<Exponent>& basis, const RatMat& g) {
  if (basis.empty()) throw std::invalid_argument("gram form needs a nonempty basis");
  Polynomial p(basis.front().size());
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = i; j < basis.size(); ++j) {
      Rational c = i == j ? g(i, i) : Rational(2 * g(i, j));
      p.add_term(basis[i] + basis[j], c);
    }
  return p;
}

}  // namespace copkit::detail
