#include "copkit/copositivity.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace copkit {

std::string to_string(CopositivityClass c) {
  switch (c) {
    case CopositivityClass::StrictlyCopositive: return "strictly_copositive";
    case CopositivityClass::Boundary: return "boundary";
    case CopositivityClass::NotCopositive: return "not_copositive";
  }
  return "unknown";
}

namespace {

using RatRows = std::vector<std::vector<Rational>>;

void check_cap(std::size_t n) {
  if (n == 0) throw std::invalid_argument("matrix must have order at least 1");
  if (n > kSimplexCap)
    throw std::invalid_argument("support enumeration is capped at order " + std::to_string(kSimplexCap));
}

// Reduced row echelon form in place; returns the pivot columns.
std::vector<std::size_t> rref(RatRows& a, std::size_t cols) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t c = 0; c < cols && row < a.size(); ++c) {
    std::size_t p = row;
    while (p < a.size() && a[p][c] == 0) ++p;
    if (p == a.size()) continue;
    std::swap(a[p], a[row]);
    const Rational inv = 1 / a[row][c];
    for (auto& v : a[row]) v *= inv;
    for (std::size_t r = 0; r < a.size(); ++r) {
      if (r == row || a[r][c] == 0) continue;
      const Rational f = a[r][c];
      for (std::size_t k = c; k < a[r].size(); ++k) a[r][k] -= f * a[row][k];
    }
    pivots.push_back(c);
    ++row;
  }
  return pivots;
}

RatRows kernel(RatRows a, std::size_t cols) {
  auto pivots = rref(a, cols);
  std::vector<bool> is_pivot(cols, false);
  for (auto c : pivots) is_pivot[c] = true;
  RatRows basis;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    std::vector<Rational> v(cols, 0);
    v[f] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -a[r][f];
    basis.push_back(std::move(v));
  }
  return basis;
}

RatRows sub_rows(const RatMat& m, const std::vector<std::size_t>& s) {
  RatRows a(s.size(), std::vector<Rational>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j) a[i][j] = m(s[i], s[j]);
  return a;
}

// Stationary point of the form on the relative interior of face S when the
// KKT matrix [M_S e; e^T 0] is nonsingular.
std::optional<std::pair<std::vector<Rational>, Rational>> kkt_point(const RatMat& m,
                                                                    const std::vector<std::size_t>& s) {
  const std::size_t k = s.size();
  RatRows a(k + 1, std::vector<Rational>(k + 2, 0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) a[i][j] = m(s[i], s[j]);
    a[i][k] = 1;
    a[k][i] = 1;
  }
  a[k][k + 1] = 1;
  auto pivots = rref(a, k + 1);
  if (pivots.size() < k + 1) return std::nullopt;
  std::vector<Rational> x(k);
  for (std::size_t i = 0; i < k; ++i) {
    x[i] = a[i][k + 1];
    if (x[i] <= 0) return std::nullopt;
  }
  return std::make_pair(std::move(x), Rational(-a[k][k + 1]));
}

SimplexPoint embed(const std::vector<Rational>& xs, const std::vector<std::size_t>& s, std::size_t n) {
  SimplexPoint p;
  p.x.assign(n, 0);
  for (std::size_t i = 0; i < s.size(); ++i) p.x[s[i]] = xs[i];
  for (std::size_t i = 0; i < n; ++i)
    if (p.x[i] != 0) p.support.push_back(i);
  return p;
}

// Supports in increasing lexicographic order, children only visited when
// `descend` accepts the current set.
void for_each_support(std::size_t n, const std::function<bool(const std::vector<std::size_t>&)>& visit) {
  std::vector<std::size_t> s;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    for (std::size_t i = start; i < n; ++i) {
      s.push_back(i);
      if (visit(s)) rec(i + 1);
      s.pop_back();
    }
  };
  rec(0);
}

bool is_subset(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

// Zero set of a copositive M with simplex minimum 0. A zero with support S
// lies in ker M[S] and forces M[S] to be PSD, so branches with a non-PSD
// principal submatrix are pruned. A face with a one-dimensional kernel
// spanned by a positive vector holds exactly one zero; a face with a larger
// kernel holds a family iff the minimal zeros inside it cover its support.
ZeroSet zero_structure(const RatMat& m) {
  const std::size_t n = m.size();
  ZeroSet z;
  std::vector<std::pair<std::vector<std::size_t>, std::size_t>> wide;  // support, kernel dimension
  for_each_support(n, [&](const std::vector<std::size_t>& s) {
    RatMat sub = principal_submatrix(m, std::span<const std::size_t>(s));
    if (!psd_check_exact(sub).psd) return false;
    RatRows ker = kernel(sub_rows(m, s), s.size());
    if (ker.size() == 1) {
      auto v = ker[0];
      int sgn = 0;
      bool ok = true;
      for (const auto& q : v) {
        int t = sign(q);
        if (t == 0 || (sgn != 0 && t != sgn)) {
          ok = false;
          break;
        }
        sgn = t;
      }
      if (ok) {
        Rational total = 0;
        for (const auto& q : v) total += q;
        for (auto& q : v) q /= total;
        z.finite_zeros.push_back(embed(v, s, n));
      }
    } else if (ker.size() >= 2) {
      wide.emplace_back(s, ker.size());
    }
    return true;
  });
  for (const auto& [s, dim] : wide) {
    std::vector<bool> covered(n, false);
    for (const auto& p : z.finite_zeros) {
      if (!is_subset(p.support, s)) continue;
      bool in_kernel = true;
      for (std::size_t i : s) {
        Rational acc = 0;
        for (std::size_t j : p.support) acc += m(i, j) * p.x[j];
        if (acc != 0) {
          in_kernel = false;
          break;
        }
      }
      if (!in_kernel) continue;
      for (std::size_t i : p.support) covered[i] = true;
    }
    bool all = true;
    for (std::size_t i : s) all = all && covered[i];
    if (all) z.infinite_families.push_back({s, dim - 1});
  }
  z.is_finite = z.infinite_families.empty();
  return z;
}

RatMat shift_by_ones(const RatMat& m, const Rational& t) {
  RatMat out = m;
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = i; j < m.size(); ++j) out.at(i, j) -= t;
  return out;
}

}  // namespace

SimplexMinimum simplex_minimize(const RatMat& m) {
  const std::size_t n = m.size();
  check_cap(n);
  // Some global minimizer has a support whose KKT matrix is nonsingular:
  // along a kernel direction of a singular one the form is constant, so the
  // support can be shrunk without changing the value.
  SimplexMinimum out;
  bool have = false;
  for_each_support(n, [&](const std::vector<std::size_t>& s) {
    if (auto kp = kkt_point(m, s)) {
      if (!have || kp->second < out.value) {
        out.value = kp->second;
        out.witness = embed(kp->first, s, n);
        have = true;
      }
    }
    return true;
  });
  out.minimizers = zero_structure(shift_by_ones(m, out.value));
  return out;
}

ClassReport copositivity_class(const RatMat& m) {
  SimplexMinimum sm = simplex_minimize(m);
  ClassReport r;
  r.min_value = sm.value;
  if (sm.value > 0) {
    r.cls = CopositivityClass::StrictlyCopositive;
  } else {
    r.cls = sm.value == 0 ? CopositivityClass::Boundary : CopositivityClass::NotCopositive;
    r.witness = sm.witness;
  }
  return r;
}

ZeroSet zeros_in_simplex(const RatMat& m) {
  SimplexMinimum sm = simplex_minimize(m);
  if (sm.value != 0)
    throw std::invalid_argument(sm.value > 0 ? "matrix is strictly copositive: no zeros"
                                             : "matrix is not copositive");
  return sm.minimizers;
}

std::vector<SccEntry> check_scc(const RatMat& m) {
  ZeroSet z = zeros_in_simplex(m);
  if (!z.is_finite) throw std::invalid_argument("SCC check needs a finite zero set");
  std::vector<SccEntry> out;
  for (const auto& u : z.finite_zeros) {
    SccEntry e;
    e.zero = u;
    e.holds = true;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (u.x[i] != 0) continue;
      Rational acc = 0;
      for (std::size_t j : u.support) acc += m(i, j) * u.x[j];
      e.mu.push_back(acc);
      if (acc <= 0) e.holds = false;
    }
    out.push_back(std::move(e));
  }
  return out;
}

ConsistencyReport k0_zero_consistency(const RatMat& m, const RatMat& p, const std::vector<Rational>& x) {
  const std::size_t n = m.size();
  if (p.size() != n || x.size() != n) throw std::invalid_argument("k0_zero_consistency: dimension mismatch");
  ConsistencyReport r;
  if (!psd_check_exact(p).psd) return {false, "P is not PSD"};
  if (!entrywise_nonneg(m - p)) return {false, "P is not below M entrywise"};
  Rational total = 0;
  for (const auto& v : x) {
    if (v < 0) return {false, "x is not in the simplex"};
    total += v;
  }
  if (total != 1) return {false, "x is not in the simplex"};
  if (m.quadratic(std::span<const Rational>(x)) != 0) return {false, "x is not a zero of the form"};
  std::vector<Rational> px = p.apply(std::span<const Rational>(x));
  for (const auto& v : px)
    if (v != 0) return {false, "P x is not zero"};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (x[i] != 0 && x[j] != 0 && p(i, j) != m(i, j)) return {false, "P[S] differs from M[S]"};
  r.pass = true;
  return r;
}

ConsistencyReport k0_zero_consistency(const FloatMat& m, const FloatMat& p, const std::vector<double>& x,
                                      double tol) {
  const std::size_t n = m.size();
  if (p.size() != n || x.size() != n) throw std::invalid_argument("k0_zero_consistency: dimension mismatch");
  if (min_eig_estimate(p, 1e-14) < -tol) return {false, "P is not PSD"};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      if (p(i, j) > m(i, j) + tol) return {false, "P is not below M entrywise"};
  double total = 0;
  for (double v : x) {
    if (v < -tol) return {false, "x is not in the simplex"};
    total += v;
  }
  if (std::abs(total - 1) > tol) return {false, "x is not in the simplex"};
  if (std::abs(m.quadratic(std::span<const double>(x))) > tol) return {false, "x is not a zero of the form"};
  for (double v : p.apply(std::span<const double>(x)))
    if (std::abs(v) > tol) return {false, "P x is not zero"};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (x[i] > tol && x[j] > tol && std::abs(p(i, j) - m(i, j)) > tol) return {false, "P[S] differs from M[S]"};
  return {true, ""};
}

namespace {

double scale_of(const FloatMat& m) {
  double s = 0;
  for (double v : m.packed()) s = std::max(s, std::abs(v));
  return std::max(s, 1.0);
}

Eigen::MatrixXd sub_dense(const FloatMat& m, const std::vector<std::size_t>& s) {
  Eigen::MatrixXd a(s.size(), s.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j) a(i, j) = m(s[i], s[j]);
  return a;
}

NumericPoint embed_numeric(const Eigen::VectorXd& xs, const std::vector<std::size_t>& s, std::size_t n) {
  NumericPoint p;
  p.x.assign(n, 0.0);
  for (std::size_t i = 0; i < s.size(); ++i) p.x[s[i]] = xs(static_cast<Eigen::Index>(i));
  p.support = s;
  return p;
}

}  // namespace

NumericMinimum simplex_minimize_numeric(const FloatMat& m, double tol) {
  const std::size_t n = m.size();
  check_cap(n);
  const double scale = scale_of(m);
  NumericMinimum out;
  bool have = false;
  for_each_support(n, [&](const std::vector<std::size_t>& s) {
    const Eigen::Index k = static_cast<Eigen::Index>(s.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k + 1, k + 1);
    a.topLeftCorner(k, k) = sub_dense(m, s);
    a.topRightCorner(k, 1).setOnes();
    a.bottomLeftCorner(1, k).setOnes();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    lu.setThreshold(tol);
    if (!lu.isInvertible()) return true;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
    rhs(k) = 1;
    Eigen::VectorXd sol = lu.solve(rhs);
    Eigen::VectorXd x = sol.head(k);
    if (x.minCoeff() <= tol) return true;
    const double value = -sol(k);
    if (!have || value < out.value) {
      out.value = value;
      out.witness = embed_numeric(x, s, n);
      have = true;
    }
    return true;
  });
  if (have) {
    // Re-evaluate the form at the minimizer rather than trusting the multiplier.
    out.value = m.quadratic(std::span<const double>(out.witness.x));
    if (std::abs(out.value) <= tol * scale) out.value = 0;
  }
  return out;
}

CopositivityClass copositivity_class_numeric(const FloatMat& m, double tol) {
  const double v = simplex_minimize_numeric(m, tol).value;
  const double band = tol * scale_of(m);
  if (v > band) return CopositivityClass::StrictlyCopositive;
  if (v >= -band) return CopositivityClass::Boundary;
  return CopositivityClass::NotCopositive;
}

NumericZeroSet zeros_in_simplex_numeric(const FloatMat& m, double tol) {
  const std::size_t n = m.size();
  check_cap(n);
  const double band = tol * scale_of(m);
  NumericZeroSet z;
  std::vector<std::pair<std::vector<std::size_t>, std::size_t>> wide;
  for_each_support(n, [&](const std::vector<std::size_t>& s) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub_dense(m, s));
    const Eigen::VectorXd& ev = es.eigenvalues();
    if (ev(0) < -band) return false;
    std::size_t dim = 0;
    while (dim < s.size() && ev(static_cast<Eigen::Index>(dim)) <= band) ++dim;
    if (dim == 1) {
      Eigen::VectorXd v = es.eigenvectors().col(0);
      if (v.sum() < 0) v = -v;
      if (v.minCoeff() > std::sqrt(tol)) z.finite_zeros.push_back(embed_numeric(v / v.sum(), s, n));
    } else if (dim >= 2) {
      wide.emplace_back(s, dim);
    }
    return true;
  });
  for (const auto& [s, dim] : wide) {
    std::vector<bool> covered(n, false);
    for (const auto& p : z.finite_zeros) {
      if (!is_subset(p.support, s)) continue;
      double worst = 0;
      for (std::size_t i : s) {
        double acc = 0;
        for (std::size_t j : p.support) acc += m(i, j) * p.x[j];
        worst = std::max(worst, std::abs(acc));
      }
      if (worst > std::sqrt(band)) continue;
      for (std::size_t i : p.support) covered[i] = true;
    }
    bool all = true;
    for (std::size_t i : s) all = all && covered[i];
    if (all) z.infinite_families.push_back({s, dim - 1});
  }
  z.is_finite = z.infinite_families.empty();
  return z;
}

NumericSccEntry scc_at(const FloatMat& m, const std::vector<double>& u, double threshold, double support_tol) {
  if (u.size() != m.size()) throw std::invalid_argument("scc_at: dimension mismatch");
  NumericSccEntry e;
  e.zero.x = u;
  for (std::size_t i = 0; i < u.size(); ++i)
    if (u[i] > support_tol) e.zero.support.push_back(i);
  e.holds = true;
  e.min_off_support = std::numeric_limits<double>::infinity();
  std::vector<double> mu = m.apply(std::span<const double>(u));
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] > support_tol) continue;
    e.min_off_support = std::min(e.min_off_support, mu[i]);
    if (mu[i] <= threshold) e.holds = false;
  }
  return e;
}

std::vector<NumericSccEntry> check_scc_numeric(const FloatMat& m, double tol, double threshold) {
  NumericZeroSet z = zeros_in_simplex_numeric(m, tol);
  if (!z.is_finite) throw std::invalid_argument("SCC check needs a finite zero set");
  std::vector<NumericSccEntry> out;
  for (const auto& p : z.finite_zeros) out.push_back(scc_at(m, p.x, threshold));
  return out;
}

}  // namespace copkit
