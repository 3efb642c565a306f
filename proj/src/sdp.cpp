#include "copkit/sdp.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace copkit {

std::size_t SdpProblem::add_block(std::size_t size) {
  if (size == 0) throw std::invalid_argument("PSD block size must be at least 1");
  blocks_.push_back(size);
  return blocks_.size() - 1;
}

std::size_t SdpProblem::add_nonneg(std::size_t count) {
  std::size_t first = nonneg_;
  nonneg_ += count;
  return first;
}

std::size_t SdpProblem::add_free(std::size_t count) {
  std::size_t first = free_;
  free_ += count;
  return first;
}

void SdpProblem::check(const LinearFunctional& f) const {
  for (const auto& t : f.blocks) {
    if (t.block >= blocks_.size()) throw std::invalid_argument("functional references an undeclared block");
    if (t.i >= blocks_[t.block] || t.j >= blocks_[t.block])
      throw std::invalid_argument("functional references an entry outside its block");
  }
  for (const auto& t : f.nonneg)
    if (t.index >= nonneg_) throw std::invalid_argument("functional references an undeclared nonnegative scalar");
  for (const auto& t : f.free)
    if (t.index >= free_) throw std::invalid_argument("functional references an undeclared free scalar");
}

void SdpProblem::add_constraint(LinearFunctional f, double rhs) {
  for (auto& t : f.blocks)
    if (t.i > t.j) std::swap(t.i, t.j);
  rows_.push_back(std::move(f));
  rhs_.push_back(rhs);
}

void SdpProblem::set_objective(LinearFunctional f, Sense sense) {
  for (auto& t : f.blocks)
    if (t.i > t.j) std::swap(t.i, t.j);
  objective_ = std::move(f);
  sense_ = sense;
}

void SdpProblem::validate() const {
  for (const auto& r : rows_) check(r);
  check(objective_);
}

void SdpProblem::dump(std::ostream& os) const {
  os << "sdp blocks";
  for (auto b : blocks_) os << " " << b;
  os << " nonneg " << nonneg_ << " free " << free_ << " rows " << rows_.size() << "\n";
  auto emit = [&](const LinearFunctional& f) {
    os << " |";
    for (const auto& t : f.blocks) os << " " << t.block << ":" << t.i << ":" << t.j << ":" << t.coef;
    os << " |";
    for (const auto& t : f.nonneg) os << " n:" << t.index << ":" << t.coef;
    os << " |";
    for (const auto& t : f.free) os << " f:" << t.index << ":" << t.coef;
    os << "\n";
  };
  for (std::size_t k = 0; k < rows_.size(); ++k) {
    os.precision(17);
    os << rhs_[k];
    emit(rows_[k]);
  }
  os << (sense_ == Sense::Minimize ? "min" : "max");
  emit(objective_);
}

std::string to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return "optimal";
    case SdpStatus::MaxIterations: return "max_iterations";
    case SdpStatus::NumericalFailure: return "numerical_failure";
    case SdpStatus::Inconsistent: return "inconsistent_constraints";
  }
  return "unknown";
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Entry {
  std::size_t i, j;
  double coef;  // functional coefficient on X_ij (i <= j)
};

// Constraint data regrouped per block for the solver.
struct Data {
  std::vector<std::size_t> sizes;
  std::size_t m = 0, ns = 0, nf = 0;
  std::vector<std::vector<std::vector<Entry>>> a;  // a[b][k]
  std::vector<std::vector<std::size_t>> touching;  // rows with entries in block b
  MatrixXd as, af;                                 // m x ns, m x nf
  VectorXd b;
  std::vector<MatrixXd> c;
  VectorXd cs, cf;
  std::vector<std::size_t> kept;  // original row index of each kept row
  double obj_sign = 1;
};

MatrixXd to_dense(const std::vector<Entry>& es, std::size_t n, double scale = 1.0) {
  MatrixXd m = MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (const auto& e : es) {
    if (e.i == e.j)
      m(e.i, e.j) += scale * e.coef;
    else {
      m(e.i, e.j) += 0.5 * scale * e.coef;
      m(e.j, e.i) += 0.5 * scale * e.coef;
    }
  }
  return m;
}

double apply_entries(const std::vector<Entry>& es, const MatrixXd& x) {
  double s = 0;
  for (const auto& e : es) s += e.coef * x(e.i, e.j);
  return s;
}

// Incremental sparse Gaussian elimination; returns the indices of an
// independent subset of rows, or flags inconsistency.
struct Presolve {
  std::vector<std::size_t> kept;
  bool inconsistent = false;
};

Presolve presolve(const SdpProblem& p) {
  std::vector<std::size_t> offset(p.block_sizes().size());
  std::size_t nvar = 0;
  for (std::size_t b = 0; b < p.block_sizes().size(); ++b) {
    offset[b] = nvar;
    nvar += p.block_sizes()[b] * p.block_sizes()[b];
  }
  const std::size_t nonneg_off = nvar;
  const std::size_t free_off = nonneg_off + p.nonneg_count();

  using Row = std::map<std::size_t, double>;
  struct Pivot {
    Row row;
    double rhs;
    std::size_t col;
  };
  std::vector<Pivot> pivots;
  Presolve out;
  for (std::size_t k = 0; k < p.constraint_count(); ++k) {
    Row r;
    const auto& f = p.rows()[k];
    for (const auto& t : f.blocks) r[offset[t.block] + t.i * p.block_sizes()[t.block] + t.j] += t.coef;
    for (const auto& t : f.nonneg) r[nonneg_off + t.index] += t.coef;
    for (const auto& t : f.free) r[free_off + t.index] += t.coef;
    double rhs = p.rhs()[k];
    double norm0 = 0;
    for (auto& [c, v] : r) norm0 = std::max(norm0, std::abs(v));
    for (const auto& pv : pivots) {
      auto it = r.find(pv.col);
      if (it == r.end()) continue;
      double f = it->second / pv.row.at(pv.col);
      for (const auto& [c, v] : pv.row) r[c] -= f * v;
      rhs -= f * pv.rhs;
      r.erase(pv.col);
    }
    double best = 0;
    std::size_t col = 0;
    for (auto& [c, v] : r)
      if (std::abs(v) > best) best = std::abs(v), col = c;
    if (best <= 1e-10 * std::max(norm0, 1e-300)) {
      if (std::abs(rhs) > 1e-9 * (1 + std::abs(p.rhs()[k]))) out.inconsistent = true;
      continue;
    }
    for (auto it = r.begin(); it != r.end();)
      it = std::abs(it->second) <= 1e-14 * best ? r.erase(it) : std::next(it);
    pivots.push_back({std::move(r), rhs, col});
    out.kept.push_back(k);
  }
  return out;
}

Data prepare(const SdpProblem& p, const std::vector<std::size_t>& kept) {
  Data d;
  d.sizes = p.block_sizes();
  d.m = kept.size();
  d.ns = p.nonneg_count();
  d.nf = p.free_count();
  d.kept = kept;
  const std::size_t nb = d.sizes.size();
  d.a.assign(nb, std::vector<std::vector<Entry>>(d.m));
  d.touching.assign(nb, {});
  d.as = MatrixXd::Zero(d.m, d.ns);
  d.af = MatrixXd::Zero(d.m, d.nf);
  d.b = VectorXd::Zero(d.m);
  for (std::size_t k = 0; k < d.m; ++k) {
    const auto& f = p.rows()[kept[k]];
    d.b(k) = p.rhs()[kept[k]];
    for (const auto& t : f.blocks) d.a[t.block][k].push_back({t.i, t.j, t.coef});
    for (const auto& t : f.nonneg) d.as(k, t.index) += t.coef;
    for (const auto& t : f.free) d.af(k, t.index) += t.coef;
  }
  for (std::size_t b = 0; b < nb; ++b)
    for (std::size_t k = 0; k < d.m; ++k)
      if (!d.a[b][k].empty()) d.touching[b].push_back(k);

  d.obj_sign = p.sense() == Sense::Maximize ? -1.0 : 1.0;
  std::vector<std::vector<Entry>> cobj(nb);
  for (const auto& t : p.objective().blocks) cobj[t.block].push_back({t.i, t.j, t.coef});
  for (std::size_t b = 0; b < nb; ++b) d.c.push_back(to_dense(cobj[b], d.sizes[b], d.obj_sign));
  d.cs = VectorXd::Zero(d.ns);
  d.cf = VectorXd::Zero(d.nf);
  for (const auto& t : p.objective().nonneg) d.cs(t.index) += d.obj_sign * t.coef;
  for (const auto& t : p.objective().free) d.cf(t.index) += d.obj_sign * t.coef;
  return d;
}

struct Iterate {
  std::vector<MatrixXd> x, z;
  VectorXd xs, zs, xf, y;
};

VectorXd primal_map(const Data& d, const Iterate& it) {
  VectorXd out = d.as * it.xs + d.af * it.xf;
  for (std::size_t b = 0; b < d.sizes.size(); ++b)
    for (std::size_t k : d.touching[b]) out(k) += apply_entries(d.a[b][k], it.x[b]);
  return out;
}

MatrixXd adjoint_block(const Data& d, std::size_t b, const VectorXd& y) {
  MatrixXd out = MatrixXd::Zero(d.sizes[b], d.sizes[b]);
  for (std::size_t k : d.touching[b]) {
    for (const auto& e : d.a[b][k]) {
      if (e.i == e.j)
        out(e.i, e.i) += y(k) * e.coef;
      else {
        out(e.i, e.j) += 0.5 * y(k) * e.coef;
        out(e.j, e.i) += 0.5 * y(k) * e.coef;
      }
    }
  }
  return out;
}

struct Scaling {
  MatrixXd g, ginv, w;
  VectorXd v;
};

bool nt_scaling(const MatrixXd& x, const MatrixXd& z, Scaling& s) {
  Eigen::LLT<MatrixXd> llt(x);
  if (llt.info() != Eigen::Success) return false;
  MatrixXd l = llt.matrixL();
  MatrixXd r = l.transpose() * z * l;
  r = 0.5 * (r + r.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(r);
  if (es.info() != Eigen::Success) return false;
  VectorXd lam = es.eigenvalues();
  if (lam.minCoeff() <= 0) return false;
  const MatrixXd& q = es.eigenvectors();
  VectorXd qr = lam.array().pow(-0.25);
  s.g = l * q * qr.asDiagonal();
  MatrixXd linv = l.triangularView<Eigen::Lower>().solve(MatrixXd::Identity(x.rows(), x.cols()));
  s.ginv = lam.array().pow(0.25).matrix().asDiagonal() * q.transpose() * linv;
  s.w = s.g * s.g.transpose();
  s.w = 0.5 * (s.w + s.w.transpose());
  s.v = lam.array().sqrt();
  return true;
}

// Largest alpha with x + alpha dx PSD (capped at a large value).
double max_step(const MatrixXd& x, const MatrixXd& dx) {
  Eigen::LLT<MatrixXd> llt(x);
  if (llt.info() != Eigen::Success) return 0;
  MatrixXd l = llt.matrixL();
  MatrixXd t = l.triangularView<Eigen::Lower>().solve(dx);
  t = l.triangularView<Eigen::Lower>().solve(t.transpose()).transpose();
  t = 0.5 * (t + t.transpose());
  double lmin = Eigen::SelfAdjointEigenSolver<MatrixXd>(t, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  return lmin >= 0 ? 1e30 : -1.0 / lmin;
}

double max_step(const VectorXd& x, const VectorXd& dx) {
  double a = 1e30;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (dx(i) < 0) a = std::min(a, -x(i) / dx(i));
  return a;
}

double inner(const MatrixXd& a, const MatrixXd& b) { return (a.array() * b.array()).sum(); }

struct Measures {
  double pobj, dobj, relp, reld, relgap, mu;
};

Measures measure(const Data& d, const Iterate& it, VectorXd& rp, std::vector<MatrixXd>& rd, VectorXd& rds,
                 VectorXd& rdf) {
  Measures m{};
  rp = d.b - primal_map(d, it);
  double dnorm2 = 0, cnorm2 = 0, comp = 0;
  std::size_t dim = d.ns;
  m.pobj = d.cs.dot(it.xs) + d.cf.dot(it.xf);
  for (std::size_t b = 0; b < d.sizes.size(); ++b) {
    rd[b] = d.c[b] - adjoint_block(d, b, it.y) - it.z[b];
    dnorm2 += rd[b].squaredNorm();
    cnorm2 += d.c[b].squaredNorm();
    comp += inner(it.x[b], it.z[b]);
    m.pobj += inner(d.c[b], it.x[b]);
    dim += d.sizes[b];
  }
  rds = d.cs - d.as.transpose() * it.y - it.zs;
  rdf = d.cf - d.af.transpose() * it.y;
  dnorm2 += rds.squaredNorm() + rdf.squaredNorm();
  cnorm2 += d.cs.squaredNorm() + d.cf.squaredNorm();
  comp += it.xs.dot(it.zs);
  m.dobj = d.b.dot(it.y);
  m.relp = rp.norm() / (1 + d.b.norm());
  m.reld = std::sqrt(dnorm2) / (1 + std::sqrt(cnorm2));
  m.relgap = std::abs(m.pobj - m.dobj) / (1 + std::abs(m.pobj) + std::abs(m.dobj));
  m.mu = dim > 0 ? comp / static_cast<double>(dim) : 0;
  return m;
}

}  // namespace

Residuals residuals(const SdpProblem& p, const SdpSolution& s) {
  const auto& sizes = p.block_sizes();
  if (s.blocks.size() != sizes.size() || s.nonneg.size() != p.nonneg_count() || s.free.size() != p.free_count())
    throw std::invalid_argument("solution shape does not match problem");
  for (std::size_t b = 0; b < sizes.size(); ++b)
    if (s.blocks[b].size() != sizes[b]) throw std::invalid_argument("solution block size does not match problem");
  const bool have_dual = s.dual.size() == p.constraint_count() && s.dual_blocks.size() == sizes.size() &&
                         s.dual_nonneg.size() == p.nonneg_count();

  auto value = [&](const LinearFunctional& f) {
    double v = 0;
    for (const auto& t : f.blocks) v += t.coef * s.blocks[t.block](t.i, t.j);
    for (const auto& t : f.nonneg) v += t.coef * s.nonneg[t.index];
    for (const auto& t : f.free) v += t.coef * s.free[t.index];
    return v;
  };

  Residuals r;
  double rp2 = 0, b2 = 0;
  for (std::size_t k = 0; k < p.constraint_count(); ++k) {
    double e = p.rhs()[k] - value(p.rows()[k]);
    rp2 += e * e;
    b2 += p.rhs()[k] * p.rhs()[k];
  }
  r.primal = std::sqrt(rp2) / (1 + std::sqrt(b2));
  const double sign = p.sense() == Sense::Maximize ? -1.0 : 1.0;
  const double pobj = sign * value(p.objective());
  if (!have_dual) {
    r.dual = std::numeric_limits<double>::infinity();
    r.gap = std::numeric_limits<double>::infinity();
    return r;
  }
  // Dual residual c - A^T y - z, accumulated in the functional coordinates.
  std::vector<MatrixXd> rd;
  for (std::size_t b = 0; b < sizes.size(); ++b) {
    MatrixXd z(sizes[b], sizes[b]);
    for (std::size_t i = 0; i < sizes[b]; ++i)
      for (std::size_t j = 0; j < sizes[b]; ++j) z(i, j) = s.dual_blocks[b](i, j);
    rd.push_back(-z);
  }
  std::vector<double> rds(p.nonneg_count()), rdf(p.free_count(), 0.0);
  for (std::size_t k = 0; k < p.nonneg_count(); ++k) rds[k] = -s.dual_nonneg[k];
  auto add_matrix = [&](const LinearFunctional& f, double w) {
    for (const auto& t : f.blocks) {
      if (t.i == t.j)
        rd[t.block](t.i, t.i) += w * t.coef;
      else {
        rd[t.block](t.i, t.j) += 0.5 * w * t.coef;
        rd[t.block](t.j, t.i) += 0.5 * w * t.coef;
      }
    }
    for (const auto& t : f.nonneg) rds[t.index] += w * t.coef;
    for (const auto& t : f.free) rdf[t.index] += w * t.coef;
  };
  add_matrix(p.objective(), sign);
  double c2 = 0;
  {
    std::vector<MatrixXd> cm;
    LinearFunctional o = p.objective();
    for (std::size_t b = 0; b < sizes.size(); ++b) cm.push_back(MatrixXd::Zero(sizes[b], sizes[b]));
    for (const auto& t : o.blocks) {
      if (t.i == t.j)
        cm[t.block](t.i, t.i) += t.coef;
      else {
        cm[t.block](t.i, t.j) += 0.5 * t.coef;
        cm[t.block](t.j, t.i) += 0.5 * t.coef;
      }
    }
    for (const auto& m : cm) c2 += m.squaredNorm();
    for (const auto& t : o.nonneg) c2 += t.coef * t.coef;
    for (const auto& t : o.free) c2 += t.coef * t.coef;
  }
  double dobj = 0;
  for (std::size_t k = 0; k < p.constraint_count(); ++k) {
    add_matrix(p.rows()[k], -s.dual[k]);
    dobj += p.rhs()[k] * s.dual[k];
  }
  double d2 = 0;
  for (const auto& m : rd) d2 += m.squaredNorm();
  for (double v : rds) d2 += v * v;
  for (double v : rdf) d2 += v * v;
  r.dual = std::sqrt(d2) / (1 + std::sqrt(c2));
  r.gap = std::abs(pobj - dobj) / (1 + std::abs(pobj) + std::abs(dobj));
  return r;
}

SdpSolution solve(const SdpProblem& p, const SdpConfig& cfg) {
  p.validate();
  SdpSolution sol;
  const auto& sizes = p.block_sizes();
  const std::size_t nb = sizes.size();
  if (nb == 0 && p.nonneg_count() == 0 && p.free_count() == 0)
    throw std::invalid_argument("SDP has no variables");

  auto fill_shapes = [&]() {
    sol.blocks.clear();
    sol.dual_blocks.clear();
    for (auto n : sizes) {
      sol.blocks.emplace_back(n);
      sol.dual_blocks.emplace_back(n);
    }
    sol.nonneg.assign(p.nonneg_count(), 0.0);
    sol.dual_nonneg.assign(p.nonneg_count(), 0.0);
    sol.free.assign(p.free_count(), 0.0);
    sol.dual.assign(p.constraint_count(), 0.0);
  };

  Presolve pre = presolve(p);
  sol.dropped_rows = p.constraint_count() - pre.kept.size();
  if (pre.inconsistent) {
    fill_shapes();
    sol.status = SdpStatus::Inconsistent;
    sol.message = "equality constraints are inconsistent";
    sol.residuals = residuals(p, sol);
    return sol;
  }
  const Data d = prepare(p, pre.kept);

  // Scaled-identity start.
  double bmax = 0, amax = 0, cmax = 0;
  for (Eigen::Index k = 0; k < d.b.size(); ++k) bmax = std::max(bmax, std::abs(d.b(k)));
  for (std::size_t b = 0; b < nb; ++b) {
    cmax = std::max(cmax, d.c[b].cwiseAbs().maxCoeff());
    for (std::size_t k : d.touching[b])
      for (const auto& e : d.a[b][k]) amax = std::max(amax, std::abs(e.coef));
  }
  if (d.ns) amax = std::max(amax, d.as.cwiseAbs().maxCoeff()), cmax = std::max(cmax, d.cs.cwiseAbs().maxCoeff());
  if (d.nf) amax = std::max(amax, d.af.cwiseAbs().maxCoeff()), cmax = std::max(cmax, d.cf.cwiseAbs().maxCoeff());
  std::size_t dim = d.ns;
  for (auto n : sizes) dim += n;
  double xi = 1 + std::max({bmax, amax, cmax});
  double eta = xi;
  if (cfg.seed != 0) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> u(-1e-3, 1e-3);
    xi *= 1 + u(rng);
    eta *= 1 + u(rng);
  }

  Iterate it;
  for (auto n : sizes) {
    it.x.push_back(xi * MatrixXd::Identity(n, n));
    it.z.push_back(eta * MatrixXd::Identity(n, n));
  }
  it.xs = VectorXd::Constant(d.ns, xi);
  it.zs = VectorXd::Constant(d.ns, eta);
  it.xf = VectorXd::Zero(d.nf);
  it.y = VectorXd::Zero(d.m);

  std::vector<MatrixXd> rd(nb);
  VectorXd rp, rds, rdf;
  SdpStatus status = SdpStatus::MaxIterations;
  int iter = 0;
  std::string message;
  Iterate best = it;
  double best_score = std::numeric_limits<double>::infinity();
  int best_iter = 0;

  // Orthogonal split of the free columns: Af P = Q [R; 0].
  Eigen::ColPivHouseholderQR<MatrixXd> af_qr;
  MatrixXd range_basis, null_basis, r_top, schur_red;
  Eigen::Index af_rank = 0;
  if (d.nf) {
    af_qr.compute(d.af);
    af_rank = af_qr.rank();
    MatrixXd q = af_qr.householderQ() * MatrixXd::Identity(d.m, d.m);
    range_basis = q.leftCols(af_rank);
    null_basis = q.rightCols(static_cast<Eigen::Index>(d.m) - af_rank);
    r_top = af_qr.matrixR().topLeftCorner(af_rank, af_rank).triangularView<Eigen::Upper>();
  }

  for (;; ++iter) {
    Measures ms = measure(d, it, rp, rd, rds, rdf);
    if (std::getenv("COPKIT_SDP_TRACE"))
      std::fprintf(stderr, "it %d pobj %.10g dobj %.10g relp %.2e reld %.2e gap %.2e mu %.2e\n", iter, ms.pobj,
                   ms.dobj, ms.relp, ms.reld, ms.relgap, ms.mu);
    const double score = std::max({ms.relp / cfg.tol_feas, ms.reld / cfg.tol_feas, ms.relgap / cfg.tol_gap});
    if (score < best_score) {
      best = it;
      best_score = score;
      best_iter = iter;
    }
    if (score <= 1) {
      status = SdpStatus::Optimal;
      break;
    }
    if (iter >= cfg.max_iters) {
      status = SdpStatus::MaxIterations;
      break;
    }
    if (iter - best_iter >= 10) {
      status = SdpStatus::NumericalFailure;
      message = "no progress";
      break;
    }
    double xnorm = it.xs.size() ? it.xs.cwiseAbs().maxCoeff() : 0.0;
    for (const auto& x : it.x) xnorm = std::max(xnorm, x.cwiseAbs().maxCoeff());
    if (!std::isfinite(xnorm) || xnorm > 1e13 || (it.y.size() && it.y.cwiseAbs().maxCoeff() > 1e13)) {
      status = SdpStatus::NumericalFailure;
      message = "iterates diverged";
      break;
    }

    std::vector<Scaling> sc(nb);
    bool ok = true;
    for (std::size_t b = 0; b < nb && ok; ++b) ok = nt_scaling(it.x[b], it.z[b], sc[b]);
    if (!ok) {
      status = SdpStatus::NumericalFailure;
      message = "lost positive definiteness in scaling";
      break;
    }

    // Schur complement.
    MatrixXd schur = MatrixXd::Zero(d.m, d.m);
    for (std::size_t b = 0; b < nb; ++b) {
      const MatrixXd& w = sc[b].w;
      for (std::size_t k : d.touching[b]) {
        MatrixXd bk = MatrixXd::Zero(sizes[b], sizes[b]);
        for (const auto& e : d.a[b][k]) {
          if (e.i == e.j)
            bk.noalias() += e.coef * w.col(e.i) * w.col(e.i).transpose();
          else {
            MatrixXd t = w.col(e.i) * w.col(e.j).transpose();
            bk.noalias() += 0.5 * e.coef * (t + t.transpose());
          }
        }
        for (std::size_t l : d.touching[b]) schur(l, k) += apply_entries(d.a[b][l], bk);
      }
    }
    VectorXd dratio(d.ns);
    for (std::size_t s = 0; s < d.ns; ++s) dratio(s) = it.xs(s) / it.zs(s);
    if (d.ns) schur.noalias() += d.as * dratio.asDiagonal() * d.as.transpose();
    schur = 0.5 * (schur + schur.transpose());
    // With free variables the Schur complement is only positive definite on
    // the null space of Af^T; the Newton system is solved there, with Af
    // split by an orthogonal factorization computed once.
    Eigen::LLT<MatrixXd> llt;
    Eigen::LDLT<MatrixXd> lu;
    MatrixXd mq1;
    if (d.nf) {
      mq1 = schur * range_basis;
      schur_red = null_basis.transpose() * schur * null_basis;
      schur_red = 0.5 * (schur_red + schur_red.transpose());
    }
    const MatrixXd& target = d.nf ? schur_red : schur;
    llt.compute(target);
    // Numerically semidefinite near the optimum: fall back to pivoted LDL^T.
    if (llt.info() != Eigen::Success) lu.compute(target);
    const bool use_llt = llt.info() == Eigen::Success;

    // Solves the Newton system for the given complementarity targets.
    struct Dir {
      std::vector<MatrixXd> dx, dz;
      VectorXd dxs, dzs, dxf, dy;
    };
    auto direction = [&](const std::vector<MatrixXd>& rhs_c, const VectorXd& rc) {
      Dir dir;
      std::vector<MatrixXd> gkg(nb);
      VectorXd h = rp;
      for (std::size_t b = 0; b < nb; ++b) {
        const auto& s = sc[b];
        const Eigen::Index n = static_cast<Eigen::Index>(sizes[b]);
        MatrixXd kmat(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
          for (Eigen::Index j = 0; j < n; ++j) kmat(i, j) = 2.0 * rhs_c[b](i, j) / (s.v(i) + s.v(j));
        gkg[b] = s.g * kmat * s.g.transpose();
        MatrixXd t = gkg[b] - s.w * rd[b] * s.w;
        for (std::size_t k : d.touching[b]) h(k) -= apply_entries(d.a[b][k], t);
      }
      VectorXd rc_over_z(d.ns);
      for (std::size_t s = 0; s < d.ns; ++s) rc_over_z(s) = rc(s) / it.zs(s);
      if (d.ns) h -= d.as * (rc_over_z - dratio.cwiseProduct(rds));
      // [M Af; Af^T 0] [dy; dxf] = [h; rdf], with two rounds of iterative
      // refinement.
      auto reduced_solve = [&](const VectorXd& r) -> VectorXd {
        if (use_llt) return llt.solve(r);
        return lu.solve(r);
      };
      auto block_solve = [&](const VectorXd& r1, const VectorXd& r2, VectorXd& dy, VectorXd& dxf) {
        if (d.nf == 0) {
          dy = reduced_solve(r1);
          dxf = VectorXd::Zero(0);
          return;
        }
        // Af^T dy = r2 fixes the range component v of dy.
        const VectorXd pr2 = af_qr.colsPermutation().transpose() * r2;
        VectorXd v = r_top.transpose().triangularView<Eigen::Lower>().solve(pr2.head(af_rank));
        VectorXd u = reduced_solve(null_basis.transpose() * r1 - null_basis.transpose() * (mq1 * v));
        dy = range_basis * v + null_basis * u;
        VectorXd w = r_top.triangularView<Eigen::Upper>().solve(range_basis.transpose() * (r1 - schur * dy));
        VectorXd full = VectorXd::Zero(d.nf);
        full.head(af_rank) = w;
        dxf = af_qr.colsPermutation() * full;
      };
      block_solve(h, rdf, dir.dy, dir.dxf);
      for (int refine = 0; refine < 2; ++refine) {
        VectorXd e1 = h - schur * dir.dy - d.af * dir.dxf;
        VectorXd e2 = rdf - d.af.transpose() * dir.dy;
        VectorXd cy, cx;
        block_solve(e1, e2, cy, cx);
        dir.dy += cy;
        dir.dxf += cx;
      }
      for (std::size_t b = 0; b < nb; ++b) {
        MatrixXd dzb = rd[b] - adjoint_block(d, b, dir.dy);
        MatrixXd dxb = gkg[b] - sc[b].w * dzb * sc[b].w;
        dir.dz.push_back(0.5 * (dzb + dzb.transpose()));
        dir.dx.push_back(0.5 * (dxb + dxb.transpose()));
      }
      dir.dzs = rds - d.as.transpose() * dir.dy;
      dir.dxs = rc_over_z - dratio.cwiseProduct(dir.dzs);
      if (d.nf) {
        // Free components from the primal equations rather than from M dy,
        // which loses accuracy as the scaling degenerates.
        VectorXd res = rp - d.as * dir.dxs;
        for (std::size_t b = 0; b < nb; ++b)
          for (std::size_t k : d.touching[b]) res(k) -= apply_entries(d.a[b][k], dir.dx[b]);
        VectorXd w = r_top.triangularView<Eigen::Upper>().solve(range_basis.transpose() * res);
        VectorXd full = VectorXd::Zero(d.nf);
        full.head(af_rank) = w;
        dir.dxf = af_qr.colsPermutation() * full;
      }
      return dir;
    };
    auto steps = [&](const Dir& dir, double& ap, double& ad) {
      ap = max_step(it.xs, dir.dxs);
      ad = max_step(it.zs, dir.dzs);
      for (std::size_t b = 0; b < nb; ++b) {
        ap = std::min(ap, max_step(it.x[b], dir.dx[b]));
        ad = std::min(ad, max_step(it.z[b], dir.dz[b]));
      }
    };

    // Predictor.
    std::vector<MatrixXd> rc_blocks(nb);
    for (std::size_t b = 0; b < nb; ++b) rc_blocks[b] = -MatrixXd(sc[b].v.array().square().matrix().asDiagonal());
    VectorXd rc = -it.xs.cwiseProduct(it.zs);
    Dir aff = direction(rc_blocks, rc);
    double ap, ad;
    steps(aff, ap, ad);
    ap = std::min(1.0, ap);
    ad = std::min(1.0, ad);
    double comp_aff = (it.xs + ap * aff.dxs).dot(it.zs + ad * aff.dzs);
    for (std::size_t b = 0; b < nb; ++b) comp_aff += inner(it.x[b] + ap * aff.dx[b], it.z[b] + ad * aff.dz[b]);
    const double mu = ms.mu;
    double sigma = mu > 0 ? std::pow(std::max(0.0, comp_aff / static_cast<double>(dim)) / mu, 3) : 0.0;
    sigma = std::clamp(sigma, 0.0, 1.0);

    // Corrector.
    for (std::size_t b = 0; b < nb; ++b) {
      const auto& s = sc[b];
      MatrixXd dxt = s.ginv * aff.dx[b] * s.ginv.transpose();
      MatrixXd dzt = s.g.transpose() * aff.dz[b] * s.g;
      MatrixXd hprod = 0.5 * (dxt * dzt + dzt * dxt);
      rc_blocks[b] = sigma * mu * MatrixXd::Identity(sizes[b], sizes[b]) -
                     MatrixXd(s.v.array().square().matrix().asDiagonal()) - hprod;
    }
    rc = VectorXd::Constant(d.ns, sigma * mu) - it.xs.cwiseProduct(it.zs) - aff.dxs.cwiseProduct(aff.dzs);
    Dir cor = direction(rc_blocks, rc);
    steps(cor, ap, ad);
    const double gamma = 0.95;
    ap = std::min(1.0, gamma * ap);
    ad = std::min(1.0, gamma * ad);

    for (std::size_t b = 0; b < nb; ++b) {
      it.x[b] += ap * cor.dx[b];
      it.z[b] += ad * cor.dz[b];
    }
    it.xs += ap * cor.dxs;
    it.xf += ap * cor.dxf;
    it.zs += ad * cor.dzs;
    it.y += ad * cor.dy;
  }

  // Numerical trouble near the end of the path: fall back to the best iterate
  // seen, which may still meet the tolerances.
  if (status != SdpStatus::Optimal && best_score < std::numeric_limits<double>::infinity()) {
    it = best;
    if (best_score <= 1) {
      status = SdpStatus::Optimal;
      message.clear();
    }
  }

  fill_shapes();
  for (std::size_t b = 0; b < nb; ++b)
    for (std::size_t i = 0; i < sizes[b]; ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        sol.blocks[b].set(i, j, 0.5 * (it.x[b](i, j) + it.x[b](j, i)));
        sol.dual_blocks[b].set(i, j, 0.5 * (it.z[b](i, j) + it.z[b](j, i)));
      }
  for (std::size_t s = 0; s < d.ns; ++s) {
    sol.nonneg[s] = it.xs(s);
    sol.dual_nonneg[s] = it.zs(s);
  }
  for (std::size_t f = 0; f < d.nf; ++f) sol.free[f] = it.xf(f);
  for (std::size_t k = 0; k < d.m; ++k) sol.dual[d.kept[k]] = it.y(k);

  double pobj = d.cs.dot(it.xs) + d.cf.dot(it.xf);
  for (std::size_t b = 0; b < nb; ++b) pobj += inner(d.c[b], it.x[b]);
  sol.objective = d.obj_sign * pobj;
  sol.dual_objective = d.obj_sign * d.b.dot(it.y);
  sol.status = status;
  sol.iterations = iter;
  sol.message = message;
  sol.residuals = residuals(p, sol);
  return sol;
}


double default_trace_cap(const SdpProblem& p, const std::vector<std::size_t>& margin_blocks) {
  std::size_t dim = 0;
  if (margin_blocks.empty())
    for (auto n : p.block_sizes()) dim += n;
  for (auto b : margin_blocks) dim += b < p.block_sizes().size() ? p.block_sizes()[b] : 0;
  double rhs_max = 0;
  for (double r : p.rhs()) rhs_max = std::max(rhs_max, std::abs(r));
  return 1e3 * static_cast<double>(dim) * (1 + rhs_max);
}

MarginResult margin_maximize(const SdpProblem& p, const std::vector<std::size_t>& margin_blocks,
                             const SdpConfig& cfg, double trace_cap) {
  p.validate();
  std::vector<bool> shifted(p.block_sizes().size(), margin_blocks.empty());
  for (auto b : margin_blocks) {
    if (b >= shifted.size()) throw std::invalid_argument("margin block index out of range");
    shifted[b] = true;
  }
  std::size_t shifted_dim = 0;
  for (std::size_t b = 0; b < shifted.size(); ++b)
    if (shifted[b]) shifted_dim += p.block_sizes()[b];
  if (shifted_dim == 0) throw std::invalid_argument("margin problem needs at least one PSD block");

  SdpProblem q;
  for (auto n : p.block_sizes()) q.add_block(n);
  q.add_nonneg(p.nonneg_count());
  q.add_free(p.free_count());
  const std::size_t lam = q.add_free();
  const std::size_t cap_slack = q.add_nonneg();

  if (trace_cap <= 0) trace_cap = default_trace_cap(p, margin_blocks);

  for (std::size_t k = 0; k < p.constraint_count(); ++k) {
    LinearFunctional f = p.rows()[k];
    double lam_coef = 0;
    for (const auto& t : f.blocks)
      if (shifted[t.block] && t.i == t.j) lam_coef += t.coef;
    if (lam_coef != 0) f.free.push_back({lam, lam_coef});
    q.add_constraint(std::move(f), p.rhs()[k]);
  }
  LinearFunctional trace;
  for (std::size_t b = 0; b < shifted.size(); ++b)
    if (shifted[b])
      for (std::size_t i = 0; i < p.block_sizes()[b]; ++i) trace.blocks.push_back({b, i, i, 1.0});
  trace.free.push_back({lam, static_cast<double>(shifted_dim)});
  trace.nonneg.push_back({cap_slack, 1.0});
  q.add_constraint(std::move(trace), trace_cap);

  LinearFunctional obj;
  obj.free.push_back({lam, 1.0});
  q.set_objective(std::move(obj), Sense::Maximize);

  SdpSolution s = solve(q, cfg);
  MarginResult out;
  out.trace_cap = trace_cap;
  if (!s.dual.empty()) out.cap_dual = s.dual.back();
  if (s.status == SdpStatus::Inconsistent) {
    out.margin = -std::numeric_limits<double>::infinity();
  } else {
    out.margin = s.free[lam];
  }
  // Report the original variables G' = G + lambda I.
  SdpSolution& r = out.solution;
  r.status = s.status;
  r.iterations = s.iterations;
  r.message = s.message;
  r.dropped_rows = s.dropped_rows;
  r.objective = out.margin;
  r.dual_objective = s.dual_objective;
  r.blocks = s.blocks;
  r.dual_blocks = s.dual_blocks;
  for (std::size_t b = 0; b < shifted.size(); ++b)
    if (shifted[b] && std::isfinite(out.margin))
      for (std::size_t i = 0; i < p.block_sizes()[b]; ++i) r.blocks[b].at(i, i) += out.margin;
  r.nonneg.assign(s.nonneg.begin(), s.nonneg.begin() + static_cast<std::ptrdiff_t>(p.nonneg_count()));
  r.dual_nonneg.assign(s.dual_nonneg.begin(), s.dual_nonneg.begin() + static_cast<std::ptrdiff_t>(p.nonneg_count()));
  r.free.assign(s.free.begin(), s.free.begin() + static_cast<std::ptrdiff_t>(p.free_count()));
  r.dual.assign(s.dual.begin(), s.dual.begin() + static_cast<std::ptrdiff_t>(p.constraint_count()));
  r.residuals = s.residuals;
  return out;
}

}  // namespace copkit
