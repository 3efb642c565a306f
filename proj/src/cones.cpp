#include "copkit/cones.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>

#include "conic_system.hpp"

namespace copkit {

using detail::ConicPoint;
using detail::ConicSystem;
using detail::ExactTerm;
using detail::IdentityBuilder;
using detail::VarKind;

std::string to_string(Decision d) {
  switch (d) {
    case Decision::Yes: return "YES";
    case Decision::No: return "NO";
    case Decision::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

std::string to_string(ConeKind k) {
  switch (k) {
    case ConeKind::Polya: return "c";
    case ConeKind::Spn: return "spn";
    case ConeKind::K1: return "k1";
    case ConeKind::Kr: return "k";
    case ConeKind::Qr: return "q";
    case ConeKind::Lasserre: return "las";
    case ConeKind::Sos: return "sos";
  }
  return "?";
}

ConeKind parse_cone_kind(const std::string& s) {
  if (s == "c" || s == "polya") return ConeKind::Polya;
  if (s == "spn" || s == "k0") return ConeKind::Spn;
  if (s == "k1") return ConeKind::K1;
  if (s == "k" || s == "kr") return ConeKind::Kr;
  if (s == "q" || s == "qr") return ConeKind::Qr;
  if (s == "las") return ConeKind::Lasserre;
  if (s == "sos") return ConeKind::Sos;
  throw std::invalid_argument("unknown cone '" + s + "'");
}

Polynomial kr_target(const RatMat& m, unsigned r) {
  return poly_mul(poly_pow(Polynomial::square_sum(m.size()), r), substitute_squares(quad_form(m)));
}

namespace {

// Number of monomials of degree d in n variables, saturating at `limit`.
std::size_t monomial_count(std::size_t n, unsigned d, std::size_t limit) {
  if (n == 0) return d == 0 ? 1 : 0;
  // C(n - 1 + d, d) built up term by term; stays exact while below the limit.
  long double c = 1;
  for (unsigned k = 1; k <= d; ++k) {
    c = c * static_cast<long double>(n - 1 + k) / k;
    if (c > static_cast<long double>(limit)) return limit + 1;
  }
  return static_cast<std::size_t>(c + 0.5L);
}

void check_count_cap(std::size_t count, std::size_t cap, const std::string& what) {
  if (count > cap)
    throw std::length_error(what + " exceeds the cap of " + std::to_string(cap));
}

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Formulation {
  ConicSystem sys;
  std::function<Certificate(const ConicPoint&, bool exact)> to_cert;
  std::function<ConicPoint(const Certificate&)> to_point;
};

ExactTerm block_term(std::size_t b, std::size_t i, std::size_t j, Rational c) {
  return {VarKind::Block, b, std::min(i, j), std::max(i, j), std::move(c)};
}
ExactTerm nonneg_term(std::size_t k, Rational c) { return {VarKind::Nonneg, k, 0, 0, std::move(c)}; }

std::size_t tri_index(std::size_t n, std::size_t i, std::size_t j) {
  if (i > j) std::swap(i, j);
  return i * n - i * (i - 1) / 2 + (j - i);  // row-major upper triangle
}

Formulation spn_formulation(const RatMat& m) {
  const std::size_t n = m.size();
  Formulation f;
  const std::size_t p = f.sys.add_block(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const std::size_t s = f.sys.add_nonneg();
      f.sys.add_row({block_term(p, i, j, 1), nonneg_term(s, 1)}, m(i, j));
    }
  f.to_cert = [n](const ConicPoint& x, bool exact) {
    Certificate c;
    c.cone = ConeKind::Spn;
    c.exact = exact;
    c.p = x.blocks[0];
    c.n = RatMat(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) c.n.set(i, j, x.nonneg[tri_index(n, i, j)]);
    return c;
  };
  f.to_point = [n](const Certificate& c) {
    ConicPoint x;
    x.blocks.push_back(c.p);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) x.nonneg.push_back(c.n(i, j));
    return x;
  };
  return f;
}

struct Triple {
  std::size_t i, j, k;
};

std::vector<Triple> triples(std::size_t n) {
  std::vector<Triple> t;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) t.push_back({i, j, k});
  return t;
}

Formulation k1_formulation(const RatMat& m) {
  const std::size_t n = m.size();
  Formulation f;
  for (std::size_t i = 0; i < n; ++i) f.sys.add_block(n);
  for (std::size_t i = 0; i < n; ++i) f.sys.add_row({block_term(i, i, i, 1)}, m(i, i));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) f.sys.add_row({block_term(i, i, j, 2), block_term(j, i, i, 1)}, 2 * m(i, j) + m(i, i));
  const auto ts = triples(n);
  for (const auto& t : ts) {
    const std::size_t s = f.sys.add_nonneg();
    f.sys.add_row({block_term(t.i, t.j, t.k, 1), block_term(t.j, t.i, t.k, 1), block_term(t.k, t.i, t.j, 1),
                   nonneg_term(s, 1)},
                  m(t.i, t.j) + m(t.i, t.k) + m(t.j, t.k));
  }
  f.to_cert = [](const ConicPoint& x, bool exact) {
    Certificate c;
    c.cone = ConeKind::K1;
    c.order = 1;
    c.exact = exact;
    c.k1 = x.blocks;
    return c;
  };
  f.to_point = [m, ts](const Certificate& c) {
    ConicPoint x;
    x.blocks = c.k1;
    for (const auto& t : ts)
      x.nonneg.push_back(m(t.i, t.j) + m(t.i, t.k) + m(t.j, t.k) -
                         (c.k1[t.i](t.j, t.k) + c.k1[t.j](t.i, t.k) + c.k1[t.k](t.i, t.j)));
    return x;
  };
  return f;
}

// Groups a basis by exponent parity pattern (stable order within a class).
std::vector<std::vector<Exponent>> parity_classes(const std::vector<Exponent>& basis) {
  std::map<std::uint64_t, std::vector<Exponent>> by_mask;
  std::vector<std::uint64_t> order;
  for (const auto& e : basis) {
    auto mask = e.parity_mask();
    if (!by_mask.count(mask)) order.push_back(mask);
    by_mask[mask].push_back(e);
  }
  std::vector<std::vector<Exponent>> out;
  for (auto mask : order) out.push_back(by_mask[mask]);
  return out;
}

bool all_exponents_even(const Polynomial& p) {
  for (const auto& [e, c] : p.terms())
    for (auto v : e.entries())
      if (v % 2) return false;
  return true;
}

void check_block_cap(std::size_t size, const ConeConfig& cfg) {
  if (size > cfg.max_block)
    throw std::length_error("Gram block of size " + std::to_string(size) + " exceeds the cap of " +
                            std::to_string(cfg.max_block));
}

// Gram-only formulation with unit multipliers (Kr and generic SOS).
Formulation gram_formulation(const Polynomial& target, const std::vector<std::vector<Exponent>>& classes,
                             ConeKind kind, unsigned order, const ConeConfig& cfg) {
  IdentityBuilder b(target.nvars());
  const Polynomial one = Polynomial::constant(target.nvars(), 1);
  for (const auto& cls : classes) {
    check_block_cap(cls.size(), cfg);
    b.add_gram(cls, one);
  }
  Formulation f;
  f.sys = b.finish(target);
  f.to_cert = [classes, one, kind, order, target](const ConicPoint& x, bool exact) {
    Certificate c;
    c.cone = kind;
    c.order = order;
    c.exact = exact;
    for (std::size_t k = 0; k < classes.size(); ++k) c.grams.push_back({one, classes[k], x.blocks[k]});
    if (kind == ConeKind::Sos) c.target = target;
    return c;
  };
  f.to_point = [](const Certificate& c) {
    ConicPoint x;
    for (const auto& g : c.grams) x.blocks.push_back(g.gram);
    return x;
  };
  return f;
}

Formulation kr_formulation(const RatMat& m, unsigned r, const ConeConfig& cfg) {
  // Basis monomials split over at most 2^(n-1) parity classes of the right
  // degree, so some class is at least this large.
  if (m.size() > 0) {
    const std::size_t classes = m.size() > 20 ? std::size_t(1) << 20 : std::size_t(1) << (m.size() - 1);
    const std::size_t total = monomial_count(m.size(), r + 2, cfg.max_block * classes);
    check_count_cap((total + classes - 1) / classes, cfg.max_block, "K^(r) Gram basis for r = " + std::to_string(r));
  }
  auto classes = parity_classes(exponents_of_degree(m.size(), r + 2));
  return gram_formulation(kr_target(m, r), classes, ConeKind::Kr, r, cfg);
}

Formulation sos_formulation(const Polynomial& p, const ConeConfig& cfg) {
  const int d = p.degree();
  if (d < 0 || d % 2) throw std::invalid_argument("SOS test needs a nonzero polynomial of even degree");
  const unsigned half = static_cast<unsigned>(d / 2);
  check_count_cap(monomial_count(p.nvars() + 1, half, cfg.max_block), cfg.max_block, "SOS Gram basis");
  std::vector<Exponent> basis =
      p.is_homogeneous() ? exponents_of_degree(p.nvars(), half) : exponents_up_to_degree(p.nvars(), half);
  std::vector<std::vector<Exponent>> classes;
  if (all_exponents_even(p))
    classes = parity_classes(basis);
  else
    classes = {basis};
  return gram_formulation(p, classes, ConeKind::Sos, 0, cfg);
}

std::vector<Exponent> unit_basis(std::size_t n) {
  std::vector<Exponent> b;
  for (std::size_t i = 0; i < n; ++i) b.push_back(Exponent::unit(n, i));
  return b;
}

Formulation qr_formulation(const RatMat& m, unsigned r, const ConeConfig& cfg) {
  const std::size_t n = m.size();
  check_block_cap(n, cfg);
  const std::size_t row_cap = cfg.max_block * (cfg.max_block + 1) / 2;
  check_count_cap(monomial_count(n, r + 2, row_cap), row_cap, "Q^(r) identity size for r = " + std::to_string(r));
  IdentityBuilder b(n);
  const auto betas = exponents_of_degree(n, r);
  const auto gammas = exponents_of_degree(n, r + 2);
  const auto basis = unit_basis(n);
  for (const auto& beta : betas) b.add_gram(basis, Polynomial::monomial(beta));
  for (const auto& g : gammas) b.add_nonneg_poly(Polynomial::monomial(g));
  Formulation f;
  f.sys = b.finish(polya_expand(m, r));
  f.to_cert = [betas, gammas, basis, r, n](const ConicPoint& x, bool exact) {
    Certificate c;
    c.cone = ConeKind::Qr;
    c.order = r;
    c.exact = exact;
    for (std::size_t k = 0; k < betas.size(); ++k) c.grams.push_back({Polynomial::monomial(betas[k]), basis, x.blocks[k]});
    c.linear = Polynomial(n);
    for (std::size_t k = 0; k < gammas.size(); ++k) c.linear.add_term(gammas[k], x.nonneg[k]);
    return c;
  };
  f.to_point = [gammas](const Certificate& c) {
    ConicPoint x;
    for (const auto& g : c.grams) x.blocks.push_back(g.gram);
    for (const auto& g : gammas) x.nonneg.push_back(c.linear.coefficient(g));
    return x;
  };
  return f;
}

Formulation las_formulation(const RatMat& m, unsigned r, const ConeConfig& cfg) {
  if (r < 2) throw std::invalid_argument("Lasserre simplex test needs r >= 2");
  const std::size_t n = m.size();
  // Monomials of degree <= r/2 in n variables are those of degree r/2 in n+1.
  check_count_cap(monomial_count(n + 1, r / 2, cfg.max_block), cfg.max_block,
                  "Lasserre Gram basis for r = " + std::to_string(r));
  IdentityBuilder b(n);
  const auto basis0 = exponents_up_to_degree(n, r / 2);
  const auto basis1 = exponents_up_to_degree(n, (r - 1) / 2);
  const auto qexps = exponents_up_to_degree(n, r - 1);
  check_block_cap(basis0.size(), cfg);
  const Polynomial one = Polynomial::constant(n, 1);
  Polynomial shifted = Polynomial::linear_sum(n) - one;  // sum x_i - 1
  b.add_gram(basis0, one);
  for (std::size_t i = 0; i < n; ++i) b.add_gram(basis1, Polynomial::variable(n, i));
  for (const auto& g : qexps) b.add_free_poly(Polynomial::monomial(g) * shifted);
  Formulation f;
  f.sys = b.finish(quad_form(m));
  f.to_cert = [=](const ConicPoint& x, bool exact) {
    Certificate c;
    c.cone = ConeKind::Lasserre;
    c.order = r;
    c.exact = exact;
    c.grams.push_back({one, basis0, x.blocks[0]});
    for (std::size_t i = 0; i < n; ++i) c.grams.push_back({Polynomial::variable(n, i), basis1, x.blocks[1 + i]});
    c.linear = Polynomial(n);
    for (std::size_t k = 0; k < qexps.size(); ++k) c.linear.add_term(qexps[k], x.free[k]);
    return c;
  };
  f.to_point = [qexps](const Certificate& c) {
    ConicPoint x;
    for (const auto& g : c.grams) x.blocks.push_back(g.gram);
    for (const auto& g : qexps) x.free.push_back(c.linear.coefficient(g));
    return x;
  };
  return f;
}

Formulation formulation_for(const RatMat& m, const Certificate& c, const ConeConfig& cfg) {
  switch (c.cone) {
    case ConeKind::Spn: return spn_formulation(m);
    case ConeKind::K1: return k1_formulation(m);
    case ConeKind::Kr: return kr_formulation(m, c.order, cfg);
    case ConeKind::Qr: return qr_formulation(m, c.order, cfg);
    case ConeKind::Lasserre: return las_formulation(m, c.order, cfg);
    case ConeKind::Sos: return sos_formulation(c.target, cfg);
    case ConeKind::Polya: break;
  }
  throw std::invalid_argument("no SDP formulation for this cone");
}

VerifyReport verify_any(const RatMat* m, const Certificate& c, VerifyMode mode, double tol);

std::optional<Certificate> round_with(const Formulation& f, const ConicPoint& approx, const RatMat* m,
                                      std::uint64_t bound) {
  detail::RoundingOptions opt;
  opt.denominator_bound = bound;
  auto exact = detail::round_point(f.sys, approx, opt);
  if (!exact) return std::nullopt;
  Certificate c = f.to_cert(*exact, true);
  if (!verify_any(m, c, VerifyMode::Exact, 0).pass) return std::nullopt;
  return c;
}

Verdict decide(const Formulation& f, const RatMat* m, const ConeConfig& cfg) {
  const SdpProblem prob = f.sys.to_sdp();
  const double full_cap = default_trace_cap(prob);
  Verdict v;
  // A small trace cap conditions the problem far better. The optimal margin
  // is concave in the cap with the cap multiplier as a supergradient, so the
  // small-cap dual bound extends to the full cap.
  for (const double scale : {1e-3, 1.0}) {
    const double cap = full_cap * scale;
    MarginResult mr = margin_maximize(prob, {}, cfg.sdp, cap);
    v = Verdict{};
    v.margin = mr.margin;
    v.status = mr.solution.status;
    v.refutation = mr.solution.dual;
    if (v.status == SdpStatus::Inconsistent) {
      v.decision = Decision::No;
      v.margin = -kInf;
      v.note = "coefficient-matching system is inconsistent";
      return v;
    }
    const std::string solver_note =
        v.status == SdpStatus::Optimal
            ? std::string()
            : "solver: " + to_string(v.status) + (mr.solution.message.empty() ? "" : " (" + mr.solution.message + ")");
    // A NO rests on the dual bound: lambda* <= dual objective for a dual
    // feasible point.
    const bool dual_ok = mr.solution.residuals.dual <= cfg.verify_tol;
    const double upper = mr.solution.dual_objective + std::abs(mr.cap_dual) * (full_cap - cap);
    if (dual_ok && upper < -cfg.decision_tol) {
      v.decision = Decision::No;
      v.note = solver_note;
      return v;
    }
    ConicPoint approx = detail::point_from_solution(f.sys, mr.solution);
    if (cfg.try_rounding) {
      if (auto exact = round_with(f, approx, m, cfg.denominator_bound)) {
        v.decision = Decision::Yes;
        v.certificate = std::move(*exact);
        v.note = "exact rational certificate";
        return v;
      }
    }
    if (v.margin > cfg.decision_tol) {
      Certificate c = f.to_cert(approx, false);
      VerifyReport rep = verify_any(m, c, VerifyMode::Float, cfg.verify_tol);
      if (rep.pass) {
        v.decision = Decision::Yes;
        v.certificate = std::move(c);
        v.note = "floating-point certificate";
        return v;
      }
      v.decision = Decision::Inconclusive;
      v.note = "float certificate failed verification: " + rep.message;
      continue;
    }
    v.decision = Decision::Inconclusive;
    v.note = solver_note.empty() ? "margin inside the decision band and rounding failed" : solver_note;
  }
  return v;
}

double min_eig(const RatMat& g) {
  if (g.size() == 0) return 0;
  return min_eig_estimate(to_float(g), 1e-12);
}

double abs_d(const Rational& q) { return std::abs(q.get_d()); }

// Residual of an identity, relative to the expected polynomial's scale.
double poly_residual(const Polynomial& got, const Polynomial& expected) {
  return abs_d((got - expected).max_abs_coefficient());
}

void check_gram_shapes(const Certificate& c, std::size_t nvars) {
  for (const auto& g : c.grams) {
    if (g.basis.empty() || g.gram.size() != g.basis.size())
      throw std::invalid_argument("Gram block size does not match its basis");
    for (const auto& e : g.basis)
      if (e.size() != nvars) throw std::invalid_argument("basis exponent has the wrong length");
    if (g.multiplier.nvars() != nvars) throw std::invalid_argument("multiplier has the wrong variable count");
  }
}

VerifyReport verify_any(const RatMat* m, const Certificate& c, VerifyMode mode, double tol) {
  VerifyReport rep;
  const bool exact = mode == VerifyMode::Exact;
  if (exact && !c.exact) {
    rep.message = "exact verification requested for a floating-point certificate";
    return rep;
  }
  if (!m && c.cone != ConeKind::Sos) throw std::invalid_argument("certificate needs its matrix");
  bool ok = true;
  auto psd_ok = [&](const RatMat& g) {
    double e = g.size() ? min_eig(g) : 0.0;
    rep.psd_margins.push_back(e);
    return exact ? psd_check_exact(g).psd : e >= -tol;
  };
  auto nonneg_ok = [&](const Rational& q) { return exact ? q >= 0 : q.get_d() >= -tol; };
  double scale = 1;

  switch (c.cone) {
    case ConeKind::Polya: {
      Polynomial expected = polya_expand(*m, c.order, PolyaMode::Convolution);
      rep.identity_residual = poly_residual(c.polya, expected);
      scale = std::max(1.0, abs_d(expected.max_abs_coefficient()));
      for (const auto& [e, q] : c.polya.terms())
        if (q < 0) {
          ok = false;
          rep.message = "negative Polya coefficient";
        }
      break;
    }
    case ConeKind::Spn: {
      const std::size_t n = m->size();
      if (c.p.size() != n || c.n.size() != n) throw std::invalid_argument("Spn certificate has the wrong order");
      RatMat r = *m - c.p - c.n;
      Rational worst = 0;
      for (const auto& q : r.packed()) worst = std::max(worst, Rational(abs(q)));
      rep.identity_residual = worst.get_d();
      scale = 1;
      for (const auto& q : m->packed()) scale = std::max(scale, abs_d(q));
      if (!psd_ok(c.p)) ok = false, rep.message = "P is not PSD";
      for (const auto& q : c.n.packed())
        if (!nonneg_ok(q)) ok = false, rep.message = "N has a negative entry";
      break;
    }
    case ConeKind::K1: {
      const std::size_t n = m->size();
      if (c.k1.size() != n) throw std::invalid_argument("K1 certificate needs one block per variable");
      for (const auto& b : c.k1)
        if (b.size() != n) throw std::invalid_argument("K1 block has the wrong order");
      Rational worst = 0;
      auto bump = [&](const Rational& q) { worst = std::max(worst, Rational(abs(q))); };
      for (std::size_t i = 0; i < n; ++i) bump(c.k1[i](i, i) - (*m)(i, i));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (i != j) bump(2 * c.k1[i](i, j) + c.k1[j](i, i) - 2 * (*m)(i, j) - (*m)(i, i));
      for (const auto& t : triples(n)) {
        Rational excess = c.k1[t.i](t.j, t.k) + c.k1[t.j](t.i, t.k) + c.k1[t.k](t.i, t.j) -
                          ((*m)(t.i, t.j) + (*m)(t.i, t.k) + (*m)(t.j, t.k));
        if (excess > 0) bump(excess);
      }
      rep.identity_residual = worst.get_d();
      for (const auto& q : m->packed()) scale = std::max(scale, abs_d(q));
      for (const auto& b : c.k1)
        if (!psd_ok(b)) ok = false, rep.message = "a block P(i) is not PSD";
      break;
    }
    case ConeKind::Kr:
    case ConeKind::Qr:
    case ConeKind::Lasserre:
    case ConeKind::Sos: {
      const std::size_t nv = c.cone == ConeKind::Sos ? c.target.nvars() : m->size();
      check_gram_shapes(c, nv);
      Polynomial expected(nv);
      if (c.cone == ConeKind::Kr) expected = kr_target(*m, c.order);
      if (c.cone == ConeKind::Qr) expected = polya_expand(*m, c.order, PolyaMode::Convolution);
      if (c.cone == ConeKind::Lasserre) expected = quad_form(*m);
      if (c.cone == ConeKind::Sos) expected = c.target;
      Polynomial got(nv);
      for (const auto& g : c.grams) got += g.multiplier * detail::gram_form(g.basis, g.gram);
      if (c.cone == ConeKind::Qr) {
        got += c.linear;
        for (const auto& [e, q] : c.linear.terms())
          if (!nonneg_ok(q)) ok = false, rep.message = "negative linear coefficient";
        for (const auto& g : c.grams)
          if (g.multiplier.term_count() != 1 || g.multiplier.terms().begin()->second <= 0 ||
              g.multiplier.degree() != static_cast<int>(c.order))
            ok = false, rep.message = "Q multiplier must be a monomial of degree r";
      }
      if (c.cone == ConeKind::Lasserre) {
        if (!c.linear.is_zero()) {
          if (c.linear.nvars() != nv) throw std::invalid_argument("q has the wrong variable count");
          got += c.linear * (Polynomial::linear_sum(nv) - Polynomial::constant(nv, 1));
          if (c.linear.degree() > static_cast<int>(c.order) - 1) ok = false, rep.message = "deg q exceeds r - 1";
        }
        for (const auto& g : c.grams) {
          const bool unit_mult = g.multiplier == Polynomial::constant(nv, 1);
          bool var_mult = false;
          for (std::size_t i = 0; i < nv; ++i) var_mult = var_mult || g.multiplier == Polynomial::variable(nv, i);
          if (!unit_mult && !var_mult) ok = false, rep.message = "Lasserre multipliers must be 1 or x_i";
          const unsigned cap = unit_mult ? c.order / 2 : (c.order - 1) / 2;
          for (const auto& e : g.basis)
            if (e.degree() > cap) ok = false, rep.message = "basis degree exceeds the order";
        }
      }
      if (c.cone == ConeKind::Kr || c.cone == ConeKind::Sos)
        for (const auto& g : c.grams)
          if (g.multiplier != Polynomial::constant(nv, 1)) ok = false, rep.message = "SOS multipliers must be 1";
      rep.identity_residual = poly_residual(got, expected);
      scale = std::max(1.0, abs_d(expected.max_abs_coefficient()));
      for (const auto& g : c.grams)
        if (!psd_ok(g.gram)) ok = false, rep.message = "a Gram block is not PSD";
      break;
    }
  }
  // Polya data is exact by construction in either mode.
  const bool identity_ok = exact || c.cone == ConeKind::Polya ? rep.identity_residual == 0 : rep.identity_residual <= tol * scale;
  if (!identity_ok) {
    ok = false;
    if (rep.message.empty()) rep.message = "identity residual too large";
  }
  rep.pass = ok;
  return rep;
}

}  // namespace

Verdict c_membership(const RatMat& m, unsigned r) {
  check_count_cap(monomial_count(m.size(), r + 2, kMaxPolyaTerms), kMaxPolyaTerms,
                  "Polya expansion for r = " + std::to_string(r));
  Verdict v;
  Polynomial p = polya_expand(m, r, PolyaMode::ClosedForm);
  Rational worst = 0;
  bool first = true;
  for (const auto& [e, q] : p.terms())
    if (first || q < worst) worst = q, first = false;
  // Zero coefficients are not stored, so only stored ones can be negative.
  if (p.is_zero() || worst >= 0) {
    v.decision = Decision::Yes;
    v.margin = kInf;
    Certificate c;
    c.cone = ConeKind::Polya;
    c.order = r;
    c.polya = std::move(p);
    v.certificate = std::move(c);
    v.note = "all Polya coefficients nonnegative";
  } else {
    v.decision = Decision::No;
    v.margin = worst.get_d();
    v.note = "negative Polya coefficient " + to_string(worst);
  }
  return v;
}

Verdict spn_membership(const RatMat& m, const ConeConfig& cfg) { return decide(spn_formulation(m), &m, cfg); }

Verdict k1_membership(const RatMat& m, const ConeConfig& cfg) { return decide(k1_formulation(m), &m, cfg); }

ShiftResult min_shift(ConeKind cone, const RatMat& a, const RatMat& b, const ConeConfig& cfg) {
  if (a.size() != b.size()) throw std::invalid_argument("matrix order mismatch");
  if (cone != ConeKind::Spn && cone != ConeKind::K1) throw std::invalid_argument("min_shift supports spn and k1 only");
  auto build = [cone](const RatMat& m) { return cone == ConeKind::Spn ? spn_formulation(m) : k1_formulation(m); };
  // Row right-hand sides are linear in M, so t*B - A gives rhs t*rhs(B) - rhs(A).
  ConicSystem sys = build(a).sys;
  const ConicSystem with_b = build(b).sys;
  const std::size_t t = sys.add_free();
  for (std::size_t k = 0; k < sys.rows.size(); ++k) {
    sys.rows[k].push_back({VarKind::Free, t, 0, 0, -with_b.rhs[k]});
    sys.rhs[k] = -sys.rhs[k];
  }
  SdpProblem p = sys.to_sdp();
  LinearFunctional obj;
  obj.free.push_back({t, 1.0});
  p.set_objective(obj, Sense::Minimize);
  ShiftResult out;
  out.solution = solve(p, cfg.sdp);
  out.value = out.solution.free.empty() ? kInf : out.solution.free[t];
  return out;
}

Verdict kr_membership(const RatMat& m, unsigned r, const ConeConfig& cfg) {
  return decide(kr_formulation(m, r, cfg), &m, cfg);
}

Verdict qr_membership(const RatMat& m, unsigned r, const ConeConfig& cfg) {
  return decide(qr_formulation(m, r, cfg), &m, cfg);
}

Verdict las_simplex_membership(const RatMat& m, unsigned r, const ConeConfig& cfg) {
  return decide(las_formulation(m, r, cfg), &m, cfg);
}

Verdict sos_membership(const Polynomial& p, const ConeConfig& cfg) {
  if (p.is_zero()) {
    Verdict v;
    v.decision = Decision::Yes;
    v.margin = kInf;
    Certificate c;
    c.cone = ConeKind::Sos;
    c.target = p;
    v.certificate = c;
    return v;
  }
  if (p.degree() % 2) {
    Verdict v;
    v.decision = Decision::No;
    v.margin = -kInf;
    v.note = "odd degree";
    return v;
  }
  return decide(sos_formulation(p, cfg), nullptr, cfg);
}

VerifyReport verify_certificate(const RatMat& m, const Certificate& c, VerifyMode mode, double tol) {
  return verify_any(&m, c, mode, tol);
}

VerifyReport verify_sos(const Certificate& c, VerifyMode mode, double tol) {
  if (c.cone != ConeKind::Sos) throw std::invalid_argument("verify_sos needs an Sos certificate");
  return verify_any(nullptr, c, mode, tol);
}

std::optional<Certificate> round_certificate(const RatMat& m, const Certificate& c, std::uint64_t denominator_bound) {
  if (c.cone == ConeKind::Polya) {
    if (verify_any(&m, c, VerifyMode::Exact, 0).pass) return c;
    return std::nullopt;
  }
  ConeConfig cfg;
  cfg.max_block = std::numeric_limits<std::size_t>::max();
  Formulation f = formulation_for(m, c, cfg);
  return round_with(f, f.to_point(c), c.cone == ConeKind::Sos ? nullptr : &m, denominator_bound);
}

}  // namespace copkit
