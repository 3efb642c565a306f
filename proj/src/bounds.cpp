#include "copkit/bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace copkit {

namespace {

Rational binom2(unsigned long k) { return Rational(static_cast<long>(k * (k == 0 ? 0 : k - 1) / 2)); }

RatMat adjacency_plus_identity(const Graph& g) {
  const std::size_t n = g.order();
  RatMat b = RatMat::identity(n);
  for (const auto& [i, j] : g.edges()) b.set(i, j, 1);
  return b;
}

long floor_of(const Rational& q) {
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return f.get_si();
}

}  // namespace

std::string to_string(const ExtRational& v) { return v ? to_string(*v) : "inf"; }

ExtRational zeta_closed_form(std::size_t alpha, unsigned r) {
  if (alpha == 0) throw std::invalid_argument("alpha must be positive");
  const unsigned long u = (r + 2) / alpha, v = (r + 2) % alpha;
  const Rational den = binom2(u) * static_cast<long>(alpha) + Rational(static_cast<long>(u * v));
  if (den == 0) return std::nullopt;
  Rational q = binom2(r + 2) / den;
  q.canonicalize();
  return q;
}

ExtRational zeta_closed_form(const Graph& g, unsigned r) { return zeta_closed_form(stability_number(g).alpha, r); }

ExtRational zeta_direct(const Graph& g, unsigned r) {
  const std::size_t n = g.order();
  const RatMat j = RatMat::ones(n), b = adjacency_plus_identity(g);
  // t c(B) >= c(J) for every beta; c(J) > 0 throughout, so a zero c(B) rules
  // out every t.
  Rational best = 0;
  for (const auto& beta : exponents_of_degree(n, r + 2)) {
    const Rational num = polya_coefficient(j, beta, r), den = polya_coefficient(b, beta, r);
    if (den <= 0) return std::nullopt;
    Rational q = num / den;
    if (q > best) best = q;
  }
  best.canonicalize();
  return best;
}

FloorCheck floor_convergence_check(const Graph& g, unsigned r_max) {
  FloorCheck fc;
  fc.alpha = stability_number(g).alpha;
  fc.threshold = static_cast<unsigned>(fc.alpha * fc.alpha - 1);
  fc.pass = true;
  for (unsigned r = 0; r <= r_max; ++r) {
    FloorRow row;
    row.r = r;
    row.zeta = zeta_closed_form(fc.alpha, r);
    if (row.zeta) row.floor = floor_of(*row.zeta);
    row.at_alpha = row.floor && *row.floor == static_cast<long>(fc.alpha);
    if (row.at_alpha != (r >= fc.threshold)) fc.pass = false;
    fc.rows.push_back(row);
  }
  return fc;
}

std::string to_string(Hierarchy h) {
  switch (h) {
    case Hierarchy::Zeta: return "zeta";
    case Hierarchy::Theta: return "theta";
    case Hierarchy::Lovasz: return "lovasz";
  }
  return "?";
}

Hierarchy parse_hierarchy(const std::string& s) {
  if (s == "zeta") return Hierarchy::Zeta;
  if (s == "theta") return Hierarchy::Theta;
  if (s == "lovasz") return Hierarchy::Lovasz;
  throw std::invalid_argument("unknown hierarchy: " + s);
}

BoundReport zeta_report(const Graph& g, unsigned r, const std::string& id) {
  BoundReport rep;
  rep.graph = id;
  rep.hierarchy = Hierarchy::Zeta;
  rep.order = r;
  rep.alpha = stability_number(g).alpha;
  rep.exact = zeta_closed_form(rep.alpha, r);
  rep.infinite = !rep.exact;
  if (rep.exact) {
    rep.value = rep.exact->get_d();
    rep.floor = floor_of(*rep.exact);
  } else {
    rep.value = std::numeric_limits<double>::infinity();
  }
  rep.notes = "exact, closed form";
  return rep;
}

BoundReport theta_r(const Graph& g, unsigned r, const ConeConfig& cfg, const std::string& id) {
  const std::size_t n = g.order();
  BoundReport rep;
  rep.graph = id;
  rep.hierarchy = Hierarchy::Theta;
  rep.order = r;
  rep.alpha = stability_number(g).alpha;
  const RatMat j = RatMat::ones(n), b = adjacency_plus_identity(g);
  if (r <= 1) {
    ShiftResult s = min_shift(r == 0 ? ConeKind::Spn : ConeKind::K1, j, b, cfg);
    if (!std::isfinite(s.value) || s.solution.residuals.primal > cfg.verify_tol ||
        s.solution.residuals.dual > cfg.verify_tol)
      throw std::runtime_error("theta SDP failed: " + to_string(s.solution.status) + " (" + s.solution.message + ")");
    rep.value = s.value;
    rep.notes = "single SDP, status " + to_string(s.solution.status);
  } else {
    auto feasible = [&](const Rational& t) {
      RatMat m = b;
      m *= t;
      return kr_membership(m - j, r, cfg).margin >= 0;
    };
    Rational lo(static_cast<long>(rep.alpha));
    const ExtRational z = zeta_closed_form(rep.alpha, r);
    Rational hi(static_cast<long>(n));
    if (z && *z > hi) hi = *z;
    if (!feasible(hi)) throw std::runtime_error("theta bisection: upper bracket " + to_string(hi) + " infeasible");
    int steps = 0;
    if (feasible(lo)) {
      hi = lo;
    } else {
      while (Rational(hi - lo).get_d() > kThetaBisectionWidth) {
        Rational mid = (lo + hi) / 2;
        mid.canonicalize();
        (feasible(mid) ? hi : lo) = mid;
        ++steps;
      }
    }
    rep.value = hi.get_d();
    rep.notes = "bisection, " + std::to_string(steps) + " steps";
  }
  rep.floor = static_cast<long>(std::floor(rep.value + 1e-6));
  return rep;
}

double lovasz_theta(const Graph& g, bool prime, const SdpConfig& cfg) {
  const std::size_t n = g.order();
  if (n == 0) return 0;
  SdpProblem p;
  const std::size_t x = p.add_block(n);
  LinearFunctional trace, obj;
  for (std::size_t i = 0; i < n; ++i) {
    trace.blocks.push_back({x, i, i, 1.0});
    for (std::size_t k = i; k < n; ++k) obj.blocks.push_back({x, i, k, i == k ? 1.0 : 2.0});
  }
  p.add_constraint(trace, 1.0);
  for (const auto& [i, k] : g.edges()) {
    LinearFunctional f;
    f.blocks.push_back({x, i, k, 1.0});
    p.add_constraint(f, 0.0);
  }
  if (prime)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = i + 1; k < n; ++k)
        if (!g.adjacent(i, k)) {
          LinearFunctional f;
          f.blocks.push_back({x, i, k, 1.0});
          f.nonneg.push_back({p.add_nonneg(), -1.0});
          p.add_constraint(f, 0.0);
        }
  p.set_objective(obj, Sense::Maximize);
  SdpSolution s = solve(p, cfg);
  if (s.residuals.primal > 1e-6 || s.residuals.dual > 1e-6 || s.residuals.gap > 1e-6)
    throw std::runtime_error("theta SDP failed: " + to_string(s.status) + " (" + s.message + ")");
  return s.objective;
}

BoundReport lovasz_report(const Graph& g, const SdpConfig& cfg, const std::string& id) {
  BoundReport rep;
  rep.graph = id;
  rep.hierarchy = Hierarchy::Lovasz;
  rep.alpha = stability_number(g).alpha;
  rep.value = lovasz_theta(g, false, cfg);
  rep.floor = static_cast<long>(std::floor(rep.value + 1e-6));
  rep.notes = "theta SDP";
  return rep;
}

Verdict conjecture_probe(const Graph& g, const ConeConfig& cfg) {
  const std::size_t alpha = stability_number(g).alpha;
  return kr_membership(graph_matrix(g), static_cast<unsigned>(alpha - 1), cfg);
}

}  // namespace copkit
