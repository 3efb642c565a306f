// Acceptance run: one PASS/FAIL line per criterion. Usage:
//   acceptance <path to copkit CLI>

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "copkit/bounds.hpp"
#include "copkit/catalog.hpp"
#include "copkit/cones.hpp"
#include "copkit/copositivity.hpp"
#include "copkit/graphs.hpp"
#include "sdp_gen.hpp"

using namespace copkit;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Certificates from YES verdicts, re-verified through the CLI at the end.
struct PendingCert {
  std::string label;
  RatMat matrix;
  Certificate cert;
};
std::vector<PendingCert> pending;

void keep(const std::string& label, const RatMat& m, const Verdict& v) {
  if (v.decision == Decision::Yes && v.certificate) pending.push_back({label, m, *v.certificate});
}

std::vector<std::pair<std::string, Graph>> fixtures() {
  std::vector<std::pair<std::string, Graph>> out;
  for (std::size_t n = 3; n <= 7; ++n) out.emplace_back("C" + std::to_string(n), cycle_graph(n));
  for (std::size_t n = 2; n <= 5; ++n) out.emplace_back("P" + std::to_string(n), path_graph(n));
  for (std::size_t n = 2; n <= 5; ++n) out.emplace_back("K" + std::to_string(n), complete_graph(n));
  out.emplace_back("Petersen", petersen_graph());
  return out;
}

RatMat adjacency_plus_identity(const Graph& g) {
  RatMat b = RatMat::identity(g.order());
  for (const auto& [i, j] : g.edges()) b.set(i, j, 1);
  return b;
}

Outcome zeta_equivalence() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  int cells = 0;
  for (const auto& [name, g] : fixtures())
    for (unsigned r = 0; r <= 6; ++r) {
      ++cells;
      o.require(zeta_direct(g, r) == zeta_closed_form(g, r), name + " r=" + std::to_string(r));
    }
  const double t = seconds_since(t0);
  o.require(t < 30, "runtime " + fmt(t) + " s");
  o.note(std::to_string(cells) + " cells, " + fmt(t) + " s");
  return o;
}

Outcome floor_law() {
  Outcome o;
  const FloorCheck c5 = floor_convergence_check(cycle_graph(5), 10);
  for (const auto& row : c5.rows) {
    if (row.r >= 3) o.require(row.floor && *row.floor == 2, "C5 floor at r=" + std::to_string(row.r));
    else o.require(!row.floor || *row.floor > 2, "C5 floor above 2 at r=" + std::to_string(row.r));
  }
  const FloorCheck c7 = floor_convergence_check(cycle_graph(7), 12);
  o.require(c7.threshold == 8 && c7.pass, "C7 threshold 8");
  for (const auto& row : c7.rows)
    o.require(row.at_alpha == (row.r >= 8), "C7 floor at r=" + std::to_string(row.r));
  o.note("C5 threshold " + std::to_string(c5.threshold) + ", C7 threshold " + std::to_string(c7.threshold));
  return o;
}

Outcome horn_in_k1() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  o.require(verify_horn_identity().pass, "Horn identity");
  const Verdict v = k1_membership(horn());
  o.require(v.margin >= -1e-7, "k1 margin " + fmt(v.margin));
  std::optional<Certificate> exact;
  if (v.certificate) exact = round_certificate(horn(), *v.certificate);
  o.require(exact && exact->exact && verify_certificate(horn(), *exact, VerifyMode::Exact).pass,
            "exact K1 certificate");
  if (exact) {
    Verdict w = v;
    w.decision = Decision::Yes;
    w.certificate = exact;
    keep("Horn K1", horn(), w);
  }
  const double t = seconds_since(t0);
  o.require(t < 10, "runtime " + fmt(t) + " s");
  o.note("margin " + fmt(v.margin) + ", " + fmt(t) + " s");
  return o;
}

Outcome horn_not_k0() {
  Outcome o;
  const Verdict v = spn_membership(horn());
  o.require(v.decision == Decision::No, "decision " + to_string(v.decision));
  o.require(v.margin <= -1e-4, "margin " + fmt(v.margin));
  o.note("margin " + fmt(v.margin));
  return o;
}

Outcome theta_five_cycle() {
  Outcome o;
  const Graph c5 = cycle_graph(5);
  const double closed = 5 * std::cos(std::numbers::pi / 5) / (1 + std::cos(std::numbers::pi / 5));
  const double t0 = theta_r(c5, 0).value, t1 = theta_r(c5, 1).value, lov = lovasz_theta(c5);
  o.require(std::abs(t0 - std::sqrt(5.0)) <= 1e-4, "theta0 " + fmt(t0));
  o.require(std::abs(t0 - lov) <= 1e-4, "lovasz " + fmt(lov));
  o.require(std::abs(t0 - closed) <= 1e-4, "closed form");
  o.require(std::abs(t1 - 2) <= 1e-4, "theta1 " + fmt(t1));
  // Bracket sqrt(5) by exact rationals and take certificates on both sides.
  const RatMat b = adjacency_plus_identity(c5), j = RatMat::ones(5);
  auto shifted = [&](Rational t) {
    RatMat m = b;
    m *= t;
    return m - j;
  };
  const RatMat above = shifted(Rational(22361, 10000)), below = shifted(Rational(2236, 1000));
  const Verdict va = spn_membership(above), vb = spn_membership(below), v2 = k1_membership(shifted(2));
  o.require(va.decision == Decision::Yes, "spn at t = 2.2361");
  o.require(vb.decision == Decision::No, "spn at t = 2.236");
  o.require(v2.decision == Decision::Yes, "k1 at t = 2");
  keep("theta0 upper bracket", above, va);
  keep("theta1 at 2", shifted(2), v2);
  std::ostringstream d;
  d.precision(8);
  d << "theta0 " << t0 << ", theta1 " << t1 << ", lovasz " << lov;
  o.note(d.str());
  return o;
}

Rational random_rational(std::mt19937_64& rng, int lo, int hi) {
  std::uniform_int_distribution<int> num(lo, hi), den(1, 9);
  Rational q(num(rng), den(rng));
  q.canonicalize();
  return q;
}

Outcome diananda() {
  Outcome o;
  std::mt19937_64 rng(20240601);
  int band = 0, band_agree = 0, agree = 0, copositive = 0;
  for (int t = 0; t < 100; ++t) {
    RatMat m(4);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t k = i; k < 4; ++k) m.set(i, k, i == k ? random_rational(rng, 0, 9) : random_rational(rng, -9, 9));
    const bool cop = copositivity_class(m).cls != CopositivityClass::NotCopositive;
    copositive += cop;
    const Verdict v = spn_membership(m);
    const bool ok = cop ? v.decision == Decision::Yes : v.decision == Decision::No;
    if (std::abs(v.margin) <= 1e-7) {
      ++band;
      band_agree += ok;
      continue;
    }
    agree += ok;
    o.require(ok, "matrix " + std::to_string(t) + ": " + to_string(v.decision) + " margin " + fmt(v.margin));
  }
  o.require(band < 5, "band hits " + std::to_string(band));
  o.note(std::to_string(agree) + " agree, " + std::to_string(band) + " band hits (" +
         std::to_string(band_agree) + " of them agree anyway), " + std::to_string(copositive) +
         " copositive");
  return o;
}

Outcome motzkin() {
  Outcome o;
  const Verdict v = sos_membership(motzkin_form());
  o.require(v.decision == Decision::No && v.margin <= -1e-4, "SOS margin " + fmt(v.margin));
  o.require(verify_motzkin_certificate().pass, "certificate identity");
  o.note("margin " + fmt(v.margin));
  return o;
}

bool same_zero_sets(const ZeroSet& a, const ZeroSet& b) {
  if (a.is_finite != b.is_finite || a.finite_zeros.size() != b.finite_zeros.size() ||
      a.infinite_families.size() != b.infinite_families.size())
    return false;
  for (const auto& p : a.finite_zeros) {
    bool found = false;
    for (const auto& q : b.finite_zeros) found = found || p.x == q.x;
    if (!found) return false;
  }
  for (const auto& f : a.infinite_families) {
    bool found = false;
    for (const auto& h : b.infinite_families) found = found || (f.support == h.support && f.dimension == h.dimension);
    if (!found) return false;
  }
  return true;
}

Outcome zero_structure() {
  Outcome o;
  const ZeroSet c4 = graph_matrix_zeros(cycle_graph(4));
  const Rational h(1, 2);
  o.require(c4.is_finite && c4.finite_zeros.size() == 2 &&
                c4.finite_zeros[0].x == std::vector<Rational>{h, 0, h, 0} &&
                c4.finite_zeros[1].x == std::vector<Rational>{0, h, 0, h},
            "C4 zeros");
  o.require(!graph_matrix_zeros(cycle_graph(5)).is_finite, "C5 families");
  int graphs = 0, points = 0;
  for (const auto& [name, g] : fixtures()) {
    bool truncated = false;
    const ZeroSet comb = graph_matrix_zeros(g, &truncated);
    const ZeroSet oracle = zeros_in_simplex(graph_matrix(g));
    o.require(!truncated, name + " truncated");
    o.require(same_zero_sets(comb, oracle), name + " zero sets differ");
    for (const auto& p : oracle.finite_zeros) {
      o.require(check_zero_characterization(g, p.x).pass, name + " characterization");
      ++points;
    }
    // Barycentre of each family support: weight 1/alpha per clique split evenly.
    const std::size_t alpha = stability_number(g).alpha;
    for (const auto& f : oracle.infinite_families) {
      std::vector<Rational> x(g.order(), 0);
      ZeroCharacterization probe;
      std::vector<Rational> ones(g.order(), 0);
      for (auto v : f.support) ones[v] = 1;
      // Component sizes from the characterization itself are not used here:
      // each vertex gets 1/(alpha * size of its clique).
      for (auto v : f.support) {
        std::size_t size = 1;
        for (auto u : f.support)
          if (u != v && g.adjacent(u, v)) ++size;
        Rational w(1, static_cast<long>(alpha * size));
        w.canonicalize();
        x[v] = w;
      }
      o.require(check_zero_characterization(g, x).pass, name + " family point");
      o.require(graph_matrix(g).quadratic(std::span<const Rational>(x)) == 0, name + " family point value");
      ++points;
    }
    ++graphs;
  }
  o.note(std::to_string(graphs) + " graphs, " + std::to_string(points) + " points checked");
  return o;
}

Outcome critical_edges_counts() {
  Outcome o;
  const std::size_t c5 = critical_edges(cycle_graph(5)).size(), c6 = critical_edges(cycle_graph(6)).size(),
                    pet = critical_edges(petersen_graph()).size();
  o.require(c5 == 5, "C5 " + std::to_string(c5));
  o.require(c6 == 0, "C6 " + std::to_string(c6));
  o.require(pet == 0, "Petersen " + std::to_string(pet));
  o.note("C5 " + std::to_string(c5) + ", C6 " + std::to_string(c6) + ", Petersen " + std::to_string(pet));
  return o;
}

Outcome acritical_scc() {
  Outcome o;
  std::size_t zeros = 0;
  for (const auto& [name, g] : std::vector<std::pair<std::string, Graph>>{{"C6", cycle_graph(6)},
                                                                          {"Petersen", petersen_graph()}}) {
    const auto rep = check_scc(graph_matrix(g));
    o.require(!rep.empty(), name + " has no zeros");
    for (const auto& e : rep) o.require(e.holds, name + " zero fails SCC");
    zeros += rep.size();
  }
  o.note(std::to_string(zeros) + " zeros, all strict");
  return o;
}

Outcome counterexamples() {
  Outcome o;
  const RatMat hz = direct_sum(horn(), RatMat(1));
  const Verdict s = spn_membership(hz), k = k1_membership(hz);
  o.require(s.decision == Decision::No && s.margin <= -1e-5, "spn(H+0) margin " + fmt(s.margin));
  o.require(k.decision == Decision::No && k.margin <= -1e-5, "k1(H+0) margin " + fmt(k.margin));
  const Verdict l = las_simplex_membership(matrix_m(), 3);
  o.require(l.decision == Decision::No, "las(M, 3) " + to_string(l.decision));
  const Verdict c = c_membership(matrix_m(), 0);
  o.require(c.decision == Decision::Yes, "C^(0)(M) " + to_string(c.decision));
  keep("matrix-M Polya r=0", matrix_m(), c);
  o.note("spn " + fmt(s.margin) + ", k1 " + fmt(k.margin) + ", las " + fmt(l.margin));
  return o;
}

Outcome las_two_by_two() {
  Outcome o;
  std::mt19937_64 rng(7202);
  std::uniform_int_distribution<int> small(-3, 3), pos(0, 4), kind(0, 4);
  int yes = 0;
  double worst = 1;
  for (int t = 0; t < 50; ++t) {
    RatMat m(2);
    if (kind(rng) == 0) {
      const Rational a(pos(rng) + 1);
      m.set(0, 0, a);
      m.set(1, 1, a);
      m.set(0, 1, -a);
    } else {
      // P + N with P = v v^T + w w^T, N >= 0 off the diagonal.
      const int v0 = small(rng), v1 = small(rng), w0 = small(rng), w1 = small(rng);
      m.set(0, 0, Rational(v0 * v0 + w0 * w0));
      m.set(1, 1, Rational(v1 * v1 + w1 * w1));
      m.set(0, 1, Rational(v0 * v1 + w0 * w1 + pos(rng)));
    }
    const Verdict v = las_simplex_membership(m, 3);
    worst = std::min(worst, v.margin);
    o.require(v.margin >= -1e-6 && v.decision != Decision::No,
              "sample " + std::to_string(t) + " " + to_string(v.decision) + " margin " + fmt(v.margin));
    yes += v.decision == Decision::Yes;
    keep("LAS 2x2 sample " + std::to_string(t), m, v);
  }
  o.note(std::to_string(yes) + "/50 YES, smallest margin " + fmt(worst));
  return o;
}

Outcome t_psi_zeros_check() {
  Outcome o;
  std::mt19937_64 rng(1313);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  double worst = 0;
  for (int t = 0; t < 25; ++t) {
    TPsiParams p;
    double total = 0;
    for (auto& v : p.psi) total += (v = u(rng));
    const double scale = u(rng) * std::numbers::pi / total * 0.99;
    for (auto& v : p.psi) v *= scale;
    const FloatMat m = t_psi(p);
    for (const auto& z : t_psi_zeros(p)) worst = std::max(worst, std::abs(m.quadratic(std::span<const double>(z))));
    o.require(copositivity_class_numeric(m, 1e-9) == CopositivityClass::Boundary, "sample " + std::to_string(t));
  }
  o.require(worst <= 1e-10, "largest |v^T T v| " + fmt(worst));
  o.note("largest |v^T T v| " + fmt(worst));
  return o;
}

bool identical(const SdpSolution& a, const SdpSolution& b) {
  auto same = [](const std::vector<double>& x, const std::vector<double>& y) {
    return x.size() == y.size() && (x.empty() || std::memcmp(x.data(), y.data(), x.size() * sizeof(double)) == 0);
  };
  if (a.blocks.size() != b.blocks.size() || !same(a.dual, b.dual) || !same(a.nonneg, b.nonneg) ||
      !same(a.free, b.free) || std::memcmp(&a.objective, &b.objective, sizeof(double)) != 0)
    return false;
  for (std::size_t k = 0; k < a.blocks.size(); ++k) {
    const auto pa = a.blocks[k].packed(), pb = b.blocks[k].packed();
    if (pa.size() != pb.size() || std::memcmp(pa.data(), pb.data(), pa.size() * sizeof(double)) != 0) return false;
  }
  return true;
}

Outcome solver_health() {
  Outcome o;
  double worst_obj = 0, worst_res = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto planted = testing::planted_sdp(seed);
    const SdpSolution s = solve(planted.problem);
    const Residuals r = residuals(planted.problem, s);
    const double err = std::abs(s.objective - planted.optimum);
    worst_obj = std::max(worst_obj, err);
    worst_res = std::max({worst_res, r.primal, r.dual});
    o.require(err <= 1e-6, "seed " + std::to_string(seed) + " objective error " + fmt(err));
    o.require(r.primal <= 1e-7 && r.dual <= 1e-7, "seed " + std::to_string(seed) + " residuals");
    if (seed <= 10) o.require(identical(s, solve(planted.problem)), "seed " + std::to_string(seed) + " determinism");
  }
  o.note("worst objective error " + fmt(worst_obj) + ", worst residual " + fmt(worst_res));
  return o;
}

int run_cli(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome round_trip(const std::string& cli) {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / ("copkit_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  int ok = 0;
  for (std::size_t k = 0; k < pending.size(); ++k) {
    const auto& p = pending[k];
    const fs::path mat = dir / ("m" + std::to_string(k) + ".txt"), cert = dir / ("c" + std::to_string(k) + ".json");
    std::ofstream(mat) << format_matrix(p.matrix);
    std::ofstream(cert) << certificate_to_json(p.cert, p.matrix);
    const int code = run_cli("'" + cli + "' verify '" + cert.string() + "' '" + mat.string() + "' > /dev/null 2>&1");
    o.require(code == 0, p.label + " exit " + std::to_string(code));
    ok += code == 0;
  }
  o.require(!pending.empty(), "no certificates collected");
  fs::remove_all(dir);
  o.note(std::to_string(ok) + "/" + std::to_string(pending.size()) + " certificates re-verified");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <copkit CLI>\n";
    return 2;
  }
  const std::string cli = argv[1];
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"zeta closed form equals direct", zeta_equivalence},
      {"zeta floor law (C5, C7)", floor_law},
      {"Horn in K^(1), exact certificate", horn_in_k1},
      {"Horn not in K^(0)", horn_not_k0},
      {"theta^(0)(C5) = sqrt 5, theta^(1)(C5) = 2", theta_five_cycle},
      {"Diananda on random 4x4", diananda},
      {"Motzkin form not SOS, certificate identity", motzkin},
      {"graph-matrix zero structure", zero_structure},
      {"critical edges", critical_edges_counts},
      {"acritical SCC", acritical_scc},
      {"counterexample instances", counterexamples},
      {"LAS exact at n = 2", las_two_by_two},
      {"T(psi) zeros", t_psi_zeros_check},
      {"solver health on planted SDPs", solver_health},
      {"certificate round trip through the CLI", [&] { return round_trip(cli); }},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << (k + 1) << ". " << criteria[k].first << " -- " << o.detail
              << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
