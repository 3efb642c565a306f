#pragma once

// Upper bounds on the stability number from inner copositive hierarchies:
// zeta^(r) (Polya cones, exact), theta^(r) (the K^(r) cones, by SDP) and
// the Lovasz theta function as an independent reference.

#include <optional>
#include <string>
#include <vector>

#include "copkit/cones.hpp"
#include "copkit/graphs.hpp"

namespace copkit {

/// nullopt stands for +infinity.
using ExtRational = std::optional<Rational>;

std::string to_string(const ExtRational& v);

/// (r+2 choose 2) / ((u choose 2) alpha + u v) with r + 2 = u alpha + v.
ExtRational zeta_closed_form(const Graph& g, unsigned r);
ExtRational zeta_closed_form(std::size_t alpha, unsigned r);
/// min t with t(A + I) - J in C^(r), as the largest ratio of Polya
/// coefficients c_beta(J) / c_beta(A + I).
ExtRational zeta_direct(const Graph& g, unsigned r);

struct FloorRow {
  unsigned r = 0;
  ExtRational zeta;
  std::optional<long> floor;  // nullopt when zeta is infinite
  bool at_alpha = false;
};

struct FloorCheck {
  std::size_t alpha = 0;
  unsigned threshold = 0;  // alpha^2 - 1
  std::vector<FloorRow> rows;
  bool pass = false;  // floor = alpha exactly when r >= threshold
};

FloorCheck floor_convergence_check(const Graph& g, unsigned r_max);

enum class Hierarchy { Zeta, Theta, Lovasz };
std::string to_string(Hierarchy h);
Hierarchy parse_hierarchy(const std::string& s);

struct BoundReport {
  std::string graph;
  Hierarchy hierarchy = Hierarchy::Zeta;
  unsigned order = 0;
  bool infinite = false;
  ExtRational exact;  // zeta only
  double value = 0;
  std::optional<long> floor;
  std::size_t alpha = 0;
  std::string notes;
};

BoundReport zeta_report(const Graph& g, unsigned r, const std::string& id = "");

/// Bisection width for r >= 2.
inline constexpr double kThetaBisectionWidth = 1e-5;

/// min t with t(A + I) - J in K^(r). Orders 0 and 1 are one SDP with t free;
/// higher orders bisect on kr_membership over [alpha, max(n, zeta^(r))].
BoundReport theta_r(const Graph& g, unsigned r, const ConeConfig& cfg = {}, const std::string& id = "");

/// max <J, X> with tr X = 1, X_ij = 0 on edges, X PSD; `prime` adds X >= 0.
double lovasz_theta(const Graph& g, bool prime = false, const SdpConfig& cfg = {});
BoundReport lovasz_report(const Graph& g, const SdpConfig& cfg = {}, const std::string& id = "");

/// Is M_G in K^(alpha - 1)? Exact YES when the certificate rounds.
Verdict conjecture_probe(const Graph& g, const ConeConfig& cfg = {});

}  // namespace copkit
