#pragma once

// Inner approximations of the copositive cone: membership tests, certificate
// construction, rounding to exact rationals, and re-verification.
//
// Every SDP-based test is posed as a margin maximization (see sdp.hpp); the
// sign of the margin decides, with an inconclusive band around zero. A small
// margin can still yield YES when the solver output rounds to an exact
// rational certificate.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "copkit/polynomial.hpp"
#include "copkit/sdp.hpp"
#include "copkit/symmat.hpp"

namespace copkit {

enum class Decision { Yes, No, Inconclusive };
std::string to_string(Decision d);

enum class ConeKind { Polya, Spn, K1, Kr, Qr, Lasserre, Sos };
std::string to_string(ConeKind k);
ConeKind parse_cone_kind(const std::string& s);

struct ConeConfig {
  double decision_tol = 1e-7;
  SdpConfig sdp;
  std::uint64_t denominator_bound = 27720;
  /// Acceptance threshold for float certificates (identity residual and
  /// negative PSD margin).
  double verify_tol = 1e-6;
  /// Largest Gram block a test may build.
  std::size_t max_block = 400;
  bool try_rounding = true;
};

/// Gram term multiplier(x) * b(x)^T G b(x).
struct GramBlock {
  Polynomial multiplier;
  std::vector<Exponent> basis;
  RatMat gram;
};

/// One representation for all certificate variants; unused fields stay
/// empty. Float certificates hold the solver's doubles converted exactly.
struct Certificate {
  ConeKind cone = ConeKind::Polya;
  unsigned order = 0;
  bool exact = true;
  Polynomial polya;            // Polya: the full expansion
  RatMat p, n;                 // Spn: M = P + N
  std::vector<RatMat> k1;      // K1: P(1..n)
  std::vector<GramBlock> grams;  // Kr, Qr, Lasserre, Sos
  /// Qr: sum of c_beta x^beta with c >= 0; Lasserre: the polynomial q.
  Polynomial linear;
  /// Sos: the polynomial being certified.
  Polynomial target;
};

struct Verdict {
  Decision decision = Decision::Inconclusive;
  double margin = 0;
  std::optional<Certificate> certificate;
  /// Final dual iterate of the deciding margin problem (informal refutation).
  std::vector<double> refutation;
  SdpStatus status = SdpStatus::Optimal;
  std::string note;
};

struct VerifyReport {
  bool pass = false;
  double identity_residual = 0;
  std::vector<double> psd_margins;  // smallest eigenvalue per PSD block
  std::string message;
};

enum class VerifyMode { Exact, Float };

/// Largest Polya expansion c_membership will build.
inline constexpr std::size_t kMaxPolyaTerms = 1'000'000;

Verdict c_membership(const RatMat& m, unsigned r);
Verdict spn_membership(const RatMat& m, const ConeConfig& cfg = {});
inline Verdict k0_membership(const RatMat& m, const ConeConfig& cfg = {}) { return spn_membership(m, cfg); }
Verdict k1_membership(const RatMat& m, const ConeConfig& cfg = {});
Verdict kr_membership(const RatMat& m, unsigned r, const ConeConfig& cfg = {});
Verdict qr_membership(const RatMat& m, unsigned r, const ConeConfig& cfg = {});
Verdict las_simplex_membership(const RatMat& m, unsigned r, const ConeConfig& cfg = {});
/// Is p a sum of squares? Full monomial basis up to half the degree, split
/// by parity classes when every exponent of p is even.
Verdict sos_membership(const Polynomial& p, const ConeConfig& cfg = {});

struct ShiftResult {
  double value = 0;
  SdpSolution solution;
};

/// min { t : t B - A in the cone } for Spn or K1, one SDP with t free.
ShiftResult min_shift(ConeKind cone, const RatMat& a, const RatMat& b, const ConeConfig& cfg = {});

/// (x1^2 + ... + xn^2)^r (x°2)^T M x°2.
Polynomial kr_target(const RatMat& m, unsigned r);

VerifyReport verify_certificate(const RatMat& m, const Certificate& c, VerifyMode mode, double tol = 1e-6);
/// Sos certificates carry their own target; no matrix involved.
VerifyReport verify_sos(const Certificate& c, VerifyMode mode, double tol = 1e-6);

/// Rounds a float certificate for M to an exact one; nothing if the rounded
/// certificate does not verify exactly.
std::optional<Certificate> round_certificate(const RatMat& m, const Certificate& c,
                                             std::uint64_t denominator_bound = 27720);

/// SHA-256 (hex) of the canonical text form of M.
std::string matrix_sha(const RatMat& m);

/// JSON object {"cone","order","matrix_sha","scalars","data"}.
std::string certificate_to_json(const Certificate& c, const RatMat& m);
/// Parses a certificate; throws std::invalid_argument on malformed input.
/// `sha` receives the recorded matrix hash.
Certificate certificate_from_json(const std::string& text, std::string* sha = nullptr);
/// Field-by-field schema problems; empty when the certificate parses.
std::vector<std::string> certificate_schema_errors(const std::string& text);

}  // namespace copkit
