#pragma once

// Named matrices and polynomials, and exact checks of the explicit
// identities attached to them.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "copkit/polynomial.hpp"
#include "copkit/symmat.hpp"

namespace copkit {

RatMat horn();
/// Horn matrix with every entry 1 (diagonal included) replaced by t.
RatMat horn_scaled(const Rational& t);

/// Angles psi_1..psi_5 (radians), stored 0-based.
struct TPsiParams {
  std::array<double, 5> psi{};
  bool valid() const;  // psi_i > 0 and sum < pi
};

FloatMat t_psi(const TPsiParams& p);
/// The five zeros v_i = u_i / |u_i|_1 of x^T T(psi) x in the simplex.
std::array<std::vector<double>, 5> t_psi_zeros(const TPsiParams& p);

/// x^4 y^2 + x^2 y^4 - 3 x^2 y^2 + 1.
Polynomial motzkin_poly();
/// x^4 y^2 + x^2 y^4 - 3 x^2 y^2 z^2 + z^6.
Polynomial motzkin_form();
/// m^2 + w^6 m in (x, y, z, w).
Polynomial motzkin_q();

/// [[0,1,0],[1,0,0],[0,0,0]].
RatMat matrix_m();
/// (m I - J) / (m - 1), m >= 2.
RatMat padding_block(std::size_t m);

struct NamedMatrix {
  std::string name;
  RatMat matrix;
};

/// H + 0, H + [[1,-1],[-1,1]], H + padding_block(m) for m = 2..4, matrix_m.
std::vector<NamedMatrix> block_examples();

struct IdentityCheck {
  bool pass = false;
  std::size_t mismatched_terms = 0;
  std::string message;
};

/// (sum x_i^2) (x°2)^T L x°2 against the five weighted squares plus the
/// five cubic monomials x_a^2 x_b^2 x_c^2 with the given coefficients.
IdentityCheck verify_horn_identity(const RatMat& lhs, const std::array<Rational, 5>& coefficients);
IdentityCheck verify_horn_identity();

struct IdentitySides {
  Polynomial lhs, rhs;
};

/// (x^2+y^2)^2 h against x^2 y^2 (x^2+y^2+1)(x^2+y^2-2)^2 + (x^2-y^2)^2;
/// `drop_square` omits the last term.
IdentitySides motzkin_certificate_sides(bool drop_square = false);
IdentityCheck verify_motzkin_certificate(bool drop_square = false);

/// Catalog lookup by name: "horn", "horn_scaled:T", "tpsi:a,b,c,d,e",
/// "matrix_m", "horn_plus_zero", "horn_plus_psd", "padding:M", "motzkin".
/// Exactly one of the members is set.
struct CatalogItem {
  std::optional<RatMat> exact;
  std::optional<FloatMat> numeric;
  std::optional<Polynomial> polynomial;
};

CatalogItem catalog_lookup(const std::string& name);
std::vector<std::string> catalog_names();

}  // namespace copkit
