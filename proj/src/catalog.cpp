#include "copkit/catalog.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace copkit {

namespace {

const std::vector<std::vector<Rational>> kHornSigns = {{1, 1, -1, -1, 1},
                                                       {1, 1, 1, -1, -1},
                                                       {-1, 1, 1, 1, -1},
                                                       {-1, -1, 1, 1, 1},
                                                       {1, -1, -1, 1, 1}};

// Cubic monomials x_a^2 x_b^2 x_c^2 of the Horn identity, 0-based.
constexpr std::array<std::array<std::size_t, 3>, 5> kHornTriples = {
    {{0, 1, 4}, {0, 1, 2}, {1, 2, 3}, {2, 3, 4}, {0, 3, 4}}};

Polynomial var(std::size_t n, std::size_t i) { return Polynomial::variable(n, i); }
Polynomial cst(std::size_t n, const Rational& c) { return Polynomial::constant(n, c); }

IdentityCheck compare(const Polynomial& lhs, const Polynomial& rhs) {
  IdentityCheck c;
  const Polynomial diff = lhs - rhs;
  c.mismatched_terms = diff.term_count();
  c.pass = diff.is_zero();
  c.message = c.pass ? "identity holds" : std::to_string(c.mismatched_terms) + " coefficients differ";
  return c;
}

}  // namespace

RatMat horn() { return RatMat::from_rows(kHornSigns); }

RatMat horn_scaled(const Rational& t) {
  RatMat h = horn();
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = i; j < 5; ++j)
      if (h(i, j) == 1) h.set(i, j, t);
  return h;
}

bool TPsiParams::valid() const {
  double sum = 0;
  for (double v : psi) {
    if (!(v > 0)) return false;
    sum += v;
  }
  return sum < std::numbers::pi;
}

FloatMat t_psi(const TPsiParams& p) {
  if (!p.valid()) throw std::invalid_argument("psi needs positive angles with sum below pi");
  const auto& s = p.psi;
  auto c = [](double v) { return std::cos(v); };
  const double p1 = s[0], p2 = s[1], p3 = s[2], p4 = s[3], p5 = s[4];
  return FloatMat::from_rows({{1, -c(p4), c(p4 + p5), c(p2 + p3), -c(p3)},
                              {-c(p4), 1, -c(p5), c(p5 + p1), c(p3 + p4)},
                              {c(p4 + p5), -c(p5), 1, -c(p1), c(p1 + p2)},
                              {c(p2 + p3), c(p5 + p1), -c(p1), 1, -c(p2)},
                              {-c(p3), c(p3 + p4), c(p1 + p2), -c(p2), 1}});
}

std::array<std::vector<double>, 5> t_psi_zeros(const TPsiParams& p) {
  if (!p.valid()) throw std::invalid_argument("psi needs positive angles with sum below pi");
  const auto& s = p.psi;
  auto sn = [](double v) { return std::sin(v); };
  const double p1 = s[0], p2 = s[1], p3 = s[2], p4 = s[3], p5 = s[4];
  std::array<std::vector<double>, 5> u = {{
      {sn(p5), sn(p4 + p5), sn(p4), 0, 0},
      {sn(p3 + p4), sn(p3), 0, 0, sn(p4)},
      {0, sn(p1), sn(p1 + p5), sn(p5), 0},
      {0, 0, sn(p2), sn(p1 + p2), sn(p1)},
      {sn(p2), 0, 0, sn(p3), sn(p2 + p3)},
  }};
  for (auto& v : u) {
    double total = 0;
    for (double x : v) total += x;
    for (double& x : v) x /= total;
  }
  return u;
}

Polynomial motzkin_poly() {
  const Polynomial x = var(2, 0), y = var(2, 1);
  return x * x * x * x * y * y + x * x * y * y * y * y - Rational(3) * (x * x * y * y) + cst(2, 1);
}

Polynomial motzkin_form() {
  const Polynomial x = var(3, 0), y = var(3, 1), z = var(3, 2);
  const Polynomial z2 = z * z;
  return x * x * x * x * y * y + x * x * y * y * y * y - Rational(3) * (x * x * y * y * z2) + z2 * z2 * z2;
}

Polynomial motzkin_q() {
  const Polynomial form = motzkin_form();
  Polynomial m(4);
  for (const auto& [e, c] : form.terms())
    m.add_term(Exponent(std::vector<unsigned>{e[0], e[1], e[2], 0}), c);
  const Polynomial w = var(4, 3);
  const Polynomial w2 = w * w;
  return m * m + w2 * w2 * w2 * m;
}

RatMat matrix_m() { return RatMat::from_rows({{0, 1, 0}, {1, 0, 0}, {0, 0, 0}}); }

RatMat padding_block(std::size_t m) {
  if (m < 2) throw std::invalid_argument("padding block needs m >= 2");
  RatMat b(m);
  const Rational d(1, static_cast<long>(m - 1));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) {
      Rational v = (i == j ? Rational(static_cast<long>(m - 1)) : Rational(-1)) * d;
      v.canonicalize();
      b.set(i, j, v);
    }
  return b;
}

std::vector<NamedMatrix> block_examples() {
  std::vector<NamedMatrix> out;
  out.push_back({"horn_plus_zero", direct_sum(horn(), RatMat(1))});
  out.push_back({"horn_plus_psd", direct_sum(horn(), RatMat::from_rows({{1, -1}, {-1, 1}}))});
  for (std::size_t m = 2; m <= 4; ++m) out.push_back({"padding:" + std::to_string(m), direct_sum(horn(), padding_block(m))});
  out.push_back({"matrix_m", matrix_m()});
  return out;
}

IdentityCheck verify_horn_identity(const RatMat& lhs_matrix, const std::array<Rational, 5>& coefficients) {
  if (lhs_matrix.size() != 5) throw std::invalid_argument("the Horn identity is 5x5");
  const std::size_t n = 5;
  std::vector<Polynomial> sq;
  for (std::size_t i = 0; i < n; ++i) sq.push_back(var(n, i) * var(n, i));
  Polynomial lhs = Polynomial::square_sum(n) * substitute_squares(quad_form(lhs_matrix));
  Polynomial rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    Polynomial inner(n);
    for (std::size_t j = 0; j < n; ++j) inner += kHornSigns[i][j] * sq[j];
    rhs += sq[i] * inner * inner;
  }
  for (std::size_t k = 0; k < 5; ++k) {
    const auto& t = kHornTriples[k];
    rhs += coefficients[k] * (sq[t[0]] * sq[t[1]] * sq[t[2]]);
  }
  return compare(lhs, rhs);
}

IdentityCheck verify_horn_identity() { return verify_horn_identity(horn(), {4, 4, 4, 4, 4}); }

IdentitySides motzkin_certificate_sides(bool drop_square) {
  const Polynomial x = var(2, 0), y = var(2, 1);
  const Polynomial x2 = x * x, y2 = y * y, r2 = x2 + y2;
  IdentitySides s;
  s.lhs = r2 * r2 * motzkin_poly();
  const Polynomial f = r2 - cst(2, 2);
  s.rhs = x2 * y2 * (r2 + cst(2, 1)) * f * f;
  if (!drop_square) s.rhs += (x2 - y2) * (x2 - y2);
  return s;
}

IdentityCheck verify_motzkin_certificate(bool drop_square) {
  IdentitySides s = motzkin_certificate_sides(drop_square);
  return compare(s.lhs, s.rhs);
}

CatalogItem catalog_lookup(const std::string& name) {
  CatalogItem item;
  const auto colon = name.find(':');
  const std::string head = name.substr(0, colon), arg = colon == std::string::npos ? "" : name.substr(colon + 1);
  const bool has_arg = colon != std::string::npos;
  auto no_arg = [&] {
    if (has_arg) throw std::invalid_argument("catalog item takes no argument: " + head);
  };
  if (head == "horn") {
    no_arg();
    item.exact = horn();
  } else if (head == "horn_scaled") {
    if (!has_arg) throw std::invalid_argument("horn_scaled needs a value, e.g. horn_scaled:11/10");
    item.exact = horn_scaled(parse_rational(arg));
  } else if (head == "tpsi") {
    TPsiParams p;
    std::istringstream in(arg);
    std::string tok;
    std::size_t k = 0;
    while (std::getline(in, tok, ',')) {
      if (k == 5) throw std::invalid_argument("tpsi needs five angles");
      std::size_t used = 0;
      try {
        p.psi[k] = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != tok.size()) throw std::invalid_argument("tpsi: bad angle " + tok);
      ++k;
    }
    if (k != 5) throw std::invalid_argument("tpsi needs five angles");
    item.numeric = t_psi(p);
  } else if (head == "matrix_m") {
    no_arg();
    item.exact = matrix_m();
  } else if (head == "horn_plus_zero") {
    no_arg();
    item.exact = direct_sum(horn(), RatMat(1));
  } else if (head == "horn_plus_psd") {
    no_arg();
    item.exact = direct_sum(horn(), RatMat::from_rows({{1, -1}, {-1, 1}}));
  } else if (head == "padding") {
    std::size_t used = 0;
    unsigned long m = 0;
    try {
      m = std::stoul(arg, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != arg.size()) throw std::invalid_argument("padding needs a size, e.g. padding:3");
    item.exact = direct_sum(horn(), padding_block(m));
  } else if (head == "motzkin") {
    no_arg();
    item.polynomial = motzkin_form();
  } else {
    throw std::invalid_argument("unknown catalog item: " + name);
  }
  return item;
}

std::vector<std::string> catalog_names() {
  return {"horn", "horn_scaled:T", "tpsi:a,b,c,d,e", "matrix_m", "horn_plus_zero", "horn_plus_psd", "padding:M",
          "motzkin"};
}

}  // namespace copkit
