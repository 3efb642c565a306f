#include "copkit/polynomial.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace copkit {

Exponent::Exponent(std::initializer_list<unsigned> e) : e_(e) {
  degree_ = std::accumulate(e_.begin(), e_.end(), 0u);
}

Exponent::Exponent(std::vector<unsigned> e) : e_(std::move(e)) {
  degree_ = std::accumulate(e_.begin(), e_.end(), 0u);
}

Exponent Exponent::unit(std::size_t nvars, std::size_t i) {
  Exponent e(nvars);
  e.set(i, 1);
  return e;
}

void Exponent::set(std::size_t i, unsigned v) {
  degree_ = degree_ - e_.at(i) + v;
  e_[i] = v;
}

Exponent Exponent::operator+(const Exponent& o) const {
  if (o.size() != size()) throw std::invalid_argument("exponent length mismatch");
  Exponent out(*this);
  for (std::size_t i = 0; i < e_.size(); ++i) out.e_[i] += o.e_[i];
  out.degree_ = degree_ + o.degree_;
  return out;
}

Exponent Exponent::doubled() const {
  Exponent out(*this);
  for (auto& v : out.e_) v *= 2;
  out.degree_ *= 2;
  return out;
}

std::uint64_t Exponent::parity_mask() const {
  if (e_.size() > 64) throw std::invalid_argument("parity mask supports at most 64 variables");
  std::uint64_t m = 0;
  for (std::size_t i = 0; i < e_.size(); ++i)
    if (e_[i] & 1u) m |= (std::uint64_t{1} << i);
  return m;
}

bool GrlexLess::operator()(const Exponent& a, const Exponent& b) const {
  if (a.degree() != b.degree()) return a.degree() < b.degree();
  // Same degree: the exponent with the larger leading entry is the larger one.
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i)
    if (a[i] != b[i]) return a[i] < b[i];
  return a.size() < b.size();
}

namespace {

void enumerate(std::size_t nvars, std::size_t pos, unsigned remaining, std::vector<unsigned>& cur,
               std::vector<Exponent>& out) {
  if (pos + 1 == nvars) {
    cur[pos] = remaining;
    out.emplace_back(cur);
    return;
  }
  for (unsigned k = remaining + 1; k-- > 0;) {
    cur[pos] = k;
    enumerate(nvars, pos + 1, remaining - k, cur, out);
  }
  cur[pos] = 0;
}

}  // namespace

std::vector<Exponent> exponents_of_degree(std::size_t nvars, unsigned d) {
  std::vector<Exponent> out;
  if (nvars == 0) {
    if (d == 0) out.emplace_back(std::vector<unsigned>{});
    return out;
  }
  std::vector<unsigned> cur(nvars, 0);
  enumerate(nvars, 0, d, cur, out);
  std::sort(out.begin(), out.end(), GrlexLess{});
  return out;
}

std::vector<Exponent> exponents_up_to_degree(std::size_t nvars, unsigned d) {
  std::vector<Exponent> out;
  for (unsigned k = 0; k <= d; ++k) {
    auto layer = exponents_of_degree(nvars, k);
    out.insert(out.end(), layer.begin(), layer.end());
  }
  return out;
}

Polynomial Polynomial::constant(std::size_t nvars, const Rational& c) {
  Polynomial p(nvars);
  p.add_term(Exponent(nvars), c);
  return p;
}

Polynomial Polynomial::monomial(const Exponent& e, const Rational& c) {
  Polynomial p(e.size());
  p.add_term(e, c);
  return p;
}

Polynomial Polynomial::variable(std::size_t nvars, std::size_t i) {
  return monomial(Exponent::unit(nvars, i));
}

Polynomial Polynomial::linear_sum(std::size_t nvars) {
  Polynomial p(nvars);
  for (std::size_t i = 0; i < nvars; ++i) p.add_term(Exponent::unit(nvars, i), 1);
  return p;
}

Polynomial Polynomial::square_sum(std::size_t nvars) {
  Polynomial p(nvars);
  for (std::size_t i = 0; i < nvars; ++i) {
    Exponent e(nvars);
    e.set(i, 2);
    p.add_term(e, 1);
  }
  return p;
}

int Polynomial::degree() const {
  if (terms_.empty()) return -1;
  return static_cast<int>(terms_.rbegin()->first.degree());
}

bool Polynomial::is_homogeneous() const {
  if (terms_.empty()) return true;
  return terms_.begin()->first.degree() == terms_.rbegin()->first.degree();
}

Rational Polynomial::coefficient(const Exponent& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Rational(0) : it->second;
}

void Polynomial::add_term(const Exponent& e, const Rational& c) {
  if (e.size() != nvars_) throw std::invalid_argument("exponent length does not match variable count");
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

void Polynomial::check_vars(const Polynomial& o) const {
  if (o.nvars_ != nvars_)
    throw std::invalid_argument("polynomial variable-count mismatch (" + std::to_string(nvars_) + " vs " +
                                std::to_string(o.nvars_) + ")");
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  check_vars(o);
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  check_vars(o);
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(const Rational& s) {
  if (s == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, c] : terms_) c *= s;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  a.check_vars(b);
  Polynomial out(a.nvars_);
  for (const auto& [ea, ca] : a.terms_)
    for (const auto& [eb, cb] : b.terms_) out.add_term(ea + eb, ca * cb);
  return out;
}

Rational Polynomial::max_abs_coefficient() const {
  Rational m = 0;
  for (const auto& [e, c] : terms_)
    if (abs(c) > m) m = abs(c);
  return m;
}

Polynomial poly_mul(const Polynomial& a, const Polynomial& b) { return a * b; }

Polynomial poly_pow(const Polynomial& a, unsigned r) {
  Polynomial result = Polynomial::constant(a.nvars(), 1);
  Polynomial base = a;
  while (r > 0) {
    if (r & 1u) result = result * base;
    r >>= 1;
    if (r) base = base * base;
  }
  return result;
}

Polynomial quad_form(const RatMat& m) {
  const std::size_t n = m.size();
  Polynomial p(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      Exponent e(n);
      e.set(i, e[i] + 1);
      e.set(j, e[j] + 1);
      p.add_term(e, i == j ? m(i, i) : Rational(2 * m(i, j)));
    }
  }
  return p;
}

Polynomial substitute_squares(const Polynomial& p) {
  Polynomial out(p.nvars());
  for (const auto& [e, c] : p.terms()) out.add_term(e.doubled(), c);
  return out;
}

Rational polya_coefficient(const RatMat& m, const Exponent& beta, unsigned r) {
  const std::size_t n = m.size();
  if (beta.size() != n || beta.degree() != r + 2)
    throw std::invalid_argument("polya coefficient needs |beta| = r + 2 over the matrix variables");
  Rational quad = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (beta[i] == 0) continue;
    for (std::size_t j = 0; j < n; ++j)
      if (beta[j] != 0) quad += m(i, j) * beta[i] * beta[j];
    quad -= m(i, i) * beta[i];
  }
  Integer denom = 1;
  for (std::size_t i = 0; i < n; ++i) denom *= factorial(beta[i]);
  Rational c = Rational(factorial(r)) * quad / Rational(denom);
  c.canonicalize();
  return c;
}

Polynomial polya_expand(const RatMat& m, unsigned r, PolyaMode mode) {
  const std::size_t n = m.size();
  if (mode == PolyaMode::Convolution)
    return poly_mul(poly_pow(Polynomial::linear_sum(n), r), quad_form(m));
  Polynomial out(n);
  for (const auto& beta : exponents_of_degree(n, r + 2)) out.add_term(beta, polya_coefficient(m, beta, r));
  return out;
}

Rational poly_eval(const Polynomial& p, std::span<const Rational> x) {
  if (x.size() != p.nvars()) throw std::invalid_argument("evaluation point has wrong length");
  Rational acc = 0;
  for (const auto& [e, c] : p.terms()) {
    Rational t = c;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (e[i] == 0) continue;
      Rational pw;
      mpz_pow_ui(pw.get_num_mpz_t(), x[i].get_num_mpz_t(), e[i]);
      mpz_pow_ui(pw.get_den_mpz_t(), x[i].get_den_mpz_t(), e[i]);
      t *= pw;
    }
    acc += t;
  }
  return acc;
}

double poly_eval(const Polynomial& p, std::span<const double> x) {
  if (x.size() != p.nvars()) throw std::invalid_argument("evaluation point has wrong length");
  double acc = 0.0;
  for (const auto& [e, c] : p.terms()) {
    double t = c.get_d();
    for (std::size_t i = 0; i < x.size(); ++i)
      if (e[i] != 0) t *= std::pow(x[i], static_cast<int>(e[i]));
    acc += t;
  }
  return acc;
}

std::string to_string(const Polynomial& p) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    const auto& [e, c] = *it;
    Rational mag = abs(c);
    if (first)
      os << (c < 0 ? "-" : "");
    else
      os << (c < 0 ? " - " : " + ");
    first = false;
    bool any_var = e.degree() > 0;
    if (!any_var || mag != 1) os << to_string(mag) << (any_var ? " " : "");
    bool first_var = true;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      os << (first_var ? "" : " ") << "x" << (i + 1);
      if (e[i] > 1) os << "^" << e[i];
      first_var = false;
    }
  }
  return os.str();
}

}  // namespace copkit
