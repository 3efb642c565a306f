#include "copkit/rational.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

namespace copkit {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

Integer parse_integer(std::string_view s) {
  std::string_view body = s;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) body.remove_prefix(1);
  if (!all_digits(body)) throw std::invalid_argument("malformed integer '" + std::string(s) + "'");
  std::string owned(s.front() == '+' ? s.substr(1) : s);
  return Integer(owned, 10);
}

Rational parse_decimal(std::string_view s) {
  bool negative = false;
  std::string_view rest = s;
  if (!rest.empty() && (rest.front() == '-' || rest.front() == '+')) {
    negative = rest.front() == '-';
    rest.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = rest.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_part = rest.substr(e + 1);
    rest = rest.substr(0, e);
    Integer ez = parse_integer(exp_part);
    if (!ez.fits_slong_p() || std::abs(ez.get_si()) > 4000)
      throw std::invalid_argument("exponent out of range in '" + std::string(s) + "'");
    exponent = ez.get_si();
  }
  std::string digits;
  long frac_len = 0;
  if (auto dot = rest.find('.'); dot != std::string_view::npos) {
    std::string_view ip = rest.substr(0, dot), fp = rest.substr(dot + 1);
    if (ip.empty() && fp.empty()) throw std::invalid_argument("malformed number '" + std::string(s) + "'");
    if ((!ip.empty() && !all_digits(ip)) || (!fp.empty() && !all_digits(fp)))
      throw std::invalid_argument("malformed number '" + std::string(s) + "'");
    digits = std::string(ip) + std::string(fp);
    frac_len = static_cast<long>(fp.size());
  } else {
    if (!all_digits(rest)) throw std::invalid_argument("malformed number '" + std::string(s) + "'");
    digits = std::string(rest);
  }
  Rational value{Integer(digits, 10)};
  long shift = exponent - frac_len;
  Integer ten_pow;
  mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(std::abs(shift)));
  if (shift >= 0)
    value *= ten_pow;
  else
    value /= ten_pow;
  value.canonicalize();
  return negative ? Rational(-value) : value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw std::invalid_argument("empty rational");
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Integer num = parse_integer(text.substr(0, slash));
    Integer den = parse_integer(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    Rational q(num, den);
    q.canonicalize();
    return q;
  }
  return parse_decimal(text);
}

std::string to_string(const Rational& value) {
  Rational q = value;
  q.canonicalize();
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational from_double(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("non-finite value has no rational form");
  Rational q;
  mpq_set_d(q.get_mpq_t(), v);
  return q;
}

double to_double(const Rational& q) { return q.get_d(); }

Rational approximate(double v, std::uint64_t max_den) {
  if (!std::isfinite(v)) throw std::invalid_argument("non-finite value has no rational form");
  if (max_den == 0) max_den = 1;
  // Work on the exact dyadic value so the expansion is reproducible.
  const Rational x = from_double(v);
  const Integer bound(static_cast<unsigned long>(max_den));
  Integer p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  Rational rem = x;
  for (int iter = 0; iter < 200; ++iter) {
    Integer a = floor(rem);
    Integer q2 = a * q1 + q0;
    if (q2 > bound) {
      // Semiconvergent with the largest admissible partial quotient.
      Integer k = (bound - q0) / q1;
      Rational semi(Integer(k * p1 + p0), Integer(k * q1 + q0));
      semi.canonicalize();
      Rational conv(p1, q1);
      conv.canonicalize();
      Rational d_semi = abs(semi - x), d_conv = abs(conv - x);
      return d_semi < d_conv ? semi : conv;
    }
    Integer p2 = a * p1 + p0;
    p0 = p1; q0 = q1; p1 = p2; q1 = q2;
    Rational frac = rem - Rational(a);
    if (frac == 0) break;
    rem = 1 / frac;
  }
  Rational out(p1, q1);
  out.canonicalize();
  return out;
}

Integer factorial(unsigned k) {
  Integer f;
  mpz_fac_ui(f.get_mpz_t(), k);
  return f;
}

Integer floor(const Rational& q) {
  Integer out;
  mpz_fdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return out;
}

}  // namespace copkit
