#pragma once

// Exact rational scalars. Backed by GMP's mpq_class, which keeps every value
// canonical (lowest terms, positive denominator) after each operation.

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace copkit {

using Integer = mpz_class;
using Rational = mpq_class;

/// Parses "p", "p/q", or a plain decimal such as "-1.25" or "3e-2".
/// Throws std::invalid_argument on malformed input or a zero denominator.
Rational parse_rational(std::string_view text);

/// "p/q", or "p" when the denominator is one.
std::string to_string(const Rational& q);

/// Exact conversion; every finite double is a dyadic rational.
Rational from_double(double v);

double to_double(const Rational& q);

/// Best rational approximation of v with denominator at most max_den
/// (continued-fraction convergents and semiconvergents).
Rational approximate(double v, std::uint64_t max_den);

Integer factorial(unsigned k);

/// floor(q) as an exact integer.
Integer floor(const Rational& q);

inline int sign(const Rational& q) { return sgn(q); }

}  // namespace copkit
