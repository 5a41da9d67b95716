#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace prodstate {

using Integer = mpz_class;
using Rational = mpq_class;

// Parses "p/q", an integer, or a plain decimal such as "0.25".
// Throws std::invalid_argument on malformed input or a zero denominator.
Rational parse_rational(std::string_view text);

// Canonical "p/q" form, or "p" when the denominator is 1.
std::string format_rational(const Rational& r);

// base^exp for a possibly negative integer exponent; base must be nonzero
// when exp < 0.
Rational rational_pow(const Rational& base, long exp);

inline Rational rational_min(const Rational& a, const Rational& b) { return a < b ? a : b; }
inline Rational rational_max(const Rational& a, const Rational& b) { return a < b ? b : a; }

}  // namespace prodstate
