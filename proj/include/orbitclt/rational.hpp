#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace orbitclt {

using Rational = mpq_class;
using BigInt = mpz_class;

/// Parses "p/q", "p" or a finite decimal such as "0.25". Throws ParseError.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" form ("p" when q == 1).
std::string format_rational(const Rational& value);

Rational rational_pow(const Rational& base, unsigned exponent);

/// Least j >= 0 with base^j < bound (0 < base < 1, bound > 0).
unsigned min_exponent_below(const Rational& base, const Rational& bound);

/// Least j >= 0 with base^j <= bound (0 < base < 1, bound > 0).
unsigned min_exponent_at_or_below(const Rational& base, const Rational& bound);

inline double to_double(const Rational& value) { return value.get_d(); }

std::string format_bigint(const BigInt& value);

} // namespace orbitclt
