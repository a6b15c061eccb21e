#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace divnorm {

using Rational = mpq_class;
using BigInt = mpz_class;

// log2 of a nonnegative rational; -inf for zero. Stays finite for values far
// outside the binary64 range.
double log2_rational(const Rational& value);

// Nearest double when numerator and denominator are both below 2^53;
// otherwise GMP's truncating conversion.
double to_double(const Rational& value);

// Parses `num/den`, an integer, or (when allow_decimal) a plain decimal such as
// 0.9. The result is canonicalized.
Rational parse_rational(std::string_view text, bool allow_decimal = false);

// Canonical `num/den` form, always with a denominator.
std::string format_rational(const Rational& value);

}  // namespace divnorm
