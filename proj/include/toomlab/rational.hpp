#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace toomlab {

// Exact rationals backed by GMP; mpq_class keeps values canonical (lowest
// terms, positive denominator) after every arithmetic operation.
using Rational = mpq_class;
using BigInt = mpz_class;

/// Always "num/den", including integers ("3/1") and zero ("0/1").
std::string to_fraction_string(const Rational& q);

/// Accepts "num/den" or a bare integer; rejects zero denominators.
Rational parse_rational(std::string_view text);

}  // namespace toomlab
