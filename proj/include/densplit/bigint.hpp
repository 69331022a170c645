#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace densplit {

using BigNat = mpz_class;
using Rational = mpq_class;

/// Parses "p/q", a decimal such as "0.25", or an integer. Result is canonical.
Rational parse_rational(std::string_view text);

/// "p/q", or "p" when the denominator is 1.
std::string to_string(const Rational& q);
std::string to_string(const BigNat& n);

BigNat big(std::uint64_t v);
bool fits_u64(const BigNat& n);
std::uint64_t to_u64(const BigNat& n);

/// Exact 2^e for any integer e.
Rational pow2(long exponent);

Rational ratio(const BigNat& num, const BigNat& den);

/// Rendering only; never used in a decision.
double to_double(const Rational& q);

}  // namespace densplit
