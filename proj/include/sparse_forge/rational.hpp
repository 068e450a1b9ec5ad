#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace sparse_forge {

using Rational = mpq_class;
using Integer = mpz_class;

/// Parses "p/q", "p", or a decimal such as "0.125" into a canonical rational.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" text; integers are written with an explicit "/1".
std::string to_pq(const Rational& q);

/// floor(log2(|x|)) for x != 0.
long floor_log2(const Rational& x);

/// 2^e as a rational (e may be negative).
Rational pow2(long e);

/// Rounds x toward -inf (resp. +inf) to a dyadic with `bits` significant bits.
/// Exact zero stays zero.
Rational round_down(const Rational& x, long bits);
Rational round_up(const Rational& x, long bits);

/// Approximate value for display only.
double to_double(const Rational& x);

/// Size of the rational in bits (numerator + denominator).
std::size_t bit_size(const Rational& x);

}  // namespace sparse_forge
