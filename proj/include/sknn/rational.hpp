#pragma once

#include <gmpxx.h>

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sknn {

using Integer = mpz_class;
using Rational = mpq_class;  // always canonical: gcd(num, den) = 1, den > 0
using Vector = std::vector<Rational>;
using IntVector = std::vector<Integer>;

/// Parses "17", "-42.25", "1e3"-free decimals, or "p/q" into an exact rational.
Rational parse_rational(std::string_view text);

/// Parses a decimal or 0x-prefixed hexadecimal integer.
Integer parse_integer(std::string_view text);

/// Exact text form: a terminating decimal when one exists ("8.5", "-42.25"),
/// otherwise "p/q". parse_rational(to_exact_string(x)) == x.
std::string to_exact_string(const Rational& x);

/// Rounded to `digits` decimals, half away from zero, always printed with
/// exactly that many decimals.
std::string to_fixed(const Rational& x, unsigned digits);

Rational round_to(const Rational& x, unsigned digits);
Integer round_nearest(const Rational& x);

/// Mathematical floor of a / b (b > 0), i.e. (a - (a mod b)) / b with a
/// non-negative remainder.
Integer floor_div(const Integer& a, const Integer& b);

bool is_integer(const Rational& x);
Integer pow10(unsigned e);

Vector to_rationals(std::span<const Integer> v);
/// Throws DomainError when any entry is not integral.
IntVector to_integers(std::span<const Rational> v);

Rational squared_norm(std::span<const Rational> v);
Integer squared_norm(std::span<const Integer> v);

}  // namespace sknn
