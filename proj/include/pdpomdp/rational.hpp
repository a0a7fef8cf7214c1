#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>

namespace pdpomdp {

using Rational = mpq_class;
using Integer = mpz_class;

/// Parses "p/q", a plain integer, or a finite decimal ("0.125", ".5").
/// Decimals are converted exactly. Signs and exponents are rejected.
std::optional<Rational> parse_rational(std::string_view text);

/// "num/den", or just "num" when the denominator is 1.
std::string exact_string(const Rational& value);

/// Decimal rendering with the given number of significant digits.
std::string decimal_string(const Rational& value, int significant = 12);

}  // namespace pdpomdp
