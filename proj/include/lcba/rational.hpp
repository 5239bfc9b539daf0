#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

namespace lcba {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

BigInt floor_of(const Rational& x);
BigInt ceil_of(const Rational& x);
long long floor_ll(const Rational& x);
long long ceil_ll(const Rational& x);

// 2^e for any integer e.
Rational pow2(long long e);

// Accepts "3", "-2", "0.25", "1/60", "1e-3". Throws ConfigError on junk.
Rational parse_rational(std::string_view text);

// "p/q", or "p" when integral.
std::string to_fraction(const Rational& x);

// Terminating decimal when one exists with at most 18 fractional digits,
// otherwise the fraction form.  Round-trips through parse_rational.
std::string to_exact_text(const Rational& x);

double to_double(const Rational& x);
Rational from_ratio(long long num, long long den);

}  // namespace lcba
