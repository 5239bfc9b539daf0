#include "lcba/rational.hpp"

#include "lcba/types.hpp"

#include <cctype>

namespace lcba {

using boost::multiprecision::denominator;
using boost::multiprecision::numerator;

BigInt floor_of(const Rational& x) {
  BigInt num = numerator(x);
  BigInt den = denominator(x);
  BigInt q = num / den;
  if (num % den != 0 && num < 0) q -= 1;
  return q;
}

BigInt ceil_of(const Rational& x) {
  BigInt num = numerator(x);
  BigInt den = denominator(x);
  BigInt q = num / den;
  if (num % den != 0 && num > 0) q += 1;
  return q;
}

long long floor_ll(const Rational& x) { return floor_of(x).convert_to<long long>(); }
long long ceil_ll(const Rational& x) { return ceil_of(x).convert_to<long long>(); }

Rational pow2(long long e) {
  BigInt p = 1;
  p <<= static_cast<unsigned>(e < 0 ? -e : e);
  if (e >= 0) return Rational(p);
  return Rational(BigInt(1), p);
}

namespace {

BigInt pow10(unsigned e) {
  BigInt p = 1;
  for (unsigned i = 0; i < e; ++i) p *= 10;
  return p;
}

Rational parse_decimal(std::string_view s, std::string_view whole) {
  bool negative = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    negative = s[0] == '-';
    s.remove_prefix(1);
  }
  long long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_part = s.substr(e + 1);
    s = s.substr(0, e);
    bool exp_negative = false;
    if (!exp_part.empty() && (exp_part[0] == '-' || exp_part[0] == '+')) {
      exp_negative = exp_part[0] == '-';
      exp_part.remove_prefix(1);
    }
    if (exp_part.empty() || exp_part.size() > 4) throw ConfigError("malformed number '" + std::string(whole) + "'");
    for (char c : exp_part) {
      if (!std::isdigit(static_cast<unsigned char>(c))) throw ConfigError("malformed number '" + std::string(whole) + "'");
      exponent = exponent * 10 + (c - '0');
    }
    if (exp_negative) exponent = -exponent;
  }
  BigInt digits = 0;
  unsigned fraction_digits = 0;
  bool seen_point = false;
  bool seen_digit = false;
  for (char c : s) {
    if (c == '.') {
      if (seen_point) throw ConfigError("malformed number '" + std::string(whole) + "'");
      seen_point = true;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(c))) throw ConfigError("malformed number '" + std::string(whole) + "'");
    seen_digit = true;
    digits = digits * 10 + (c - '0');
    if (seen_point) ++fraction_digits;
  }
  if (!seen_digit) throw ConfigError("malformed number '" + std::string(whole) + "'");
  Rational value(digits, pow10(fraction_digits));
  if (exponent > 0) value *= Rational(pow10(static_cast<unsigned>(exponent)));
  if (exponent < 0) value /= Rational(pow10(static_cast<unsigned>(-exponent)));
  return negative ? Rational(-value) : value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) throw ConfigError("empty number");
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    Rational num = parse_decimal(s.substr(0, slash), text);
    Rational den = parse_decimal(s.substr(slash + 1), text);
    if (den == 0) throw ConfigError("zero denominator in '" + std::string(text) + "'");
    return num / den;
  }
  return parse_decimal(s, text);
}

std::string to_fraction(const Rational& x) {
  if (denominator(x) == 1) return numerator(x).str();
  return numerator(x).str() + "/" + denominator(x).str();
}

std::string to_exact_text(const Rational& x) {
  BigInt den = denominator(x);
  if (den == 1) return numerator(x).str();
  // A terminating decimal exists iff den has no prime factors besides 2 and 5.
  BigInt rest = den;
  unsigned twos = 0;
  unsigned fives = 0;
  while (rest % 2 == 0) { rest /= 2; ++twos; }
  while (rest % 5 == 0) { rest /= 5; ++fives; }
  unsigned places = std::max(twos, fives);
  if (rest != 1 || places > 18) return to_fraction(x);
  BigInt num = numerator(x);
  bool negative = num < 0;
  if (negative) num = -num;
  BigInt scaled = num * pow10(places) / den;
  std::string digits = scaled.str();
  if (digits.size() <= places) digits.insert(0, places - digits.size() + 1, '0');
  std::string out = digits.substr(0, digits.size() - places) + "." + digits.substr(digits.size() - places);
  return negative ? "-" + out : out;
}

double to_double(const Rational& x) { return x.convert_to<double>(); }

Rational from_ratio(long long num, long long den) { return Rational(BigInt(num), BigInt(den)); }

}  // namespace lcba
