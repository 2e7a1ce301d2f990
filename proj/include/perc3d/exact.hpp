#pragma once

#include <array>
#include <cctype>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "perc3d/errors.hpp"

namespace perc3d {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using Matrix3 = std::array<std::array<BigInt, 3>, 3>;

inline BigInt pow_big(BigInt base, unsigned exp) {
  BigInt out = 1;
  while (exp != 0) {
    if (exp & 1U) out *= base;
    base *= base;
    exp >>= 1U;
  }
  return out;
}

// Accepts "7", "-3", "0.999999", "3/100" and returns the exact value.
inline Rational parse_rational(std::string_view text) {
  const auto fail = [&]() -> Rational {
    throw DomainError("not an exact number: '" + std::string(text) + "'");
  };
  if (text.empty()) return fail();
  const auto all_digits = [](std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
  };
  bool negative = false;
  std::string_view body = text;
  if (body.front() == '-' || body.front() == '+') {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  Rational value;
  if (const auto slash = body.find('/'); slash != std::string_view::npos) {
    const auto num = body.substr(0, slash);
    const auto den = body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) return fail();
    const BigInt d{std::string(den)};
    if (d == 0) return fail();
    value = Rational(BigInt(std::string(num)), d);
  } else if (const auto dot = body.find('.'); dot != std::string_view::npos) {
    const auto whole = body.substr(0, dot);
    const auto frac = body.substr(dot + 1);
    if ((!whole.empty() && !all_digits(whole)) || !all_digits(frac)) return fail();
    const BigInt scale = pow_big(10, static_cast<unsigned>(frac.size()));
    const BigInt w = whole.empty() ? BigInt(0) : BigInt(std::string(whole));
    value = Rational(w * scale + BigInt(std::string(frac)), scale);
  } else {
    if (!all_digits(body)) return fail();
    value = Rational(BigInt(std::string(body)));
  }
  return negative ? Rational(-value) : value;
}

// Exact decimal text when the value terminates in base ten ("0.2485"),
// otherwise "num/den".
inline std::string format_exact(const Rational& x) {
  BigInt num = boost::multiprecision::numerator(x);
  BigInt den = boost::multiprecision::denominator(x);
  BigInt rest = den;
  unsigned places = 0;
  unsigned twos = 0;
  unsigned fives = 0;
  while (rest % 2 == 0) {
    rest /= 2;
    ++twos;
  }
  while (rest % 5 == 0) {
    rest /= 5;
    ++fives;
  }
  if (rest != 1) return num.str() + "/" + den.str();
  places = std::max(twos, fives);
  const bool negative = num < 0;
  if (negative) num = -num;
  const BigInt scaled = num * pow_big(10, places) / den;
  std::string digits = scaled.str();
  if (places == 0) return (negative ? "-" : "") + digits;
  if (digits.size() <= places) digits.insert(0, places + 1 - digits.size(), '0');
  digits.insert(digits.size() - places, ".");
  return (negative ? "-" : "") + digits;
}

// Scientific notation with `digits` significant digits, truncated (not
// rounded) so every printed digit is exact: 4.79637e-07.
inline std::string format_scientific(const Rational& x, int digits = 7) {
  if (x == 0) return "0";
  const bool negative = x < 0;
  Rational a = negative ? Rational(-x) : x;
  int exponent = 0;
  while (a >= 10) {
    a /= 10;
    ++exponent;
  }
  while (a < 1) {
    a *= 10;
    --exponent;
  }
  const Rational scaled = a * Rational(pow_big(10, static_cast<unsigned>(digits - 1)));
  const BigInt truncated =
      boost::multiprecision::numerator(scaled) / boost::multiprecision::denominator(scaled);
  std::string mant = truncated.str();
  if (mant.size() > 1) mant.insert(1, ".");
  std::string exp = std::to_string(std::abs(exponent));
  if (exp.size() < 2) exp.insert(0, "0");
  return (negative ? "-" : "") + mant + "e" + (exponent < 0 ? "-" : "+") + exp;
}

inline double to_double(const Rational& x) { return x.convert_to<double>(); }

}  // namespace perc3d
