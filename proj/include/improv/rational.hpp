#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace improv {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Parses "p/q", plain integers ("-3"), and decimal literals ("0.25", "1e-3").
// Exact: decimals become the dyadic-free fraction digits/10^k.
Rational parse_rational(std::string_view text);

// Lowest-terms text form; integral values render without the "/1".
std::string rational_to_string(const Rational& r);

// Decimal approximation with the given number of significant digits.
std::string rational_to_decimal(const Rational& r, int digits = 12);

double to_double(const Rational& r);

// Floor of a nonnegative-denominator rational as a big integer.
BigInt rational_floor(const Rational& r);

// r^e for integer e (e < 0 requires r != 0).
Rational rational_pow(const Rational& r, long e);

// Exact n-th root when `r` is a perfect rational n-th power; otherwise the
// largest rational of the form m/2^scale_bits that does not exceed the root.
Rational rational_root_floor(const Rational& r, unsigned n, unsigned scale_bits = 48);

inline Rational make_rational(long long num, long long den = 1) {
  return Rational(BigInt(num), BigInt(den));
}

}  // namespace improv
