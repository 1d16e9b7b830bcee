#include "improv/rational.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace improv {

namespace {

BigInt parse_big(std::string_view s) {
  if (s.empty()) throw std::invalid_argument("empty integer literal");
  bool neg = false;
  if (s.front() == '+' || s.front() == '-') {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  // Strip leading zeros: cpp_int would read "025" as octal.
  while (s.size() > 1 && s.front() == '0') s.remove_prefix(1);
  if (s.empty()) throw std::invalid_argument("empty integer literal");
  BigInt v{std::string(s)};
  if (neg) v = -v;
  return v;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  // Trim surrounding whitespace.
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw std::invalid_argument("empty rational literal");

  auto slash = text.find('/');
  if (slash != std::string_view::npos) {
    BigInt num = parse_big(text.substr(0, slash));
    BigInt den = parse_big(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator");
    return Rational(num, den);
  }

  bool neg = false;
  if (text.front() == '+' || text.front() == '-') {
    neg = text.front() == '-';
    text.remove_prefix(1);
  }

  // Split mantissa / exponent.
  long exp10 = 0;
  auto epos = text.find_first_of("eE");
  if (epos != std::string_view::npos) {
    exp10 = std::stol(std::string(text.substr(epos + 1)));
    text = text.substr(0, epos);
  }

  std::string digits;
  long frac_digits = 0;
  bool seen_dot = false;
  for (char c : text) {
    if (c == '.') {
      if (seen_dot) throw std::invalid_argument("malformed rational literal");
      seen_dot = true;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(c))) throw std::invalid_argument("malformed rational literal");
    digits.push_back(c);
    if (seen_dot) frac_digits++;
  }
  if (digits.empty()) throw std::invalid_argument("malformed rational literal");
  while (digits.size() > 1 && digits.front() == '0') digits.erase(digits.begin());

  BigInt mant(digits);
  if (neg) mant = -mant;
  long net = exp10 - frac_digits;
  BigInt num = mant, den = 1;
  if (net >= 0) {
    num *= boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(net));
  } else {
    den = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(-net));
  }
  return Rational(num, den);
}

std::string rational_to_string(const Rational& r) {
  std::string s = numerator(r).str();
  if (denominator(r) != 1) {
    s += '/';
    s += denominator(r).str();
  }
  return s;
}

std::string rational_to_decimal(const Rational& r, int digits) {
  std::ostringstream out;
  out.precision(digits);
  out << to_double(r);
  return out.str();
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

BigInt rational_floor(const Rational& r) {
  BigInt q = numerator(r) / denominator(r);
  if (r < 0 && q * denominator(r) != numerator(r)) q -= 1;
  return q;
}

Rational rational_pow(const Rational& r, long e) {
  if (e == 0) return Rational(1);
  if (e < 0) {
    if (r == 0) throw std::domain_error("zero to negative power");
    return 1 / rational_pow(r, -e);
  }
  BigInt n = boost::multiprecision::pow(numerator(r), static_cast<unsigned>(e));
  BigInt d = boost::multiprecision::pow(denominator(r), static_cast<unsigned>(e));
  return Rational(n, d);
}

namespace {

// Largest m with m^n <= v.
BigInt integer_root_floor(const BigInt& v, unsigned n) {
  if (v <= 1) return v;
  BigInt lo = 1;
  BigInt hi = BigInt(1) << (static_cast<unsigned>(msb(v)) / n + 1);
  while (lo < hi) {
    BigInt mid = (lo + hi + 1) / 2;
    if (boost::multiprecision::pow(mid, n) <= v)
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

}  // namespace

Rational rational_root_floor(const Rational& r, unsigned n, unsigned scale_bits) {
  if (r < 0) throw std::domain_error("root of negative rational");
  if (r == 0 || n == 0) return r;
  BigInt num = numerator(r), den = denominator(r);
  BigInt rn = integer_root_floor(num, n);
  BigInt rd = integer_root_floor(den, n);
  if (boost::multiprecision::pow(rn, n) == num && boost::multiprecision::pow(rd, n) == den) {
    return Rational(rn, rd);  // perfect n-th power
  }
  // floor(root * 2^k) = floor((num * 2^{kn} / den)^{1/n})
  BigInt scaled = (num << (static_cast<unsigned long long>(scale_bits) * n)) / den;
  return Rational(integer_root_floor(scaled, n), BigInt(1) << scale_bits);
}

}  // namespace improv
