// Chi-square goodness-of-fit helpers for sampler tests.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace statutil {

// Regularized upper incomplete gamma Q(s, x) via series / continued fraction.
inline double gamma_q(double s, double x) {
  if (x < 0 || s <= 0) throw std::invalid_argument("gamma_q domain");
  if (x == 0) return 1;
  if (x < s + 1) {
    // P(s,x) by series, return 1 - P.
    double term = 1.0 / s, sum = term, a = s;
    for (int i = 0; i < 1000; i++) {
      a += 1;
      term *= x / a;
      sum += term;
      if (std::fabs(term) < std::fabs(sum) * 1e-15) break;
    }
    double ln_p = -x + s * std::log(x) - std::lgamma(s) + std::log(sum);
    return 1 - std::exp(ln_p);
  }
  // Q(s,x) by Lentz continued fraction.
  double tiny = 1e-300;
  double b = x + 1 - s, c = 1 / tiny, d = 1 / b, h = d;
  for (int i = 1; i <= 1000; i++) {
    double an = -i * (i - s);
    b += 2;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + s * std::log(x) - std::lgamma(s)) * h;
}

// p-value of the chi-square uniformity test over `counts` given equal
// expected frequencies.
inline double chi_square_uniform_pvalue(const std::vector<uint64_t>& counts) {
  uint64_t total = 0;
  for (uint64_t c : counts) total += c;
  if (counts.size() < 2 || total == 0) throw std::invalid_argument("chi-square needs data");
  const double expected = double(total) / double(counts.size());
  double stat = 0;
  for (uint64_t c : counts) {
    double d = double(c) - expected;
    stat += d * d / expected;
  }
  return gamma_q(double(counts.size() - 1) / 2.0, stat / 2.0);
}

}  // namespace statutil
