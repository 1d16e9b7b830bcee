#pragma once

#include "improv/core.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace improv {

// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);

// Exact (Clopper-Pearson) binomial interval at the given confidence.
struct BinomialInterval {
  double low = 0, high = 1;
};
BinomialInterval clopper_pearson(uint64_t successes, uint64_t trials, double confidence = 0.99);

struct LabelStat {
  int64_t label_value = 0;
  uint64_t count = 0;
  double frequency = 0;
  BinomialInterval interval;  // 99% by default
  bool pass = false;          // interval intersects [lambda, rho]
};

struct EmpiricalReport {
  uint64_t sample_count = 0;
  std::vector<LabelStat> labels;
  double mean_cost = 0;
  double cost_stderr = 0;
  bool cost_pass = false;  // mean - 3*SE <= c
  std::vector<std::pair<double, uint64_t>> cost_histogram;  // (cost, count), ascending
  std::vector<std::string> traces;  // leading traces for plotting/dumps

  bool all_pass() const;
};

struct SampleRecord {
  size_t label_index = 0;
  Rational cost;
};

// Builds the report from per-sample (label, cost) records. The verdict
// conventions are heuristics (3-sigma / 99% intervals), not formal bounds.
EmpiricalReport build_report(const std::vector<int64_t>& label_values,
                             const std::vector<SampleRecord>& samples,
                             const Rational& label_lower, const Rational& label_upper,
                             const Rational& cost_bound, std::vector<std::string> traces = {},
                             double confidence = 0.99);

std::string report_to_json(const EmpiricalReport& report);

}  // namespace improv
