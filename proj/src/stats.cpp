#include "improv/stats.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>

namespace improv {

namespace {

// Continued fraction for the incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-14, kTiny = 1e-300;
  double qab = a + b, qap = a + 1, qam = a - 1;
  double c = 1, d = 1 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; m++) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (x <= 0) return 0;
  if (x >= 1) return 1;
  double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                 b * std::log1p(-x);
  double bt = std::exp(ln_bt);
  if (x < (a + 1) / (a + b + 2)) return bt * beta_cf(a, b, x) / a;
  return 1 - bt * beta_cf(b, a, 1 - x) / b;
}

namespace {

// Quantile of Beta(a, b) by bisection on the regularized incomplete beta.
double beta_quantile(double a, double b, double p) {
  double lo = 0, hi = 1;
  for (int i = 0; i < 200; i++) {
    double mid = 0.5 * (lo + hi);
    if (incomplete_beta(a, b, mid) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

BinomialInterval clopper_pearson(uint64_t successes, uint64_t trials, double confidence) {
  const double alpha = 1 - confidence;
  BinomialInterval iv;
  if (trials == 0) return iv;
  const double k = static_cast<double>(successes), n = static_cast<double>(trials);
  iv.low = successes == 0 ? 0.0 : beta_quantile(k, n - k + 1, alpha / 2);
  iv.high = successes == trials ? 1.0 : beta_quantile(k + 1, n - k, 1 - alpha / 2);
  return iv;
}

bool EmpiricalReport::all_pass() const {
  if (!cost_pass) return false;
  return std::all_of(labels.begin(), labels.end(), [](const LabelStat& s) { return s.pass; });
}

EmpiricalReport build_report(const std::vector<int64_t>& label_values,
                             const std::vector<SampleRecord>& samples,
                             const Rational& label_lower, const Rational& label_upper,
                             const Rational& cost_bound, std::vector<std::string> traces,
                             double confidence) {
  EmpiricalReport report;
  report.sample_count = samples.size();
  report.traces = std::move(traces);

  std::vector<uint64_t> label_counts(label_values.size(), 0);
  std::map<Rational, uint64_t> hist;
  double sum = 0, sum_sq = 0;
  for (const SampleRecord& s : samples) {
    label_counts.at(s.label_index)++;
    hist[s.cost]++;
    double c = to_double(s.cost);
    sum += c;
    sum_sq += c * c;
  }

  const double lambda = to_double(label_lower), rho = to_double(label_upper);
  for (size_t i = 0; i < label_values.size(); i++) {
    LabelStat stat;
    stat.label_value = label_values[i];
    stat.count = label_counts[i];
    stat.frequency = samples.empty() ? 0 : double(label_counts[i]) / double(samples.size());
    stat.interval = clopper_pearson(label_counts[i], samples.size(), confidence);
    stat.pass = stat.interval.high >= lambda && stat.interval.low <= rho;
    report.labels.push_back(stat);
  }

  if (!samples.empty()) {
    const double n = static_cast<double>(samples.size());
    report.mean_cost = sum / n;
    double variance = std::max(0.0, (sum_sq - sum * sum / n) / std::max(1.0, n - 1));
    report.cost_stderr = std::sqrt(variance / n);
  }
  report.cost_pass = report.mean_cost - 3 * report.cost_stderr <= to_double(cost_bound);
  for (const auto& [cost, count] : hist) report.cost_histogram.emplace_back(to_double(cost), count);
  return report;
}

std::string report_to_json(const EmpiricalReport& report) {
  nlohmann::ordered_json j;
  j["samples"] = report.sample_count;
  j["labels"] = nlohmann::ordered_json::array();
  for (const LabelStat& s : report.labels) {
    nlohmann::ordered_json row;
    row["label"] = s.label_value;
    row["count"] = s.count;
    row["frequency"] = s.frequency;
    row["ci99"] = {s.interval.low, s.interval.high};
    row["pass"] = s.pass;
    j["labels"].push_back(row);
  }
  j["cost"]["mean"] = report.mean_cost;
  j["cost"]["stderr"] = report.cost_stderr;
  j["cost"]["pass"] = report.cost_pass;
  j["cost"]["histogram"] = nlohmann::ordered_json::array();
  for (const auto& [cost, count] : report.cost_histogram)
    j["cost"]["histogram"].push_back({cost, count});
  j["traces"] = report.traces;
  j["all_pass"] = report.all_pass();
  return j.dump(2) + "\n";
}

}  // namespace improv
