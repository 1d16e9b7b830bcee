#include "improv/maxent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace improv {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(const std::vector<double>& values) {
  double hi = kNegInf;
  for (double v : values) hi = std::max(hi, v);
  if (hi == kNegInf) return kNegInf;
  double sum = 0;
  for (double v : values) sum += std::exp(v - hi);
  return hi + std::log(sum);
}

}  // namespace

double log2_bigint(const BigInt& value) {
  if (value <= 0) throw std::domain_error("log of non-positive integer");
  const unsigned bits = static_cast<unsigned>(msb(value));
  if (bits <= 52) return std::log2(value.convert_to<double>());
  const BigInt mantissa = value >> (bits - 52);
  return double(bits - 52) + std::log2(mantissa.convert_to<double>());
}

double class_entropy_bits(const std::vector<std::vector<double>>& probs,
                          const std::vector<std::vector<BigInt>>& sizes) {
  double h = 0;
  for (size_t i = 0; i < probs.size(); i++)
    for (size_t k = 0; k < probs[i].size(); k++) {
      double p = probs[i][k];
      if (p <= 0) continue;
      h += -p * std::log2(p) + p * log2_bigint(sizes[i][k]);
    }
  return h;
}

double class_entropy_bits(const std::vector<std::vector<Rational>>& probs,
                          const std::vector<std::vector<BigInt>>& sizes) {
  std::vector<std::vector<double>> d(probs.size());
  for (size_t i = 0; i < probs.size(); i++)
    for (const Rational& p : probs[i]) d[i].push_back(to_double(p));
  return class_entropy_bits(d, sizes);
}

MaxEntProblem MaxEntProblem::from_table(const CostClassTable& table, const Rational& lambda,
                                        const Rational& rho, const Rational& cost_bound,
                                        double gap_target) {
  MaxEntProblem problem;
  problem.sizes = table.sizes;
  problem.costs = table.costs;
  problem.label_lower = lambda;
  problem.label_upper = rho;
  problem.cost_bound = cost_bound;
  problem.entropy_gap_target = gap_target;
  return problem;
}

namespace {

// Everything the inner maximization needs at a fixed cost multiplier mu.
// Within each label the optimum tilts class mass by exp(-mu * cost); across
// labels the marginals water-fill against the [lambda, rho] box.
struct DualEvaluator {
  const MaxEntProblem& problem;
  std::vector<std::vector<double>> log_sizes;  // ln |I_{i,k}|, -inf for empty
  std::vector<double> costs;
  double lambda, rho, cost_bound;
  size_t n_labels;

  explicit DualEvaluator(const MaxEntProblem& p) : problem(p) {
    n_labels = p.sizes.size();
    lambda = to_double(p.label_lower);
    rho = to_double(p.label_upper);
    cost_bound = to_double(p.cost_bound);
    for (const Rational& c : p.costs) costs.push_back(to_double(c));
    log_sizes.resize(n_labels);
    for (size_t i = 0; i < n_labels; i++)
      for (const BigInt& s : p.sizes[i])
        log_sizes[i].push_back(s == 0 ? kNegInf : log2_bigint(s) * std::log(2.0));
  }

  struct Point {
    std::vector<double> log_z;            // ln Z_i(mu)
    std::vector<double> marginals;        // q_i
    std::vector<std::vector<double>> probs;  // D(i,k) = q_i * w_ik
    double expected_cost = 0;
    double dual_value = 0;  // nats
  };

  Point evaluate(double mu) const {
    Point pt;
    pt.log_z.resize(n_labels, kNegInf);
    std::vector<std::vector<double>> log_w(n_labels);
    for (size_t i = 0; i < n_labels; i++) {
      std::vector<double> terms;
      terms.reserve(costs.size());
      for (size_t k = 0; k < costs.size(); k++) terms.push_back(log_sizes[i][k] - mu * costs[k]);
      pt.log_z[i] = log_sum_exp(terms);
      log_w[i] = std::move(terms);
    }

    pt.marginals = water_fill(pt.log_z);

    pt.probs.assign(n_labels, std::vector<double>(costs.size(), 0.0));
    pt.expected_cost = 0;
    double inner = 0;  // sum q_i (ln Z_i - ln q_i)
    for (size_t i = 0; i < n_labels; i++) {
      double q = pt.marginals[i];
      if (q <= 0) continue;
      inner += q * (pt.log_z[i] - std::log(q));
      for (size_t k = 0; k < costs.size(); k++) {
        if (log_w[i][k] == kNegInf) continue;
        double w = std::exp(log_w[i][k] - pt.log_z[i]);
        pt.probs[i][k] = q * w;
        pt.expected_cost += q * w * costs[k];
      }
    }
    pt.dual_value = inner + mu * cost_bound;
    return pt;
  }

  // max sum q_i (lnZ_i - ln q_i) s.t. sum q = 1, lambda <= q_i <= rho
  // (q_i forced to 0 for empty labels). Solution: q_i = clamp(e^{lnZ_i - nu}).
  std::vector<double> water_fill(const std::vector<double>& log_z) const {
    std::vector<double> q(n_labels, 0.0);
    if (lambda == rho) {
      for (size_t i = 0; i < n_labels; i++) q[i] = log_z[i] == kNegInf ? 0.0 : lambda;
      return q;
    }
    auto total_at = [&](double nu) {
      double sum = 0;
      for (size_t i = 0; i < n_labels; i++) {
        if (log_z[i] == kNegInf) continue;
        sum += std::clamp(std::exp(log_z[i] - nu), lambda, rho);
      }
      return sum;
    };
    double hi_z = kNegInf;
    for (double z : log_z) hi_z = std::max(hi_z, z);
    double lo = hi_z - std::log(std::max(rho, 1e-300)) - 60;  // everything at rho
    double hi = hi_z + 800;                                   // everything at (or below) lambda
    for (int iter = 0; iter < 200; iter++) {
      double mid = 0.5 * (lo + hi);
      if (total_at(mid) > 1)
        lo = mid;
      else
        hi = mid;
    }
    double nu = 0.5 * (lo + hi);
    double sum = 0;
    for (size_t i = 0; i < n_labels; i++) {
      if (log_z[i] == kNegInf) continue;
      q[i] = std::clamp(std::exp(log_z[i] - nu), lambda, rho);
      sum += q[i];
    }
    // Distribute the bisection leftover over the interior coordinates.
    double slack = 1.0 - sum;
    for (size_t i = 0; i < n_labels && std::abs(slack) > 0; i++) {
      if (log_z[i] == kNegInf) continue;
      double room = slack > 0 ? rho - q[i] : lambda - q[i];
      double take = std::clamp(slack, std::min(room, 0.0), std::max(room, 0.0));
      q[i] += take;
      slack -= take;
    }
    return q;
  }
};

Rational rational_from_double(double v) {
  if (!(v >= 0)) return Rational(0);
  return Rational(v);  // doubles are dyadic, so this is exact
}

// Additive projection of a marginal vector onto {sum = 1, lambda <= m <= rho}
// in exact arithmetic. total(t) = sum clamp(m_i + t) is continuous,
// piecewise linear, and nondecreasing; the root is interpolated exactly
// within the bracketing breakpoint segment.
std::vector<Rational> project_marginals(const std::vector<Rational>& m,
                                        const std::vector<bool>& allowed, const Rational& lambda,
                                        const Rational& rho) {
  const size_t n = m.size();
  auto total_at = [&](const Rational& t) {
    Rational sum = 0;
    for (size_t i = 0; i < n; i++)
      if (allowed[i]) sum += std::clamp(Rational(m[i] + t), lambda, rho);
    return sum;
  };

  std::vector<Rational> breaks;
  for (size_t i = 0; i < n; i++) {
    if (!allowed[i]) continue;
    breaks.push_back(lambda - m[i]);
    breaks.push_back(rho - m[i]);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  std::optional<Rational> shift;
  Rational prev = breaks.front();
  Rational prev_total = total_at(prev);
  if (prev_total >= 1) shift = prev;  // below every breakpoint the sum is constant
  for (size_t s = 1; !shift && s < breaks.size(); s++) {
    Rational cur = breaks[s];
    Rational cur_total = total_at(cur);
    if (cur_total >= 1) {
      // Linear on [prev, cur]; interpolate the crossing exactly.
      Rational slope = (cur_total - prev_total) / (cur - prev);
      shift = slope == 0 ? cur : prev + (1 - prev_total) / slope;
    }
    prev = cur;
    prev_total = cur_total;
  }
  if (!shift) throw std::logic_error("marginal projection infeasible");

  std::vector<Rational> out(n, Rational(0));
  Rational sum = 0;
  for (size_t i = 0; i < n; i++) {
    if (!allowed[i]) continue;
    out[i] = std::clamp(Rational(m[i] + *shift), lambda, rho);
    sum += out[i];
  }
  if (sum != 1) throw std::logic_error("marginal projection did not close");
  return out;
}

}  // namespace

MaxEntOutcome solve_melqci(const MaxEntProblem& problem) {
  MaxEntOutcome outcome;

  const size_t n_labels = problem.sizes.size();
  if (n_labels == 0) throw std::invalid_argument("no labels");

  // Feasibility and the greedy warm start: the LQCI conditions with
  // alpha = 0, beta = 1.
  LqciInstance relaxed;
  relaxed.alphabet = {"_"};
  relaxed.min_length = 0;
  relaxed.max_length = 0;
  relaxed.cost_bound = problem.cost_bound;
  relaxed.label_lower = problem.label_lower;
  relaxed.label_upper = problem.label_upper;
  relaxed.word_lower.assign(n_labels, Rational(0));
  relaxed.word_upper.assign(n_labels, Rational(1));

  CostClassTable table;
  table.costs = problem.costs;
  table.sizes = problem.sizes;
  table.label_values.resize(n_labels);
  for (size_t i = 0; i < n_labels; i++) table.label_values[i] = static_cast<int64_t>(i);
  table.sampler_keys.assign(n_labels, std::vector<int>(problem.costs.size(), -1));

  FeasibilityReport greedy = feasibility_check(relaxed, table);
  if (!greedy.feasible) {
    outcome.status = MaxEntStatus::Infeasible;
    outcome.reason = greedy.reason;
    return outcome;
  }
  const ImprovisingDistributionSpec& warm = *greedy.distribution;

  std::vector<std::vector<Rational>> greedy_joint(n_labels,
                                                  std::vector<Rational>(problem.costs.size()));
  for (size_t i = 0; i < n_labels; i++)
    for (size_t k = 0; k < problem.costs.size(); k++) greedy_joint[i][k] = warm.joint(i, k);

  // Outer 1-D dual search on the cost multiplier.
  DualEvaluator eval(problem);
  DualEvaluator::Point best;
  const double c = eval.cost_bound;
  int iterations = 0;

  DualEvaluator::Point at_zero = eval.evaluate(0.0);
  if (at_zero.expected_cost <= c) {
    best = std::move(at_zero);
  } else {
    double lo = 0.0, hi = 1.0;
    DualEvaluator::Point at_hi = eval.evaluate(hi);
    while (at_hi.expected_cost > c && hi < 1e12 && iterations < problem.iteration_budget) {
      hi *= 2;
      at_hi = eval.evaluate(hi);
      iterations++;
    }
    for (int iter = 0; iter < 200 && iterations < problem.iteration_budget; iter++, iterations++) {
      double mid = 0.5 * (lo + hi);
      DualEvaluator::Point at_mid = eval.evaluate(mid);
      if (at_mid.expected_cost > c)
        lo = mid;
      else {
        hi = mid;
        at_hi = std::move(at_mid);
      }
    }
    best = std::move(at_hi);  // cost(best) <= c side of the bracket
  }

  MaxEntSolution solution;
  solution.probs = best.probs;

  // Residuals of the floating solution against C1-C5.
  {
    double sum = 0, cost = 0, worst = 0;
    for (size_t i = 0; i < n_labels; i++) {
      double mi = 0;
      for (size_t k = 0; k < problem.costs.size(); k++) {
        sum += best.probs[i][k];
        cost += best.probs[i][k] * eval.costs[k];
        mi += best.probs[i][k];
        if (best.probs[i][k] < 0) worst = std::max(worst, -best.probs[i][k]);
      }
      worst = std::max(worst, std::max(eval.lambda - mi, mi - eval.rho));
    }
    worst = std::max(worst, std::abs(sum - 1.0));
    worst = std::max(worst, cost - eval.cost_bound);
    solution.max_residual = std::max(worst, 0.0);
  }

  // Exact repair: normalize, project the label marginals into the box, then
  // mix toward the greedy point if the cost constraint is still violated.
  std::vector<std::vector<Rational>> exact(n_labels, std::vector<Rational>(problem.costs.size()));
  Rational total = 0;
  for (size_t i = 0; i < n_labels; i++)
    for (size_t k = 0; k < problem.costs.size(); k++) {
      if (problem.sizes[i][k] == 0) continue;
      exact[i][k] = rational_from_double(best.probs[i][k]);
      total += exact[i][k];
    }
  if (total == 0) {
    exact = greedy_joint;
  } else {
    for (auto& row : exact)
      for (Rational& p : row) p /= total;

    std::vector<Rational> marginals(n_labels, Rational(0));
    std::vector<bool> allowed(n_labels);
    for (size_t i = 0; i < n_labels; i++) {
      for (const Rational& p : exact[i]) marginals[i] += p;
      BigInt label_size = 0;
      for (const BigInt& s : problem.sizes[i]) label_size += s;
      allowed[i] = label_size > 0;
    }
    std::vector<Rational> target = project_marginals(marginals, allowed, problem.label_lower,
                                                     problem.label_upper);
    for (size_t i = 0; i < n_labels; i++) {
      if (target[i] == marginals[i]) continue;
      if (marginals[i] > 0) {
        Rational scale = target[i] / marginals[i];
        for (Rational& p : exact[i]) p *= scale;
      } else {
        // No floating mass landed here; borrow the greedy shape.
        Rational greedy_mass = 0;
        for (const Rational& p : greedy_joint[i]) greedy_mass += p;
        if (greedy_mass > 0) {
          for (size_t k = 0; k < exact[i].size(); k++)
            exact[i][k] = greedy_joint[i][k] / greedy_mass * target[i];
        } else if (target[i] != 0) {
          throw std::logic_error("mass required on an empty label");
        }
      }
    }

    Rational expected = 0;
    for (size_t i = 0; i < n_labels; i++)
      for (size_t k = 0; k < problem.costs.size(); k++) expected += exact[i][k] * problem.costs[k];
    if (expected > problem.cost_bound) {
      Rational greedy_cost = warm.overall_expected_cost;
      if (greedy_cost >= expected) {
        exact = greedy_joint;
      } else {
        Rational t = (expected - problem.cost_bound) / (expected - greedy_cost);
        t = std::min(t, Rational(1));
        for (size_t i = 0; i < n_labels; i++)
          for (size_t k = 0; k < problem.costs.size(); k++)
            exact[i][k] = (1 - t) * exact[i][k] + t * greedy_joint[i][k];
      }
    }
  }

  // Keep whichever of {repaired solution, greedy warm start} has more
  // entropy; the dual value stays a valid upper bound for both.
  const double entropy_exact = class_entropy_bits(exact, problem.sizes);
  const double entropy_greedy = class_entropy_bits(greedy_joint, problem.sizes);
  if (entropy_greedy > entropy_exact) {
    exact = greedy_joint;
    solution.used_greedy_fallback = true;
  }
  solution.repaired = std::move(exact);
  solution.entropy_bits = std::max(entropy_exact, entropy_greedy);
  const double dual_bits = best.dual_value / std::log(2.0);
  solution.gap_bound_bits = std::max(dual_bits - solution.entropy_bits, 0.0);

  outcome.solution = std::move(solution);
  outcome.status = outcome.solution->gap_bound_bits <= problem.entropy_gap_target
                       ? MaxEntStatus::Solved
                       : MaxEntStatus::NoConvergence;
  return outcome;
}

MaxEntImproviserResult build_maxent_improviser(const DfaInstanceBundle& bundle, double gap_target,
                                               int64_t weighted_budget, unsigned threads) {
  bundle.validate();
  MaxEntImproviserResult result;

  CostClassTableBuild build = build_cost_class_table(bundle.hard, bundle.label, bundle.cost,
                                                     bundle.instance.min_length,
                                                     bundle.instance.max_length, weighted_budget,
                                                     threads);
  MaxEntProblem problem = MaxEntProblem::from_table(build.table, bundle.instance.label_lower,
                                                    bundle.instance.label_upper,
                                                    bundle.instance.cost_bound, gap_target);
  MaxEntOutcome outcome = solve_melqci(problem);
  result.status = outcome.status;
  result.reason = outcome.reason;
  result.solution = outcome.solution;
  if (outcome.status != MaxEntStatus::Solved) return result;

  // Wrap the repaired exact distribution as marginal x conditional.
  const auto& joint = outcome.solution->repaired;
  const size_t n_labels = build.table.label_values.size();
  ImprovisingDistributionSpec spec;
  spec.label_values = build.table.label_values;
  spec.costs = build.table.costs;
  spec.overall_expected_cost = 0;
  spec.label_overflow_count = 0;
  for (size_t i = 0; i < n_labels; i++) {
    LabelClassDist dist;
    dist.marginal = 0;
    for (const Rational& p : joint[i]) dist.marginal += p;
    dist.class_probs.assign(build.table.costs.size(), Rational(0));
    dist.expected_cost = 0;
    dist.overflow_budget = 0;
    dist.excluded = dist.marginal == 0;
    if (dist.marginal > 0) {
      for (size_t k = 0; k < build.table.costs.size(); k++) {
        dist.class_probs[k] = joint[i][k] / dist.marginal;
        dist.expected_cost += dist.class_probs[k] * build.table.costs[k];
      }
    }
    spec.overall_expected_cost += dist.marginal * dist.expected_cost;
    spec.labels.push_back(std::move(dist));
  }

  result.improviser = bind_improviser(bundle, std::move(spec), std::move(build));
  return result;
}

}  // namespace improv
