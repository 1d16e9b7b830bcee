#include "improv/core.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace improv {

void LqciInstance::validate() const {
  if (min_length > max_length) throw std::invalid_argument("m > n");
  if (cost_bound <= 0) throw std::invalid_argument("cost bound must be positive");
  if (label_lower < 0 || label_lower > label_upper || label_upper > 1)
    throw std::invalid_argument("need 0 <= lambda <= rho <= 1");
  if (word_lower.size() != word_upper.size() || word_lower.empty())
    throw std::invalid_argument("per-label bounds missing");
  for (size_t i = 0; i < word_lower.size(); i++)
    if (word_lower[i] < 0 || word_lower[i] > word_upper[i] || word_upper[i] > 1)
      throw std::invalid_argument("need 0 <= alpha_i <= beta_i <= 1");
}

BigInt CostClassTable::label_total(size_t label) const {
  BigInt total = 0;
  for (const BigInt& s : sizes[label]) total += s;
  return total;
}

BigInt CostClassTable::grand_total() const {
  BigInt total = 0;
  for (size_t i = 0; i < sizes.size(); i++) total += label_total(i);
  return total;
}

void CostClassTable::validate() const {
  if (sizes.size() != label_values.size()) throw std::invalid_argument("size matrix shape");
  for (size_t k = 1; k < costs.size(); k++)
    if (!(costs[k - 1] < costs[k])) throw std::invalid_argument("costs must strictly increase");
  for (const auto& row : sizes) {
    if (row.size() != costs.size()) throw std::invalid_argument("size matrix shape");
    for (const BigInt& s : row)
      if (s < 0) throw std::invalid_argument("negative class size");
  }
}

std::variant<GreedyCostResult, GreedyCostError> greedy_cost_construction(
    const std::vector<CostClass>& classes, const Rational& alpha, const Rational& beta) {
  for (size_t k = 1; k < classes.size(); k++)
    if (!(classes[k - 1].cost < classes[k].cost))
      throw std::invalid_argument("classes must be sorted by strictly increasing cost");

  BigInt total = 0;
  for (const CostClass& c : classes) {
    if (c.size < 0) throw std::invalid_argument("negative class size");
    total += c.size;
  }

  GreedyCostResult result;
  result.class_probs.assign(classes.size(), Rational(0));

  const Rational total_r(total);
  if (alpha == beta) {
    if (alpha * total_r != 1) return GreedyCostError::AlphaBetaMismatch;
    for (size_t k = 0; k < classes.size(); k++)
      result.class_probs[k] = alpha * Rational(classes[k].size);
    result.overflow_budget = total_r;
  } else {
    if (alpha * total_r > 1) return GreedyCostError::AlphaTooLarge;
    if (beta * total_r < 1) return GreedyCostError::BetaTooSmall;

    const Rational o = (1 - alpha * total_r) / (beta - alpha);
    result.overflow_budget = o;

    BigInt before = 0;  // words in classes strictly before the overflow class
    size_t k = 0;
    for (; k < classes.size(); k++) {
      if (classes[k].size == 0) continue;
      if (Rational(before + classes[k].size) > o) break;
      result.class_probs[k] = beta * Rational(classes[k].size);
      before += classes[k].size;
    }
    if (k < classes.size()) {
      result.overflow_class = k;
      const Rational through(before + classes[k].size);
      result.class_probs[k] = beta * (o - Rational(before)) + alpha * (through - o);
      for (k++; k < classes.size(); k++)
        result.class_probs[k] = alpha * Rational(classes[k].size);
    }
  }

  Rational sum = 0, expected = 0;
  for (size_t k = 0; k < classes.size(); k++) {
    sum += result.class_probs[k];
    expected += result.class_probs[k] * classes[k].cost;
  }
  if (sum != 1) throw std::logic_error("greedy cost construction did not sum to 1");
  result.expected_cost = expected;
  return result;
}

std::variant<std::vector<Rational>, LabelError> greedy_label_construction(
    const std::vector<Rational>& expected_costs, const Rational& lambda, const Rational& rho) {
  const size_t n = expected_costs.size();
  if (n == 0) throw std::invalid_argument("no labels");
  const Rational count(static_cast<long>(n));
  if (rho * count < 1 || lambda * count > 1) return LabelError::LabelBoundsInfeasible;

  std::vector<Rational> marginal(n);
  if (lambda == rho) {
    // The bounds force count = 1/lambda here, so every label gets lambda.
    for (auto& p : marginal) p = lambda;
    return marginal;
  }

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return expected_costs[a] != expected_costs[b] ? expected_costs[a] < expected_costs[b] : a < b;
  });

  const BigInt u = rational_floor((1 - count * lambda) / (rho - lambda));
  const size_t u_sz = static_cast<size_t>(u);  // u <= n by the bound checks
  for (size_t pos = 0; pos < n; pos++) {
    if (pos < u_sz)
      marginal[order[pos]] = rho;
    else if (pos == u_sz)
      marginal[order[pos]] = 1 - rho * Rational(u) - lambda * (count - Rational(u) - 1);
    else
      marginal[order[pos]] = lambda;
  }

  Rational sum = std::accumulate(marginal.begin(), marginal.end(), Rational(0));
  if (sum != 1) throw std::logic_error("greedy label construction did not sum to 1");
  return marginal;
}

ImprovisingDistributionSpec combine(std::vector<int64_t> label_values, std::vector<Rational> costs,
                                    const std::vector<Rational>& marginal,
                                    const std::vector<GreedyCostResult>& per_label) {
  if (marginal.size() != per_label.size() || marginal.size() != label_values.size())
    throw std::invalid_argument("combine: shape mismatch");

  ImprovisingDistributionSpec spec;
  spec.label_values = std::move(label_values);
  spec.costs = std::move(costs);
  spec.overall_expected_cost = 0;
  for (size_t i = 0; i < marginal.size(); i++) {
    LabelClassDist dist;
    dist.marginal = marginal[i];
    dist.class_probs = per_label[i].class_probs;
    dist.expected_cost = per_label[i].expected_cost;
    dist.overflow_budget = per_label[i].overflow_budget;
    dist.overflow_class = per_label[i].overflow_class;
    spec.labels.push_back(std::move(dist));
    spec.overall_expected_cost += marginal[i] * per_label[i].expected_cost;
  }
  return spec;
}

namespace {

InfeasibleReason map_cost_error(GreedyCostError err, const Rational& alpha, const BigInt& total) {
  switch (err) {
    case GreedyCostError::AlphaTooLarge:
      return InfeasibleReason::ClassTooBigForAlpha;
    case GreedyCostError::BetaTooSmall:
      return InfeasibleReason::ClassTooSmallForBeta;
    case GreedyCostError::AlphaBetaMismatch:
      return alpha * Rational(total) > 1 ? InfeasibleReason::ClassTooBigForAlpha
                                         : InfeasibleReason::ClassTooSmallForBeta;
  }
  throw std::logic_error("unreachable");
}

}  // namespace

FeasibilityReport feasibility_check(const LqciInstance& instance, const CostClassTable& table) {
  instance.validate();
  table.validate();
  const size_t n_labels = table.label_values.size();
  if (instance.label_count() != n_labels)
    throw std::invalid_argument("per-label bounds do not match the table's label set");

  FeasibilityReport report;
  const Rational count(static_cast<long>(n_labels));

  if (instance.label_lower * count > 1) {
    report.reason = InfeasibleReason::LabelCountVsLambda;
    return report;
  }

  // Per-label greedy cost pass. With lambda = 0 a label that cannot carry an
  // internal distribution may instead be excluded (zero marginal); otherwise
  // its failure dooms the instance.
  std::vector<GreedyCostResult> per_label(n_labels);
  std::vector<bool> excluded(n_labels, false);
  std::vector<InfeasibleReason> exclusion_reason(n_labels, InfeasibleReason::ClassTooSmallForBeta);
  size_t usable = 0;
  for (size_t i = 0; i < n_labels; i++) {
    std::vector<CostClass> classes;
    classes.reserve(table.costs.size());
    for (size_t k = 0; k < table.costs.size(); k++)
      classes.push_back({table.costs[k], table.sizes[i][k]});
    auto outcome = greedy_cost_construction(classes, instance.word_lower[i], instance.word_upper[i]);
    if (auto* err = std::get_if<GreedyCostError>(&outcome)) {
      InfeasibleReason reason = map_cost_error(*err, instance.word_lower[i], table.label_total(i));
      if (instance.label_lower > 0) {
        report.reason = reason;
        report.offending_label = i;
        return report;
      }
      excluded[i] = true;
      exclusion_reason[i] = reason;
    } else {
      per_label[i] = std::move(std::get<GreedyCostResult>(outcome));
      usable++;
    }
  }

  if (instance.label_upper * Rational(static_cast<long>(usable)) < 1) {
    report.reason = InfeasibleReason::LabelCountVsRho;
    // Point at an excluded label when exclusions caused the shortfall.
    for (size_t i = 0; i < n_labels; i++)
      if (excluded[i]) {
        report.reason = exclusion_reason[i];
        report.offending_label = i;
        break;
      }
    return report;
  }

  // Greedy label pass over usable labels; excluded labels sort last and must
  // end up with zero marginal.
  std::vector<size_t> order;
  for (size_t i = 0; i < n_labels; i++)
    if (!excluded[i]) order.push_back(i);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    const Rational &ea = per_label[a].expected_cost, &eb = per_label[b].expected_cost;
    return ea != eb ? ea < eb : a < b;
  });
  for (size_t i = 0; i < n_labels; i++)
    if (excluded[i]) order.push_back(i);

  const Rational lambda = instance.label_lower, rho = instance.label_upper;
  std::vector<Rational> marginal(n_labels, Rational(0));
  if (lambda == rho) {
    for (auto& p : marginal) p = lambda;  // count = 1/lambda is implied
  } else {
    const BigInt u = rational_floor((1 - count * lambda) / (rho - lambda));
    const size_t u_sz = static_cast<size_t>(u);
    for (size_t pos = 0; pos < n_labels; pos++) {
      Rational p;
      if (pos < u_sz)
        p = rho;
      else if (pos == u_sz)
        p = 1 - rho * Rational(u) - lambda * (count - Rational(u) - 1);
      else
        p = lambda;
      if (excluded[order[pos]] && p != 0) {
        report.reason = exclusion_reason[order[pos]];
        report.offending_label = order[pos];
        return report;
      }
      marginal[order[pos]] = p;
    }
  }

  Rational expected = 0;
  for (size_t i = 0; i < n_labels; i++)
    if (!excluded[i]) expected += marginal[i] * per_label[i].expected_cost;

  if (expected > instance.cost_bound) {
    report.reason = InfeasibleReason::MinCostExceedsBound;
    return report;
  }

  ImprovisingDistributionSpec spec;
  spec.label_values = table.label_values;
  spec.costs = table.costs;
  spec.overall_expected_cost = expected;
  spec.label_overflow_count =
      lambda == rho ? BigInt(0) : rational_floor((1 - count * lambda) / (rho - lambda));
  for (size_t i = 0; i < n_labels; i++) {
    LabelClassDist dist;
    dist.marginal = marginal[i];
    dist.excluded = excluded[i];
    if (excluded[i]) {
      dist.class_probs.assign(table.costs.size(), Rational(0));
      dist.expected_cost = 0;
      dist.overflow_budget = 0;
    } else {
      dist.class_probs = per_label[i].class_probs;
      dist.expected_cost = per_label[i].expected_cost;
      dist.overflow_budget = per_label[i].overflow_budget;
      dist.overflow_class = per_label[i].overflow_class;
    }
    spec.labels.push_back(std::move(dist));
  }

  report.feasible = true;
  report.distribution = std::move(spec);
  return report;
}

std::string to_string(InfeasibleReason reason) {
  switch (reason) {
    case InfeasibleReason::LabelCountVsRho: return "LabelCountVsRho";
    case InfeasibleReason::LabelCountVsLambda: return "LabelCountVsLambda";
    case InfeasibleReason::ClassTooSmallForBeta: return "ClassTooSmallForBeta";
    case InfeasibleReason::ClassTooBigForAlpha: return "ClassTooBigForAlpha";
    case InfeasibleReason::MinCostExceedsBound: return "MinCostExceedsBound";
  }
  return "?";
}

}  // namespace improv
