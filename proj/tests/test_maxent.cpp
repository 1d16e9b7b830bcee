#include "improv/maxent.hpp"

#include "support/melqci_example.hpp"
#include "support/randgen.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

using namespace improv;

namespace {

MaxEntProblem two_label_example() {
  MaxEntProblem p;
  p.sizes = {{1, 1000}, {1, 1000}};
  p.costs = {Rational(1), Rational(2)};
  p.label_lower = Rational(1, 2);
  p.label_upper = Rational(1, 2);
  p.cost_bound = Rational(3, 2);
  return p;
}

// Entropy of the symmetric family D(i,1)=a, D(i,2)=1/2-a per label, in bits.
double symmetric_entropy(double a) {
  double h = 0;
  if (a > 0) h += 2 * (-a * std::log2(a));
  double q = 0.5 - a;
  if (q > 0) h += 2 * (-q * std::log2(q) + q * std::log2(1000.0));
  return h;
}

}  // namespace

TEST_CASE("two-label example solves to the quarter split") {
  MaxEntOutcome outcome = solve_melqci(two_label_example());
  REQUIRE(outcome.status == MaxEntStatus::Solved);
  const MaxEntSolution& sol = *outcome.solution;

  for (size_t i = 0; i < 2; i++)
    for (size_t k = 0; k < 2; k++) CHECK(std::fabs(sol.probs[i][k] - 0.25) < 1e-6);
  CHECK(sol.max_residual <= 1e-8);

  // Entropy oracle 1: direct summation over all 2002 word probabilities.
  double direct = 0;
  for (int copies : {1, 1000}) {
    double p = 0.25 / copies;
    direct += 2 * copies * (-p * std::log2(p));
  }
  CHECK(std::fabs(direct - (2 + 0.5 * std::log2(1000.0))) < 1e-12);
  CHECK(std::fabs(sol.entropy_bits - direct) < 1e-4);
  CHECK(std::fabs(sol.entropy_bits - 6.98289) < 1e-4);

  // Entropy oracle 2: 1-D grid search over the symmetric family (the
  // optimum is symmetric; the cost constraint forces a >= 1/4).
  double best = 0;
  for (int i = 0; i <= 100000; i++) {
    double a = 0.25 + 0.25 * i / 100000.0;
    best = std::max(best, symmetric_entropy(a));
  }
  CHECK(sol.entropy_bits >= best - 1e-6);
  CHECK(sol.entropy_bits + sol.gap_bound_bits >= best - 1e-9);
  CHECK(sol.gap_bound_bits <= 1e-6);

  // The repaired distribution satisfies the constraints exactly.
  Rational sum = 0, cost = 0;
  for (size_t i = 0; i < 2; i++) {
    Rational marginal = 0;
    for (size_t k = 0; k < 2; k++) {
      sum += sol.repaired[i][k];
      cost += sol.repaired[i][k] * two_label_example().costs[k];
      marginal += sol.repaired[i][k];
    }
    CHECK(marginal == Rational(1, 2));
  }
  CHECK(sum == 1);
  CHECK(cost <= Rational(3, 2));
}

TEST_CASE("entropy helper") {
  SUBCASE("uniform over four singleton classes") {
    std::vector<std::vector<BigInt>> sizes = {{1, 1}, {1, 1}};
    std::vector<std::vector<double>> probs = {{0.25, 0.25}, {0.25, 0.25}};
    CHECK(class_entropy_bits(probs, sizes) == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("point mass on a singleton class") {
    std::vector<std::vector<BigInt>> sizes = {{1}};
    std::vector<std::vector<double>> probs = {{1.0}};
    CHECK(class_entropy_bits(probs, sizes) == doctest::Approx(0.0));
  }
  SUBCASE("the worked split") {
    std::vector<std::vector<BigInt>> sizes = {{1, 1000}, {1, 1000}};
    std::vector<std::vector<double>> probs = {{0.25, 0.25}, {0.25, 0.25}};
    CHECK(class_entropy_bits(probs, sizes) ==
          doctest::Approx(2 + 0.5 * std::log2(1000.0)).epsilon(1e-12));
  }
  SUBCASE("huge class sizes use the bit-length path") {
    BigInt huge = BigInt(1) << 3000;
    CHECK(log2_bigint(huge) == doctest::Approx(3000.0));
    CHECK(log2_bigint(huge * 3) == doctest::Approx(3000.0 + std::log2(3.0)));
  }
}

TEST_CASE("unconstrained single label maximizes to the global uniform") {
  MaxEntProblem p;
  p.sizes = {{2, 6}};
  p.costs = {Rational(1), Rational(5)};
  p.label_lower = Rational(1);
  p.label_upper = Rational(1);
  p.cost_bound = Rational(100);
  MaxEntOutcome outcome = solve_melqci(p);
  REQUIRE(outcome.status == MaxEntStatus::Solved);
  CHECK(std::fabs(outcome.solution->probs[0][0] - 0.25) < 1e-9);
  CHECK(std::fabs(outcome.solution->probs[0][1] - 0.75) < 1e-9);
  CHECK(std::fabs(outcome.solution->entropy_bits - 3.0) < 1e-9);  // lg 8
}

TEST_CASE("label bounds infeasible") {
  MaxEntProblem p = two_label_example();
  p.label_lower = Rational(3, 5);
  p.label_upper = Rational(3, 5);
  MaxEntOutcome outcome = solve_melqci(p);
  CHECK(outcome.status == MaxEntStatus::Infeasible);
  CHECK(*outcome.reason == InfeasibleReason::LabelCountVsLambda);
}

TEST_CASE("cost bound below the greedy minimum is infeasible") {
  MaxEntProblem p = two_label_example();
  p.cost_bound = Rational(1, 2);  // minimum achievable is 1
  MaxEntOutcome outcome = solve_melqci(p);
  CHECK(outcome.status == MaxEntStatus::Infeasible);
  CHECK(*outcome.reason == InfeasibleReason::MinCostExceedsBound);
}

TEST_CASE("automata realization of the two-label example") {
  auto bundle = melqci_example::bundle();

  // The class table realizes the 1/1/1000/1000 sizes.
  auto build = build_cost_class_table(bundle.hard, bundle.label, bundle.cost, 1, 11);
  REQUIRE(build.table.label_values == std::vector<int64_t>{1, 2});
  REQUIRE(build.table.costs == std::vector<Rational>{Rational(1), Rational(2)});
  CHECK(build.table.sizes[0] == std::vector<BigInt>{1, 1000});
  CHECK(build.table.sizes[1] == std::vector<BigInt>{1, 1000});

  MaxEntImproviserResult result = build_maxent_improviser(bundle);
  REQUIRE(result.status == MaxEntStatus::Solved);
  REQUIRE(result.improviser.has_value());
  const Improviser& improviser = *result.improviser;

  // Class frequencies within 5 sigma of 1/4 over 20000 draws.
  Rng rng(5551212);
  const uint64_t n = 20000;
  std::map<std::pair<size_t, size_t>, uint64_t> counts;
  for (uint64_t i = 0; i < n; i++) {
    auto draw = improviser.sample_info(rng);
    counts[{draw.label_index, draw.cost_index}]++;
    CHECK(bundle.hard.accepts(draw.word));
  }
  const double sigma = std::sqrt(0.25 * 0.75 * double(n));
  for (size_t i = 0; i < 2; i++)
    for (size_t k = 0; k < 2; k++)
      CHECK(std::fabs(double(counts[{i, k}]) - 0.25 * n) < 5 * sigma);

  // Improviser-level constraint conditions on the exact spec.
  const auto& spec = improviser.distribution();
  CHECK(spec.overall_expected_cost <= bundle.instance.cost_bound);
  for (const auto& label : spec.labels) {
    CHECK(label.marginal >= bundle.instance.label_lower);
    CHECK(label.marginal <= bundle.instance.label_upper);
  }

  // Entropy at least the greedy warm start's.
  auto greedy = feasibility_check(bundle.instance, build.table);
  REQUIRE(greedy.feasible);
  std::vector<std::vector<Rational>> greedy_joint(2, std::vector<Rational>(2));
  for (size_t i = 0; i < 2; i++)
    for (size_t k = 0; k < 2; k++) greedy_joint[i][k] = greedy.distribution->joint(i, k);
  CHECK(result.solution->entropy_bits >=
        class_entropy_bits(greedy_joint, build.table.sizes) - 1e-12);
}

TEST_CASE("random problems: entropy dominates the greedy warm start") {
  Rng rng(424242);
  int solved = 0;
  for (int trial = 0; trial < 60; trial++) {
    auto [inst, table] = randgen::random_instance(rng);
    MaxEntProblem p = MaxEntProblem::from_table(table, inst.label_lower, inst.label_upper,
                                                inst.cost_bound);
    MaxEntOutcome outcome = solve_melqci(p);
    LqciInstance relaxed = inst;
    relaxed.word_lower.assign(inst.word_lower.size(), Rational(0));
    relaxed.word_upper.assign(inst.word_upper.size(), Rational(1));
    FeasibilityReport greedy = feasibility_check(relaxed, table);
    REQUIRE((outcome.status == MaxEntStatus::Infeasible) == !greedy.feasible);
    if (outcome.status == MaxEntStatus::Infeasible) continue;
    REQUIRE(outcome.status == MaxEntStatus::Solved);
    solved++;

    std::vector<std::vector<Rational>> greedy_joint(table.label_values.size());
    for (size_t i = 0; i < table.label_values.size(); i++)
      for (size_t k = 0; k < table.costs.size(); k++)
        greedy_joint[i].push_back(greedy.distribution->joint(i, k));
    CHECK(outcome.solution->entropy_bits >=
          class_entropy_bits(greedy_joint, table.sizes) - 1e-12);
    CHECK(outcome.solution->max_residual <= 1e-8);
    CHECK(outcome.solution->gap_bound_bits >= 0);

    // Exact feasibility of the repaired distribution.
    Rational sum = 0, cost = 0;
    for (size_t i = 0; i < table.label_values.size(); i++) {
      Rational marginal = 0;
      for (size_t k = 0; k < table.costs.size(); k++) {
        const Rational& q = outcome.solution->repaired[i][k];
        CHECK(q >= 0);
        if (table.sizes[i][k] == 0) CHECK(q == 0);
        sum += q;
        cost += q * table.costs[k];
        marginal += q;
      }
      if (marginal > 0 || inst.label_lower > 0) {
        CHECK(marginal >= inst.label_lower);
        CHECK(marginal <= inst.label_upper);
      }
    }
    CHECK(sum == 1);
    CHECK(cost <= inst.cost_bound);
  }
  CHECK(solved > 10);
}

TEST_CASE("dual certificate against a grid-search oracle") {
  // Single label, two classes, active cost constraint: the optimum is
  // searchable on a 1-D grid.
  MaxEntProblem p;
  p.sizes = {{3, 5}};
  p.costs = {Rational(1), Rational(4)};
  p.label_lower = Rational(1);
  p.label_upper = Rational(1);
  p.cost_bound = Rational(2);
  MaxEntOutcome outcome = solve_melqci(p);
  REQUIRE(outcome.status == MaxEntStatus::Solved);

  double best = 0;
  for (int i = 0; i <= 1000000; i++) {
    double a = double(i) / 1000000.0;  // mass on the cheap class
    double cost = a + 4 * (1 - a);
    if (cost > 2.0) continue;
    double h = 0;
    if (a > 0) h += -a * std::log2(a) + a * std::log2(3.0);
    if (a < 1) h += -(1 - a) * std::log2(1 - a) + (1 - a) * std::log2(5.0);
    best = std::max(best, h);
  }
  CHECK(outcome.solution->entropy_bits >= best - 1e-6);
  CHECK(outcome.solution->entropy_bits + outcome.solution->gap_bound_bits >= best - 1e-9);
  CHECK(outcome.solution->entropy_bits <= best + 1e-6);
}
