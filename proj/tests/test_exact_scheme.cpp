#include "improv/exact_scheme.hpp"

#include "support/brute.hpp"
#include "support/toy.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

using namespace improv;

namespace {

// (label value, cost) -> word count by direct enumeration.
std::map<std::pair<int64_t, int64_t>, int> brute_classes(const Dfa& hard,
                                                         const StateOutputDfa& label,
                                                         const CostSpec& cost, uint32_t m,
                                                         uint32_t n) {
  std::map<std::pair<int64_t, int64_t>, int> out;
  for (Word& w : brute::all_words(hard.alphabet.size(), m, n)) {
    if (!hard.accepts(w)) continue;
    int64_t lbl = label.output_of(w);
    int64_t c = numerator(eval_cost(cost, w)).convert_to<int64_t>();
    out[{lbl, c}]++;
  }
  return out;
}

void check_table_against_enumeration(const CostClassTable& table,
                                     const std::map<std::pair<int64_t, int64_t>, int>& expected) {
  BigInt expected_total = 0;
  for (auto& [key, count] : expected) expected_total += count;
  CHECK(table.grand_total() == expected_total);
  for (size_t i = 0; i < table.label_values.size(); i++)
    for (size_t k = 0; k < table.costs.size(); k++) {
      int64_t cost_value = numerator(table.costs[k]).convert_to<int64_t>();
      auto it = expected.find({table.label_values[i], cost_value});
      BigInt want = it == expected.end() ? 0 : it->second;
      CHECK(table.sizes[i][k] == want);
    }
}

}  // namespace

TEST_CASE("toy class table matches the worked example") {
  auto bundle = toy::bundle();
  auto build = build_cost_class_table(bundle.hard, bundle.label, bundle.cost, 3, 3);
  const CostClassTable& t = build.table;
  CHECK(t.label_values == std::vector<int64_t>{0, 1});
  CHECK(t.costs == std::vector<Rational>{Rational(1), Rational(2), Rational(3), Rational(4),
                                         Rational(5), Rational(6), Rational(7)});
  CHECK(t.sizes[0] == std::vector<BigInt>{1, 1, 0, 1, 0, 0, 1});
  CHECK(t.sizes[1] == std::vector<BigInt>{0, 0, 1, 0, 1, 1, 0});
  CHECK(build.hard_word_count == 7);
}

TEST_CASE("empty hard language yields an all-zero table") {
  auto bundle = toy::bundle();
  bundle.hard.accepting = {0, 0};
  auto build = build_cost_class_table(bundle.hard, bundle.label, bundle.cost, 3, 3);
  CHECK(build.table.grand_total() == 0);
  CHECK(build.table.costs.empty());
}

TEST_CASE("class sizes match enumeration on random state-output specs") {
  Rng rng(481516);
  for (int trial = 0; trial < 25; trial++) {
    Dfa hard = brute::random_dfa(rng, 1 + rng() % 4, 2);
    StateOutputDfa label;
    label.dfa = brute::random_dfa(rng, 1 + rng() % 3, 2, 100);  // accepts everywhere
    for (uint32_t q = 0; q < label.dfa.num_states; q++) label.outputs.push_back(rng() % 2);
    StateOutputDfa cost;
    cost.dfa = brute::random_dfa(rng, 1 + rng() % 4, 2, 100);
    for (uint32_t q = 0; q < cost.dfa.num_states; q++) cost.outputs.push_back(1 + rng() % 4);

    uint32_t m = rng() % 3, n = m + rng() % 4;
    auto build = build_cost_class_table(hard, label, cost, m, n);
    check_table_against_enumeration(build.table, brute_classes(hard, label, cost, m, n));
  }
}

TEST_CASE("class sizes match enumeration on random accumulated-cost specs") {
  Rng rng(161803);
  for (int trial = 0; trial < 15; trial++) {
    Dfa hard = brute::random_dfa(rng, 1 + rng() % 3, 2);
    StateOutputDfa label;
    label.dfa = brute::random_dfa(rng, 1 + rng() % 2, 2, 100);
    for (uint32_t q = 0; q < label.dfa.num_states; q++) label.outputs.push_back(rng() % 2);
    WeightedDfa cost;
    cost.dfa = brute::random_dfa(rng, 1 + rng() % 3, 2, 100);
    for (uint32_t q = 0; q < cost.dfa.num_states; q++) cost.weights.push_back(rng() % 3);

    uint32_t m = rng() % 2, n = m + rng() % 5;
    auto build = build_cost_class_table(hard, label, CostSpec(cost), m, n);
    check_table_against_enumeration(build.table, brute_classes(hard, label, CostSpec(cost), m, n));
  }
}

TEST_CASE("accumulated-cost budget cap") {
  auto bundle = toy::bundle();
  WeightedDfa w;
  w.dfa = toy::hard_dfa();
  w.weights = {5000, 5000};
  bundle.cost = w;
  CHECK_THROWS_AS(build_cost_class_table(bundle.hard, bundle.label, bundle.cost, 3, 3, 10000),
                  BudgetExceeded);
  CHECK_NOTHROW(build_cost_class_table(bundle.hard, bundle.label, bundle.cost, 3, 3, 50000));
}

TEST_CASE("toy improviser exact word distribution") {
  auto outcome = build_improviser(toy::bundle());
  REQUIRE(std::holds_alternative<Improviser>(outcome));
  const Improviser& improviser = std::get<Improviser>(outcome);

  auto dist = improviser.exact_word_distribution();
  std::map<std::string, Rational> expected = {
      {"001", Rational(2, 5)},  {"010", Rational(6, 25)}, {"100", Rational(2, 25)},
      {"111", Rational(2, 25)}, {"011", Rational(1, 10)}, {"101", Rational(2, 25)},
      {"110", Rational(1, 50)},
  };
  CHECK(dist == expected);

  Rational sum = 0;
  for (auto& [w, p] : dist) sum += p;
  CHECK(sum == 1);

  // Per-word conditionals within the word-randomness bounds.
  const auto& inst = improviser.instance();
  Rational odd_mass = 0, even_mass = 0;
  for (auto& [w, p] : dist) {
    int ones = static_cast<int>(std::count(w.begin(), w.end(), '1'));
    (ones % 2 == 1 ? odd_mass : even_mass) += p;
  }
  for (auto& [w, p] : dist) {
    int ones = static_cast<int>(std::count(w.begin(), w.end(), '1'));
    size_t label = ones % 2 == 1 ? 0 : 1;
    Rational conditional = p / (label == 0 ? odd_mass : even_mass);
    CHECK(conditional >= inst.word_lower[label]);
    CHECK(conditional <= inst.word_upper[label]);
  }

  // Expected cost recomputed from the joint classes.
  Rational from_classes = 0;
  for (size_t i = 0; i < 2; i++)
    for (size_t k = 0; k < improviser.table().costs.size(); k++)
      from_classes += improviser.distribution().joint(i, k) * improviser.table().costs[k];
  CHECK(from_classes == improviser.distribution().overall_expected_cost);
  CHECK(from_classes == Rational(129, 50));
}

TEST_CASE("toy improviser empirical frequencies within 5 sigma") {
  auto outcome = build_improviser(toy::bundle());
  REQUIRE(std::holds_alternative<Improviser>(outcome));
  const Improviser& improviser = std::get<Improviser>(outcome);

  Rng rng(271828);
  std::map<std::string, uint64_t> counts;
  const uint64_t n = 1000000;
  for (uint64_t i = 0; i < n; i++) {
    Word w = improviser.sample(rng);
    counts[render_word(toy::hard_dfa(), w)]++;
  }
  auto dist = improviser.exact_word_distribution();
  CHECK(counts.size() == dist.size());
  for (auto& [word, p_exact] : dist) {
    double p = to_double(p_exact);
    double sigma = std::sqrt(p * (1 - p) * double(n));
    CHECK(std::fabs(double(counts[word]) - p * double(n)) < 5 * sigma);
  }
}

TEST_CASE("infeasible toy instance propagates the verdict") {
  auto outcome = build_improviser(toy::bundle(Rational(2)));
  REQUIRE(std::holds_alternative<FeasibilityReport>(outcome));
  CHECK(*std::get<FeasibilityReport>(outcome).reason == InfeasibleReason::MinCostExceedsBound);
}

TEST_CASE("every emitted word satisfies the hard spec and length bounds") {
  auto bundle = toy::bundle();
  auto outcome = build_improviser(bundle);
  const Improviser& improviser = std::get<Improviser>(outcome);
  Rng rng(11);
  for (int i = 0; i < 2000; i++) {
    Word w = improviser.sample(rng);
    CHECK(w.size() == 3);
    CHECK(bundle.hard.accepts(w));
  }
}

TEST_CASE("sampling determinism under a fixed seed") {
  auto outcome = build_improviser(toy::bundle());
  const Improviser& improviser = std::get<Improviser>(outcome);
  Rng a(123), b(123);
  for (int i = 0; i < 200; i++) CHECK(improviser.sample(a) == improviser.sample(b));
}

TEST_CASE("exact_word_distribution rejects oversized instances") {
  auto outcome = build_improviser(toy::bundle());
  const Improviser& improviser = std::get<Improviser>(outcome);
  CHECK_THROWS_AS(improviser.exact_word_distribution(3), TooManyWords);
}

TEST_CASE("mismatched per-label bounds are rejected") {
  auto bundle = toy::bundle();
  bundle.instance.word_lower = {Rational(0)};
  bundle.instance.word_upper = {Rational(1)};
  CHECK_THROWS(build_improviser(bundle));
}
