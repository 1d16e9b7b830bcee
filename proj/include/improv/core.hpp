#pragma once

#include "improv/rational.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace improv {

// Problem parameters shared by every backend. The hard/label/cost
// specifications themselves are attached by the automata or CNF bundles;
// this struct carries the numeric contract.
struct LqciInstance {
  std::vector<std::string> alphabet;
  uint32_t min_length = 0;            // m
  uint32_t max_length = 0;            // n
  Rational cost_bound;                // c
  Rational label_lower;               // lambda
  Rational label_upper;               // rho
  std::vector<Rational> word_lower;   // alpha-hat, one per label
  std::vector<Rational> word_upper;   // beta-hat, one per label

  size_t label_count() const { return word_lower.size(); }
  // Throws std::invalid_argument when the basic parameter invariants fail
  // (m <= n, 0 <= lambda <= rho <= 1, 0 <= alpha_i <= beta_i <= 1, c > 0).
  void validate() const;
};

// Class sizes per (label, cost): the bridge between spec backends and the
// greedy construction. Costs strictly increase; sizes may be zero.
struct CostClassTable {
  std::vector<int64_t> label_values;          // the label set Omega, ascending
  std::vector<Rational> costs;                // Theta, strictly increasing
  std::vector<std::vector<BigInt>> sizes;     // [label][cost]
  std::vector<std::vector<int>> sampler_keys; // opaque handles, -1 when absent

  BigInt label_total(size_t label) const;
  BigInt grand_total() const;
  void validate() const;
};

enum class GreedyCostError { AlphaTooLarge, BetaTooSmall, AlphaBetaMismatch };
enum class LabelError { LabelBoundsInfeasible };

struct GreedyCostResult {
  std::vector<Rational> class_probs;  // aligned with the input class list
  Rational expected_cost;
  Rational overflow_budget;                  // o_i
  std::optional<size_t> overflow_class;      // r (input index), if any
};

struct CostClass {
  Rational cost;
  BigInt size;
};

// Minimum-expected-cost distribution over one label's cost classes subject
// to per-word probability bounds [alpha, beta]. Classes must be sorted by
// strictly increasing cost; empty classes are skipped and get probability 0.
std::variant<GreedyCostResult, GreedyCostError> greedy_cost_construction(
    const std::vector<CostClass>& classes, const Rational& alpha, const Rational& beta);

// Label marginal assigning maximal probability to the cheapest labels
// subject to [lambda, rho]. Ties broken by label index.
std::variant<std::vector<Rational>, LabelError> greedy_label_construction(
    const std::vector<Rational>& expected_costs, const Rational& lambda, const Rational& rho);

struct LabelClassDist {
  Rational marginal;                      // D-hat(i)
  std::vector<Rational> class_probs;      // D_i over the table's cost axis
  Rational expected_cost;                 // E_i (0 for excluded labels)
  Rational overflow_budget;               // o_i
  std::optional<size_t> overflow_class;   // r_i (table cost index)
  bool excluded = false;                  // lambda = 0 label carrying no mass
};

struct ImprovisingDistributionSpec {
  std::vector<int64_t> label_values;
  std::vector<Rational> costs;
  std::vector<LabelClassDist> labels;
  Rational overall_expected_cost;
  BigInt label_overflow_count;  // u

  // Joint class probability D-hat(i) * D_i(I_{i,k}).
  Rational joint(size_t label, size_t cost) const {
    return labels[label].marginal * labels[label].class_probs[cost];
  }
};

enum class InfeasibleReason {
  LabelCountVsRho,
  LabelCountVsLambda,
  ClassTooSmallForBeta,
  ClassTooBigForAlpha,
  MinCostExceedsBound,
};

std::string to_string(InfeasibleReason reason);

struct FeasibilityReport {
  bool feasible = false;
  std::optional<ImprovisingDistributionSpec> distribution;  // set when feasible
  std::optional<InfeasibleReason> reason;                   // set when infeasible
  std::optional<size_t> offending_label;                    // for per-label reasons
};

// Decides feasibility for the instance over the given class table and, when
// feasible, returns the greedy (minimum expected cost) distribution.
// Labels that cannot carry probability are tolerated only when lambda = 0,
// in which case they are excluded with zero marginal.
FeasibilityReport feasibility_check(const LqciInstance& instance, const CostClassTable& table);

// Assembles a distribution spec from a label marginal and per-label class
// distributions (class_probs aligned with `costs`).
ImprovisingDistributionSpec combine(std::vector<int64_t> label_values, std::vector<Rational> costs,
                                    const std::vector<Rational>& marginal,
                                    const std::vector<GreedyCostResult>& per_label);

}  // namespace improv
