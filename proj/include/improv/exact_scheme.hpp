#pragma once

#include "improv/automata.hpp"
#include "improv/core.hpp"
#include "improv/sampling.hpp"

#include <map>
#include <memory>
#include <variant>

namespace improv {

struct BudgetExceeded : std::runtime_error {
  explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};
struct TooManyWords : std::runtime_error {
  explicit TooManyWords(const std::string& what) : std::runtime_error(what) {}
};

// Cost specification: state-output (cost read at the final state) or
// accumulated (sum of state weights along the run, initial state included).
using CostSpec = std::variant<StateOutputDfa, WeightedDfa>;

struct DfaInstanceBundle {
  LqciInstance instance;
  Dfa hard;
  StateOutputDfa label;
  CostSpec cost;

  void validate() const;
};

// The label set: distinct outputs over reachable accepting states of the
// label DFA, ascending. Per-label instance bounds align with this order.
std::vector<int64_t> label_set(const StateOutputDfa& label);

struct ClassSampler {
  Dfa dfa;
  CountTable table;
};

struct CostClassTableBuild {
  CostClassTable table;
  std::vector<ClassSampler> samplers;  // indexed by the table's sampler keys
  BigInt hard_word_count;
};

// Builds the (label, cost) class table by product construction and
// per-length counting. `weighted_budget` caps the accumulated-cost state
// expansion M*(n+1); exceeding it throws BudgetExceeded.
CostClassTableBuild build_cost_class_table(const Dfa& hard, const StateOutputDfa& label,
                                           const CostSpec& cost, uint32_t m, uint32_t n,
                                           int64_t weighted_budget = 10000, unsigned threads = 0);

class Improviser {
 public:
  Improviser(LqciInstance instance, ImprovisingDistributionSpec spec, CostClassTableBuild build);

  struct Draw {
    Word word;
    size_t label_index;
    size_t cost_index;
  };

  Word sample(Rng& rng) const { return sample_info(rng).word; }
  Draw sample_info(Rng& rng) const;

  const LqciInstance& instance() const { return instance_; }
  const ImprovisingDistributionSpec& distribution() const { return spec_; }
  const CostClassTable& table() const { return build_.table; }

  // Fully enumerated exact word distribution (small instances only).
  std::map<std::string, Rational> exact_word_distribution(size_t cap = 100000) const;

 private:
  LqciInstance instance_;
  ImprovisingDistributionSpec spec_;
  CostClassTableBuild build_;
  std::vector<std::pair<size_t, size_t>> choices_;  // category -> (label, cost)
  BigCategorical categorical_;
};

// Runs table construction and the feasibility decision; on success binds the
// greedy distribution to per-class uniform samplers.
std::variant<Improviser, FeasibilityReport> build_improviser(const DfaInstanceBundle& bundle,
                                                             int64_t weighted_budget = 10000,
                                                             unsigned threads = 0);

// Same plumbing with externally supplied class probabilities (used by the
// maximum-entropy construction).
Improviser bind_improviser(const DfaInstanceBundle& bundle, ImprovisingDistributionSpec spec,
                           CostClassTableBuild build);

// Label value / cost of a single word under the bundle's specs.
int64_t eval_label(const StateOutputDfa& label, std::span<const uint32_t> word);
Rational eval_cost(const CostSpec& cost, std::span<const uint32_t> word);

}  // namespace improv
