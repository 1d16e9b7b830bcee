#pragma once

#include "improv/core.hpp"
#include "improv/exact_scheme.hpp"

#include <optional>
#include <vector>

namespace improv {

// Entropy-maximization problem over cost-class probabilities. The word
// bounds are fixed at alpha = 0, beta = 1; within-class distributions are
// uniform (which is entropy-maximal), so classes are the only variables.
struct MaxEntProblem {
  std::vector<std::vector<BigInt>> sizes;  // [label][cost]
  std::vector<Rational> costs;             // strictly increasing
  Rational label_lower;                    // lambda
  Rational label_upper;                    // rho
  Rational cost_bound;                     // c
  double entropy_gap_target = 1e-6;        // bits
  int iteration_budget = 100000;

  static MaxEntProblem from_table(const CostClassTable& table, const Rational& lambda,
                                  const Rational& rho, const Rational& cost_bound,
                                  double gap_target = 1e-6);
};

struct MaxEntSolution {
  std::vector<std::vector<double>> probs;       // solver output D(i,k)
  std::vector<std::vector<Rational>> repaired;  // exact distribution satisfying C1-C6
  double entropy_bits = 0;                      // of `repaired`
  double gap_bound_bits = 0;                    // certified bound on optimum - achieved
  double max_residual = 0;                      // worst C1-C5 residual of `probs`
  bool used_greedy_fallback = false;
};

enum class MaxEntStatus { Solved, Infeasible, NoConvergence };

struct MaxEntOutcome {
  MaxEntStatus status = MaxEntStatus::Infeasible;
  std::optional<MaxEntSolution> solution;       // Solved, and best-effort on NoConvergence
  std::optional<InfeasibleReason> reason;       // Infeasible only
};

MaxEntOutcome solve_melqci(const MaxEntProblem& problem);

// Class-level entropy in bits: sum of -D lg D + D lg|I_{i,k}| (0 lg 0 = 0).
double class_entropy_bits(const std::vector<std::vector<double>>& probs,
                          const std::vector<std::vector<BigInt>>& sizes);
double class_entropy_bits(const std::vector<std::vector<Rational>>& probs,
                          const std::vector<std::vector<BigInt>>& sizes);

// lg of a big integer via bit length plus mantissa correction.
double log2_bigint(const BigInt& value);

struct MaxEntImproviserResult {
  MaxEntStatus status = MaxEntStatus::Infeasible;
  std::optional<Improviser> improviser;
  std::optional<MaxEntSolution> solution;
  std::optional<InfeasibleReason> reason;
};

// DFA-backed MELQCI: builds the class table, solves, and binds the repaired
// exact distribution to the per-class uniform samplers.
MaxEntImproviserResult build_maxent_improviser(const DfaInstanceBundle& bundle,
                                               double gap_target = 1e-6,
                                               int64_t weighted_budget = 10000,
                                               unsigned threads = 0);

}  // namespace improv
