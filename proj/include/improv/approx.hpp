#pragma once

#include "improv/cnf.hpp"
#include "improv/core.hpp"
#include "improv/rational.hpp"
#include "improv/sampling.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>

namespace improv {

struct OracleError : std::runtime_error {
  explicit OracleError(const std::string& what) : std::runtime_error(what) {}
};

// Approximate counter interface: result within a factor 1+tau of the true
// projected count with probability at least `confidence`.
class CounterOracle {
 public:
  virtual ~CounterOracle() = default;
  virtual BigInt count(const CnfFormula& formula, const std::vector<int>& projection,
                       const Rational& tau, const Rational& confidence) = 0;
};

// Almost-uniform generator: every projected model is produced with
// probability within a factor 1+epsilon of uniform.
class GeneratorOracle {
 public:
  virtual ~GeneratorOracle() = default;
  virtual std::vector<bool> sample(const CnfFormula& formula, const std::vector<int>& projection,
                                   const Rational& epsilon, Rng& rng) = 0;
};

// Exhaustive-enumeration backend: tau = 0 counts and epsilon = 0 sampling.
// Desk-scale stand-in for SAT-based counters.
class ExactEnumerationOracle : public CounterOracle, public GeneratorOracle {
 public:
  explicit ExactEnumerationOracle(uint64_t candidate_cap = uint64_t(1) << 24)
      : cap_(candidate_cap) {}
  BigInt count(const CnfFormula& formula, const std::vector<int>& projection, const Rational& tau,
               const Rational& confidence) override;
  std::vector<bool> sample(const CnfFormula& formula, const std::vector<int>& projection,
                           const Rational& epsilon, Rng& rng) override;

 private:
  uint64_t cap_;
};

// Bridges to an external counter/generator over the subprocess protocol:
// annotated DIMACS on stdin, flags on the command line, one line back.
class ExecOracle : public CounterOracle, public GeneratorOracle {
 public:
  explicit ExecOracle(std::string command) : command_(std::move(command)) {}
  BigInt count(const CnfFormula& formula, const std::vector<int>& projection, const Rational& tau,
               const Rational& confidence) override;
  std::vector<bool> sample(const CnfFormula& formula, const std::vector<int>& projection,
                           const Rational& epsilon, Rng& rng) override;

 private:
  std::string run(const std::string& args, const std::string& input) const;
  std::string command_;
};

// Mutex adapters for oracles that are not safe under concurrent calls.
class SerializingCounter : public CounterOracle {
 public:
  explicit SerializingCounter(CounterOracle& inner) : inner_(inner) {}
  BigInt count(const CnfFormula& f, const std::vector<int>& p, const Rational& tau,
               const Rational& confidence) override {
    std::lock_guard lock(mutex_);
    return inner_.count(f, p, tau, confidence);
  }

 private:
  CounterOracle& inner_;
  std::mutex mutex_;
};
class SerializingGenerator : public GeneratorOracle {
 public:
  explicit SerializingGenerator(GeneratorOracle& inner) : inner_(inner) {}
  std::vector<bool> sample(const CnfFormula& f, const std::vector<int>& p, const Rational& eps,
                           Rng& rng) override {
    std::lock_guard lock(mutex_);
    return inner_.sample(f, p, eps, rng);
  }

 private:
  GeneratorOracle& inner_;
  std::mutex mutex_;
};

// Geometric cost buckets: bucket k (1-based) holds integer costs in
// [ceil(r^{k-1}), ceil(r^k) - 1], clipped to the encodable range.
struct BucketPlan {
  Rational ratio;            // r > 1
  size_t bucket_count = 0;   // b
  size_t cost_bits = 0;      // |y|

  static BucketPlan make(const Rational& ratio, size_t cost_bits);
  std::pair<BigInt, BigInt> bucket_range(size_t k) const;  // 1-based, inclusive
  Rational representative_low(size_t k) const { return rational_pow(ratio, long(k) - 1); }
};

struct BucketEstimates {
  std::vector<BigInt> counts;    // c_k
  std::vector<Rational> probs;   // p_k, sums to exactly 1
  Rational lower_bound;          // Lo
};

// Tolerance bookkeeping for the end-to-end approximate scheme.
struct ApproxParams {
  Rational zeta;   // cost tolerance
  Rational gamma;  // randomness tolerance
  Rational delta;  // 1 - confidence

  Rational ratio() const { return 1 + zeta; }
  // Largest representable tau with (1+tau)^3 <= 1+gamma; exact when 1+gamma
  // is a perfect rational cube.
  Rational tau() const;
  Rational epsilon() const { return tau(); }
  // Per-call confidence 1-d with (1-d)^total >= 1-delta (d rounded down).
  Rational per_count_confidence(size_t total_counts) const;
};

// phi_i: hard ∧ label ∧ cost ∧ (label bits = index i).
CnfFormula build_phi(const CnfSpec& spec, size_t label_index);

// Line-faithful bucketed greedy cost pass for one label. nullopt = False
// (infeasibility certificate, assuming counts within tolerance).
std::optional<BucketEstimates> approximate_greedy_cost(const CnfSpec& spec, size_t label_index,
                                                       const Rational& alpha, const Rational& beta,
                                                       const BucketPlan& plan, const Rational& tau,
                                                       const Rational& confidence,
                                                       CounterOracle& counter);

// Numeric bounds for a Boolean-encoded instance (length bounds live inside
// the hard formula).
struct CnfInstanceBounds {
  Rational cost_bound;               // c
  Rational label_lower, label_upper; // lambda, rho
  std::vector<Rational> word_lower;  // alpha-hat per label
  std::vector<Rational> word_upper;  // beta-hat per label
};

class ApproxImproviser {
 public:
  ApproxImproviser(CnfSpec spec, BucketPlan plan, std::vector<Rational> label_marginal,
                   std::vector<BucketEstimates> per_label, Rational epsilon,
                   GeneratorOracle& generator);

  // One trace: the x bits rendered as a 0/1 string.
  std::string sample(Rng& rng);

  struct Draw {
    std::string word;
    size_t label_index;
    size_t bucket;  // 1-based
  };
  Draw sample_info(Rng& rng);

  const std::vector<Rational>& label_marginal() const { return label_marginal_; }
  const std::vector<BucketEstimates>& bucket_estimates() const { return per_label_; }
  const BucketPlan& plan() const { return plan_; }
  Rational certified_cost_lower_bound() const;  // Low

  // Exact word-level distribution via exhaustive enumeration (test oracle;
  // matches the sampler exactly only for an exact generator).
  std::map<std::string, Rational> exact_word_distribution(uint64_t candidate_cap = uint64_t(1)
                                                                                   << 24) const;

 private:
  CnfFormula bucket_formula(size_t label_index, size_t bucket) const;

  CnfSpec spec_;
  BucketPlan plan_;
  std::vector<Rational> label_marginal_;
  std::vector<BucketEstimates> per_label_;
  Rational epsilon_;
  GeneratorOracle& generator_;
  BigCategorical label_draw_;
  std::vector<BigCategorical> bucket_draw_;
};

// End-to-end Thm-5 pipeline. nullopt = bottom (infeasible with the stated
// confidence, or certified lower bound Low above the cost bound).
std::optional<ApproxImproviser> build_approx_improviser(const CnfSpec& spec,
                                                        const CnfInstanceBounds& bounds,
                                                        const ApproxParams& params,
                                                        CounterOracle& counter,
                                                        GeneratorOracle& generator);

}  // namespace improv
