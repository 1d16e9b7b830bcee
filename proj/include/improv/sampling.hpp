#pragma once

#include "improv/rational.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace improv {

using Rng = std::mt19937_64;

// Stream seeding used by the CLI worker threads: mixes (seed, stream index)
// so distinct streams are decorrelated but fully reproducible.
uint64_t mix_seed(uint64_t seed, uint64_t stream);

// Uniform big integer in [0, n), n >= 1. Rejection sampling on raw bits, so
// the distribution is exact and depends only on the rng's bit stream.
BigInt uniform_below(Rng& rng, const BigInt& n);

// Categorical draw over arbitrary big-integer weights.
class BigCategorical {
 public:
  BigCategorical() = default;
  explicit BigCategorical(std::span<const BigInt> weights);
  explicit BigCategorical(std::span<const Rational> probs);

  bool empty() const { return total_ == 0; }
  const BigInt& total() const { return total_; }
  size_t pick(Rng& rng) const;

 private:
  std::vector<BigInt> cumulative_;
  BigInt total_ = 0;
};

}  // namespace improv
