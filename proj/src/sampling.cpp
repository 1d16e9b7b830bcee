#include "improv/sampling.hpp"

#include <algorithm>
#include <stdexcept>

namespace improv {

uint64_t mix_seed(uint64_t seed, uint64_t stream) {
  // splitmix64 finalizer over the pair.
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

BigInt uniform_below(Rng& rng, const BigInt& n) {
  if (n <= 0) throw std::invalid_argument("uniform_below: n must be positive");
  if (n == 1) return BigInt(0);
  const unsigned bits = static_cast<unsigned>(msb(n)) + 1;
  const unsigned limbs = (bits + 63) / 64;
  const unsigned top_bits = bits - (limbs - 1) * 64;
  const uint64_t top_mask = top_bits == 64 ? ~0ULL : ((1ULL << top_bits) - 1);
  while (true) {
    BigInt v = 0;
    for (unsigned i = 0; i < limbs; i++) {
      uint64_t limb = rng();
      if (i == limbs - 1) limb &= top_mask;
      v |= BigInt(limb) << (64 * i);
    }
    if (v < n) return v;
  }
}

BigCategorical::BigCategorical(std::span<const BigInt> weights) {
  cumulative_.reserve(weights.size());
  for (const BigInt& w : weights) {
    if (w < 0) throw std::invalid_argument("negative categorical weight");
    total_ += w;
    cumulative_.push_back(total_);
  }
}

BigCategorical::BigCategorical(std::span<const Rational> probs) {
  // Scale by the common denominator so the draw is exact.
  BigInt common = 1;
  for (const Rational& p : probs) common = lcm(common, denominator(p));
  std::vector<BigInt> weights;
  weights.reserve(probs.size());
  for (const Rational& p : probs) {
    if (p < 0) throw std::invalid_argument("negative categorical weight");
    weights.push_back(numerator(p) * (common / denominator(p)));
  }
  *this = BigCategorical(std::span<const BigInt>(weights));
}

size_t BigCategorical::pick(Rng& rng) const {
  if (total_ == 0) throw std::logic_error("categorical draw over empty distribution");
  BigInt v = uniform_below(rng, total_);
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), v);
  return static_cast<size_t>(it - cumulative_.begin());
}

}  // namespace improv
