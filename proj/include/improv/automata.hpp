#pragma once

#include "improv/rational.hpp"
#include "improv/sampling.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace improv {

// Symbol-index word; rendered strings join the alphabet entries.
using Word = std::vector<uint32_t>;

struct AlphabetMismatch : std::runtime_error {
  AlphabetMismatch() : std::runtime_error("automata alphabets differ") {}
};
struct EmptyLanguage : std::runtime_error {
  EmptyLanguage() : std::runtime_error("no accepting word in the length range") {}
};

// Complete DFA: every (state, symbol) pair has a transition.
struct Dfa {
  std::vector<std::string> alphabet;
  uint32_t num_states = 0;
  uint32_t initial = 0;
  std::vector<uint32_t> transitions;  // num_states * alphabet.size(), row-major
  std::vector<uint8_t> accepting;     // num_states

  size_t symbol_count() const { return alphabet.size(); }
  uint32_t step(uint32_t state, uint32_t sym) const {
    return transitions[static_cast<size_t>(state) * alphabet.size() + sym];
  }
  uint32_t run(std::span<const uint32_t> word) const {
    uint32_t q = initial;
    for (uint32_t s : word) q = step(q, s);
    return q;
  }
  bool accepts(std::span<const uint32_t> word) const { return accepting[run(word)] != 0; }

  // Throws std::invalid_argument on structural problems (partial tables,
  // out-of-range targets, ...).
  void validate() const;
};

// DFA emitting an integer at the state a run ends on. By convention these
// accept everywhere unless the builder narrows the accepting set.
struct StateOutputDfa {
  Dfa dfa;
  std::vector<int64_t> outputs;  // one per state

  int64_t output_of(std::span<const uint32_t> word) const { return outputs[dfa.run(word)]; }
  void validate() const;
};

// DFA accumulating per-state weights: a length-L word costs
// weight(initial) plus the weight of each of the L states entered.
struct WeightedDfa {
  Dfa dfa;
  std::vector<int64_t> weights;  // one per state, >= 0

  int64_t max_weight() const;
  int64_t cost_of(std::span<const uint32_t> word) const;
  void validate() const;
};

// Suffix counts: count(q, s) accepting words of length s from state q.
class CountTable {
 public:
  CountTable() = default;
  CountTable(const Dfa& dfa, uint32_t max_len);

  uint32_t max_len() const { return max_len_; }
  const BigInt& count(uint32_t state, uint32_t remaining) const {
    return counts_[remaining][state];
  }
  // Accepting words of exactly the given length.
  const BigInt& words_of_length(uint32_t len) const { return counts_[len][initial_]; }

 private:
  std::vector<std::vector<BigInt>> counts_;  // [remaining][state]
  uint32_t max_len_ = 0;
  uint32_t initial_ = 0;
};

// Language intersection over the reachable part of the pair graph.
Dfa product(const Dfa& a, const Dfa& b);

// Exact per-length counts for lengths m..n (inclusive).
std::vector<BigInt> count_words(const Dfa& dfa, uint32_t m, uint32_t n);

// Exactly uniform draw over accepting words with length in m..n. The table
// must have been built with max_len >= n.
Word sample_uniform(const Dfa& dfa, uint32_t m, uint32_t n, const CountTable& table, Rng& rng);

// Narrow acceptance to states with the given output value.
Dfa restrict_output(const StateOutputDfa& s, int64_t value);

// All accumulated costs achieved by words accepted by `hard` with length in
// m..n (sorted, duplicate-free).
std::vector<int64_t> possible_costs(const WeightedDfa& w, const Dfa& hard, uint32_t m, uint32_t n);

// DFA accepting exactly the base-accepted words of accumulated cost k.
// Tracks cost in k+2 saturating buckets (0..k plus an overflow level k+1).
Dfa cost_tracking_dfa(const WeightedDfa& w, int64_t k);

// Enumerates the accepting words with lengths in m..n, lexicographic within
// each length, shortest first. Throws std::length_error past `cap` words.
std::vector<Word> enumerate_words(const Dfa& dfa, uint32_t m, uint32_t n, size_t cap);

std::string render_word(const Dfa& dfa, const Word& word);
Word parse_word(const std::vector<std::string>& alphabet, std::string_view text);

}  // namespace improv
