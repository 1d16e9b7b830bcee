// Brute-force enumeration oracles shared by the unit and acceptance suites.
#pragma once

#include "improv/automata.hpp"
#include "improv/sampling.hpp"

#include <functional>
#include <vector>

namespace brute {

using improv::Dfa;
using improv::Rng;
using improv::Word;

// Every word over an alphabet of `symbols` symbols with length in [m, n].
inline std::vector<Word> all_words(size_t symbols, uint32_t m, uint32_t n) {
  std::vector<Word> out;
  for (uint32_t len = m; len <= n; len++) {
    Word word(len, 0);
    while (true) {
      out.push_back(word);
      size_t pos = len;
      while (pos > 0) {
        if (++word[pos - 1] < symbols) break;
        word[pos - 1] = 0;
        pos--;
      }
      if (pos == 0) break;
    }
  }
  return out;
}

inline std::vector<Word> accepted_words(const Dfa& dfa, uint32_t m, uint32_t n) {
  std::vector<Word> out;
  for (Word& w : all_words(dfa.alphabet.size(), m, n))
    if (dfa.accepts(w)) out.push_back(std::move(w));
  return out;
}

// Random complete DFA with the given shape. Acceptance probability per state
// is roughly accept_pct / 100.
inline Dfa random_dfa(Rng& rng, uint32_t states, size_t symbols, unsigned accept_pct = 40) {
  Dfa dfa;
  for (size_t a = 0; a < symbols; a++) dfa.alphabet.push_back(std::string(1, char('a' + a)));
  dfa.num_states = states;
  dfa.initial = static_cast<uint32_t>(rng() % states);
  for (uint32_t q = 0; q < states; q++)
    for (size_t a = 0; a < symbols; a++)
      dfa.transitions.push_back(static_cast<uint32_t>(rng() % states));
  dfa.accepting.resize(states);
  for (uint32_t q = 0; q < states; q++) dfa.accepting[q] = rng() % 100 < accept_pct;
  return dfa;
}

}  // namespace brute
