// Automata realization of the two-label maximum-entropy example: one
// cheap word and 1000 expensive words per label. Words over {a, b}; the
// label is the first symbol; cost 1 for length-1 words and 2 for length-11
// words whose 10-symbol suffix, read as binary (a=0, b=1), is below 1000.
#pragma once

#include "improv/exact_scheme.hpp"

namespace melqci_example {

using namespace improv;

inline Dfa hard_dfa() {
  // States: (pos 0..12, cmp in {eq=0, lt=1, gt=2}); pos 12 = overflow.
  const int64_t kLimit = 1000;  // 1111101000 in binary, 10 bits
  auto id = [](int pos, int cmp) { return uint32_t(pos * 3 + cmp); };
  Dfa d;
  d.alphabet = {"a", "b"};
  d.num_states = 13 * 3;
  d.initial = id(0, 0);
  d.transitions.assign(size_t(d.num_states) * 2, 0);
  for (int pos = 0; pos <= 12; pos++) {
    for (int cmp = 0; cmp < 3; cmp++) {
      for (int bit = 0; bit < 2; bit++) {
        int npos = std::min(pos + 1, 12);
        int ncmp = cmp;
        if (pos >= 1 && pos <= 10 && cmp == 0) {
          int kbit = (kLimit >> (10 - pos)) & 1;  // suffix bit index pos-1
          if (bit < kbit) ncmp = 1;
          if (bit > kbit) ncmp = 2;
        }
        d.transitions[size_t(id(pos, cmp)) * 2 + bit] = id(npos, ncmp);
      }
    }
  }
  d.accepting.assign(d.num_states, 0);
  for (int cmp = 0; cmp < 3; cmp++) d.accepting[id(1, cmp)] = 1;
  d.accepting[id(11, 1)] = 1;
  return d;
}

inline StateOutputDfa label_dfa() {
  StateOutputDfa s;
  s.dfa.alphabet = {"a", "b"};
  s.dfa.num_states = 3;  // 0 initial, 1 first=a, 2 first=b
  s.dfa.initial = 0;
  s.dfa.transitions = {1, 2, /*1*/ 1, 1, /*2*/ 2, 2};
  s.dfa.accepting = {0, 1, 1};
  s.outputs = {0, 1, 2};
  return s;
}

inline StateOutputDfa cost_dfa() {
  StateOutputDfa s;
  s.dfa.alphabet = {"a", "b"};
  s.dfa.num_states = 13;  // position, capped
  s.dfa.initial = 0;
  for (uint32_t pos = 0; pos <= 12; pos++) {
    uint32_t next = std::min(pos + 1, 12u);
    s.dfa.transitions.push_back(next);
    s.dfa.transitions.push_back(next);
  }
  s.dfa.accepting.assign(13, 1);
  s.outputs.assign(13, 3);  // unrealized filler cost
  s.outputs[1] = 1;
  s.outputs[11] = 2;
  return s;
}

inline DfaInstanceBundle bundle() {
  DfaInstanceBundle b;
  b.hard = hard_dfa();
  b.label = label_dfa();
  b.cost = cost_dfa();
  b.instance.alphabet = {"a", "b"};
  b.instance.min_length = 1;
  b.instance.max_length = 11;
  b.instance.cost_bound = Rational(3, 2);
  b.instance.label_lower = Rational(1, 2);
  b.instance.label_upper = Rational(1, 2);
  b.instance.word_lower = {Rational(0), Rational(0)};
  b.instance.word_upper = {Rational(1), Rational(1)};
  return b;
}

}  // namespace melqci_example
