// Boolean encoding of the running example: x = 3 trace bits (ids 1..3),
// y = 3 cost bits (4..6) pinned to equal x, one label bit (7) whose value is
// the label index: 0 = odd number of ones, 1 = even.
#pragma once

#include "improv/approx.hpp"
#include "improv/cnf.hpp"

namespace toycnf {

using namespace improv;

inline CnfSpec spec() {
  CnfSpec s;
  s.groups.x = {1, 2, 3};
  s.groups.y = {4, 5, 6};
  s.groups.label_bits = {7};
  s.label_count = 2;

  s.hard.add_clause({1, 2, 3});  // at least one 1

  // Label bit b=0 exactly on odd parity: forbid every assignment of
  // (x1,x2,x3,b) whose total parity is even.
  for (int bits = 0; bits < 16; bits++) {
    int ones = __builtin_popcount(bits);
    if (ones % 2 == 1) continue;  // satisfies x1 ^ x2 ^ x3 ^ b = 1
    Clause clause;
    const int vars[4] = {1, 2, 3, 7};
    for (int i = 0; i < 4; i++) clause.push_back((bits >> i) & 1 ? -vars[i] : vars[i]);
    s.label.add_clause(std::move(clause));
  }

  // Cost bits equal the trace bits (big-endian): cost = value of x.
  const int pairs[3][2] = {{4, 1}, {5, 2}, {6, 3}};
  for (auto [y, x] : pairs) {
    s.cost.add_clause({-y, x});
    s.cost.add_clause({y, -x});
  }
  s.validate();
  return s;
}

inline CnfInstanceBounds bounds(const Rational& cost_bound) {
  CnfInstanceBounds b;
  b.cost_bound = cost_bound;
  b.label_lower = Rational(1, 5);
  b.label_upper = Rational(1);
  b.word_lower = {Rational(1, 10), Rational(1, 10)};
  b.word_upper = {Rational(1, 2), Rational(1, 2)};
  return b;
}

}  // namespace toycnf
