#pragma once

#include "improv/rational.hpp"
#include "improv/sampling.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace improv {

// DIMACS conventions: variables are 1-based, a negative literal negates.
using Lit = int;
using Clause = std::vector<Lit>;

struct CapExceeded : std::runtime_error {
  explicit CapExceeded(const std::string& what) : std::runtime_error(what) {}
};

struct CnfFormula {
  int num_vars = 0;
  std::vector<Clause> clauses;

  void add_clause(Clause clause);
  void append(const CnfFormula& other);  // same variable space
};

// Variable roles within the shared id space.
struct VarGroups {
  std::vector<int> x;           // trace bits
  std::vector<int> y;           // cost bits, big-endian unsigned
  std::vector<int> label_bits;  // big-endian label index
  std::vector<int> z;           // auxiliary
};

// Boolean-encoded instance: three CNF formulas over one variable space.
struct CnfSpec {
  CnfFormula hard;   // h(x, z)
  CnfFormula label;  // l(x, label_bits, z)
  CnfFormula cost;   // k(x, y, z)
  VarGroups groups;
  size_t label_count = 0;

  int num_vars() const;
  void validate() const;
};

// Annotated DIMACS: group annotations "c ind x ...", "c cost y ...",
// "c label bits ...", "c aux z ..." plus section markers
// "c formula hard|label|cost" splitting the clause list.
CnfSpec parse_cnf_spec(std::istream& in);
CnfSpec parse_cnf_spec_file(const std::string& path);
std::string cnf_spec_to_dimacs(const CnfSpec& spec);

// Plain DIMACS with a projection annotation ("c ind ..."), the framing used
// by the external-oracle protocol.
struct ProjectedFormula {
  CnfFormula formula;
  std::vector<int> projection;
};
ProjectedFormula parse_dimacs(std::istream& in);
std::string to_dimacs(const CnfFormula& formula, const std::vector<int>& projection);

// Clauses over y_vars (big-endian unsigned) satisfiable exactly when
// lo <= y <= hi. Pure prefix encoding; no auxiliary variables needed.
std::vector<Clause> cost_interval_clauses(const std::vector<int>& y_vars, const BigInt& lo,
                                          const BigInt& hi);

// Fixes the variables to the big-endian binary encoding of `value`.
std::vector<Clause> pin_value_clauses(const std::vector<int>& vars, uint64_t value);

// Small DPLL solver. `assumptions` are literals taken as true.
bool sat(const CnfFormula& formula, const std::vector<Lit>& assumptions = {});

// Exact projected model count: number of distinct assignments to
// `projection` extendable to a full model. Throws CapExceeded when
// 2^|projection| exceeds the candidate cap.
BigInt projected_count(const CnfFormula& formula, const std::vector<int>& projection,
                       uint64_t candidate_cap = uint64_t(1) << 24);

// Exactly uniform draw over the projected models; nullopt when none exist.
std::optional<std::vector<bool>> projected_sample(const CnfFormula& formula,
                                                  const std::vector<int>& projection, Rng& rng,
                                                  uint64_t candidate_cap = uint64_t(1) << 24);

// All projected models, in lexicographic order (false < true per position).
std::vector<std::vector<bool>> projected_models(const CnfFormula& formula,
                                                const std::vector<int>& projection,
                                                uint64_t candidate_cap = uint64_t(1) << 24);

}  // namespace improv
