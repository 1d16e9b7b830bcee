#include "improv/cnf.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace improv {

void CnfFormula::add_clause(Clause clause) {
  for (Lit lit : clause) {
    if (lit == 0) throw std::invalid_argument("zero literal");
    num_vars = std::max(num_vars, std::abs(lit));
  }
  clauses.push_back(std::move(clause));
}

void CnfFormula::append(const CnfFormula& other) {
  num_vars = std::max(num_vars, other.num_vars);
  clauses.insert(clauses.end(), other.clauses.begin(), other.clauses.end());
}

int CnfSpec::num_vars() const {
  int n = std::max({hard.num_vars, label.num_vars, cost.num_vars});
  for (const auto* group : {&groups.x, &groups.y, &groups.label_bits, &groups.z})
    for (int v : *group) n = std::max(n, v);
  return n;
}

void CnfSpec::validate() const {
  if (groups.x.empty()) throw std::invalid_argument("no trace bits declared");
  if (label_count == 0) throw std::invalid_argument("label count missing");
  std::set<int> seen;
  for (const auto* group : {&groups.x, &groups.y, &groups.label_bits, &groups.z})
    for (int v : *group) {
      if (v <= 0) throw std::invalid_argument("variable ids are 1-based");
      if (!seen.insert(v).second) throw std::invalid_argument("variable groups overlap");
    }
  uint64_t max_labels = groups.label_bits.size() >= 63
                            ? ~uint64_t(0)
                            : (uint64_t(1) << groups.label_bits.size());
  if (label_count > max_labels) throw std::invalid_argument("label bits too narrow for label count");
}

namespace {

std::vector<int> parse_var_list(std::istringstream& line) {
  std::vector<int> vars;
  int v;
  while (line >> v) {
    if (v == 0) break;  // DIMACS-style terminator is allowed
    vars.push_back(v);
  }
  return vars;
}

}  // namespace

CnfSpec parse_cnf_spec(std::istream& in) {
  CnfSpec spec;
  CnfFormula* current = &spec.hard;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == 'c') {
      std::istringstream ls(line);
      std::string c, key;
      ls >> c >> key;
      if (key == "formula") {
        std::string which;
        ls >> which;
        if (which == "hard")
          current = &spec.hard;
        else if (which == "label")
          current = &spec.label;
        else if (which == "cost")
          current = &spec.cost;
        else
          throw std::invalid_argument("unknown formula section: " + which);
      } else if (key == "ind") {
        std::string x;
        ls >> x;  // "x"
        spec.groups.x = parse_var_list(ls);
      } else if (key == "cost") {
        std::string y;
        ls >> y;  // "y"
        spec.groups.y = parse_var_list(ls);
      } else if (key == "label") {
        std::string sub;
        ls >> sub;
        if (sub == "bits")
          spec.groups.label_bits = parse_var_list(ls);
        else if (sub == "count")
          ls >> spec.label_count;
      } else if (key == "aux") {
        std::string z;
        ls >> z;  // "z"
        spec.groups.z = parse_var_list(ls);
      }
      continue;
    }
    if (line[0] == 'p') continue;  // header is informational here
    std::istringstream ls(line);
    Clause clause;
    Lit lit;
    while (ls >> lit && lit != 0) clause.push_back(lit);
    if (!clause.empty()) current->add_clause(std::move(clause));
  }
  if (spec.label_count == 0 && !spec.groups.label_bits.empty())
    throw std::invalid_argument("missing 'c label count' line");
  if (spec.label_count == 0) spec.label_count = 1;
  spec.validate();
  return spec;
}

CnfSpec parse_cnf_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_cnf_spec(in);
}

namespace {

void write_group(std::ostream& out, const char* tag, const std::vector<int>& vars) {
  if (vars.empty()) return;
  out << "c " << tag;
  for (int v : vars) out << ' ' << v;
  out << " 0\n";
}

void write_clauses(std::ostream& out, const CnfFormula& f) {
  for (const Clause& clause : f.clauses) {
    for (Lit lit : clause) out << lit << ' ';
    out << "0\n";
  }
}

}  // namespace

std::string cnf_spec_to_dimacs(const CnfSpec& spec) {
  std::ostringstream out;
  size_t n_clauses = spec.hard.clauses.size() + spec.label.clauses.size() + spec.cost.clauses.size();
  out << "p cnf " << spec.num_vars() << ' ' << n_clauses << '\n';
  write_group(out, "ind x", spec.groups.x);
  write_group(out, "cost y", spec.groups.y);
  write_group(out, "label bits", spec.groups.label_bits);
  out << "c label count " << spec.label_count << '\n';
  write_group(out, "aux z", spec.groups.z);
  out << "c formula hard\n";
  write_clauses(out, spec.hard);
  out << "c formula label\n";
  write_clauses(out, spec.label);
  out << "c formula cost\n";
  write_clauses(out, spec.cost);
  return out.str();
}

ProjectedFormula parse_dimacs(std::istream& in) {
  ProjectedFormula out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == 'c') {
      std::istringstream ls(line);
      std::string c, key;
      ls >> c >> key;
      if (key == "ind") {
        // Accept both "c ind 1 2 0" and the annotated "c ind x 1 2 0".
        std::vector<int> vars;
        std::string tok;
        while (ls >> tok) {
          if (tok == "x") continue;
          int v = std::stoi(tok);
          if (v == 0) break;
          vars.push_back(v);
        }
        out.projection.insert(out.projection.end(), vars.begin(), vars.end());
      }
      continue;
    }
    if (line[0] == 'p') {
      std::istringstream ls(line);
      std::string p, cnf;
      int nv = 0, nc = 0;
      ls >> p >> cnf >> nv >> nc;
      out.formula.num_vars = std::max(out.formula.num_vars, nv);
      continue;
    }
    std::istringstream ls(line);
    Clause clause;
    Lit lit;
    while (ls >> lit && lit != 0) clause.push_back(lit);
    if (!clause.empty()) out.formula.add_clause(std::move(clause));
  }
  return out;
}

std::string to_dimacs(const CnfFormula& formula, const std::vector<int>& projection) {
  std::ostringstream out;
  out << "p cnf " << formula.num_vars << ' ' << formula.clauses.size() << '\n';
  write_group(out, "ind", projection);
  write_clauses(out, formula);
  return out.str();
}

std::vector<Clause> cost_interval_clauses(const std::vector<int>& y_vars, const BigInt& lo,
                                          const BigInt& hi) {
  const size_t bits = y_vars.size();
  const BigInt max_value = (BigInt(1) << bits) - 1;
  if (lo < 0 || lo > hi || hi > max_value) throw std::invalid_argument("bad interval bounds");

  auto bit_of = [&](const BigInt& v, size_t i) { return bit_test(v, static_cast<unsigned>(bits - 1 - i)); };

  std::vector<Clause> clauses;
  // y >= lo: whenever y matches lo on all higher bits, a 1-bit of lo forces 1.
  for (size_t i = 0; i < bits; i++) {
    if (!bit_of(lo, i)) continue;
    Clause clause;
    for (size_t j = 0; j < i; j++) clause.push_back(bit_of(lo, j) ? -y_vars[j] : y_vars[j]);
    clause.push_back(y_vars[i]);
    clauses.push_back(std::move(clause));
  }
  // y <= hi: symmetric on the 0-bits of hi.
  for (size_t i = 0; i < bits; i++) {
    if (bit_of(hi, i)) continue;
    Clause clause;
    for (size_t j = 0; j < i; j++) clause.push_back(bit_of(hi, j) ? -y_vars[j] : y_vars[j]);
    clause.push_back(-y_vars[i]);
    clauses.push_back(std::move(clause));
  }
  return clauses;
}

std::vector<Clause> pin_value_clauses(const std::vector<int>& vars, uint64_t value) {
  if (vars.size() < 64 && value >= (uint64_t(1) << vars.size()))
    throw std::invalid_argument("value does not fit the variable width");
  std::vector<Clause> clauses;
  for (size_t i = 0; i < vars.size(); i++) {
    bool bit = (value >> (vars.size() - 1 - i)) & 1;
    clauses.push_back({bit ? vars[i] : -vars[i]});
  }
  return clauses;
}

namespace {

// Recursive DPLL over a scratch assignment (0 unset, 1 true, -1 false).
class Solver {
 public:
  explicit Solver(const CnfFormula& formula) : formula_(formula), value_(formula.num_vars + 1, 0) {}

  bool solve(const std::vector<Lit>& assumptions) {
    for (Lit lit : assumptions) {
      int var = std::abs(lit);
      int8_t want = lit > 0 ? 1 : -1;
      if (var >= static_cast<int>(value_.size())) value_.resize(var + 1, 0);
      if (value_[var] == -want) return false;
      value_[var] = want;
    }
    return search();
  }

 private:
  bool search() {
    // Unit propagation to fixpoint.
    std::vector<std::pair<int, int8_t>> trail;
    while (true) {
      bool changed = false;
      for (const Clause& clause : formula_.clauses) {
        int unassigned = 0;
        Lit unit = 0;
        bool satisfied = false;
        for (Lit lit : clause) {
          int8_t v = value_[std::abs(lit)];
          if (v == 0) {
            unassigned++;
            unit = lit;
          } else if ((v > 0) == (lit > 0)) {
            satisfied = true;
            break;
          }
        }
        if (satisfied) continue;
        if (unassigned == 0) {
          undo(trail);
          return false;
        }
        if (unassigned == 1) {
          int var = std::abs(unit);
          value_[var] = unit > 0 ? 1 : -1;
          trail.emplace_back(var, value_[var]);
          changed = true;
        }
      }
      if (!changed) break;
    }

    int branch = 0;
    for (const Clause& clause : formula_.clauses) {
      bool satisfied = false;
      int candidate = 0;
      for (Lit lit : clause) {
        int8_t v = value_[std::abs(lit)];
        if (v == 0)
          candidate = std::abs(lit);
        else if ((v > 0) == (lit > 0)) {
          satisfied = true;
          break;
        }
      }
      if (!satisfied && candidate != 0) {
        branch = candidate;
        break;
      }
    }
    if (branch == 0) {
      undo(trail);
      return true;  // every clause satisfied
    }

    for (int8_t v : {int8_t(1), int8_t(-1)}) {
      value_[branch] = v;
      if (search()) {
        value_[branch] = 0;
        undo(trail);
        return true;
      }
    }
    value_[branch] = 0;
    undo(trail);
    return false;
  }

  void undo(std::vector<std::pair<int, int8_t>>& trail) {
    for (auto& [var, _] : trail) value_[var] = 0;
    trail.clear();
  }

  const CnfFormula& formula_;
  std::vector<int8_t> value_;
};

void check_cap(const std::vector<int>& projection, uint64_t cap) {
  if (projection.size() >= 63 || (uint64_t(1) << projection.size()) > cap)
    throw CapExceeded("projection space 2^" + std::to_string(projection.size()) +
                      " exceeds the enumeration cap");
}

// Counts projected models under a partial projection assignment; the
// recursion prunes any branch whose partial assignment is already
// unsatisfiable.
BigInt count_rec(const CnfFormula& formula, const std::vector<int>& projection, size_t depth,
                 std::vector<Lit>& assumptions) {
  if (!sat(formula, assumptions)) return 0;
  if (depth == projection.size()) return 1;
  BigInt total = 0;
  for (bool bit : {false, true}) {
    assumptions.push_back(bit ? projection[depth] : -projection[depth]);
    total += count_rec(formula, projection, depth + 1, assumptions);
    assumptions.pop_back();
  }
  return total;
}

}  // namespace

bool sat(const CnfFormula& formula, const std::vector<Lit>& assumptions) {
  Solver solver(formula);
  return solver.solve(assumptions);
}

BigInt projected_count(const CnfFormula& formula, const std::vector<int>& projection,
                       uint64_t candidate_cap) {
  check_cap(projection, candidate_cap);
  std::vector<Lit> assumptions;
  return count_rec(formula, projection, 0, assumptions);
}

std::optional<std::vector<bool>> projected_sample(const CnfFormula& formula,
                                                  const std::vector<int>& projection, Rng& rng,
                                                  uint64_t candidate_cap) {
  check_cap(projection, candidate_cap);
  std::vector<Lit> assumptions;
  BigInt total = count_rec(formula, projection, 0, assumptions);
  if (total == 0) return std::nullopt;
  BigInt index = uniform_below(rng, total);

  std::vector<bool> bits;
  bits.reserve(projection.size());
  for (size_t depth = 0; depth < projection.size(); depth++) {
    assumptions.push_back(-projection[depth]);
    BigInt zero_side = count_rec(formula, projection, depth + 1, assumptions);
    if (index < zero_side) {
      bits.push_back(false);
    } else {
      index -= zero_side;
      assumptions.back() = projection[depth];
      bits.push_back(true);
    }
  }
  return bits;
}

namespace {

void models_rec(const CnfFormula& formula, const std::vector<int>& projection, size_t depth,
                std::vector<Lit>& assumptions, std::vector<bool>& bits,
                std::vector<std::vector<bool>>& out) {
  if (!sat(formula, assumptions)) return;
  if (depth == projection.size()) {
    out.push_back(bits);
    return;
  }
  for (bool bit : {false, true}) {
    assumptions.push_back(bit ? projection[depth] : -projection[depth]);
    bits.push_back(bit);
    models_rec(formula, projection, depth + 1, assumptions, bits, out);
    bits.pop_back();
    assumptions.pop_back();
  }
}

}  // namespace

std::vector<std::vector<bool>> projected_models(const CnfFormula& formula,
                                                const std::vector<int>& projection,
                                                uint64_t candidate_cap) {
  check_cap(projection, candidate_cap);
  std::vector<Lit> assumptions;
  std::vector<bool> bits;
  std::vector<std::vector<bool>> out;
  models_rec(formula, projection, 0, assumptions, bits, out);
  return out;
}

}  // namespace improv
