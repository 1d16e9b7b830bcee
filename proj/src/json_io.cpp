#include "improv/json_io.hpp"

#include <filesystem>
#include <fstream>

namespace improv {

Json dfa_to_json(const Dfa& dfa) {
  Json j;
  j["alphabet"] = dfa.alphabet;
  j["states"] = dfa.num_states;
  j["initial"] = dfa.initial;
  Json accepting = Json::array();
  for (uint32_t q = 0; q < dfa.num_states; q++)
    if (dfa.accepting[q]) accepting.push_back(q);
  j["accepting"] = accepting;
  Json rows = Json::array();
  for (uint32_t q = 0; q < dfa.num_states; q++) {
    Json row = Json::array();
    for (size_t a = 0; a < dfa.alphabet.size(); a++) row.push_back(dfa.step(q, a));
    rows.push_back(row);
  }
  j["transitions"] = rows;
  return j;
}

Dfa dfa_from_json(const Json& j) {
  Dfa dfa;
  dfa.alphabet = j.at("alphabet").get<std::vector<std::string>>();
  dfa.num_states = j.at("states").get<uint32_t>();
  dfa.initial = j.at("initial").get<uint32_t>();
  dfa.accepting.assign(dfa.num_states, 0);
  for (const auto& q : j.at("accepting")) {
    uint32_t s = q.get<uint32_t>();
    if (s >= dfa.num_states) throw std::invalid_argument("accepting state out of range");
    dfa.accepting[s] = 1;
  }
  const auto& rows = j.at("transitions");
  if (rows.size() != dfa.num_states) throw std::invalid_argument("partial transition table");
  for (const auto& row : rows) {
    if (row.size() != dfa.alphabet.size()) throw std::invalid_argument("partial transition table");
    for (const auto& target : row) dfa.transitions.push_back(target.get<uint32_t>());
  }
  dfa.validate();
  return dfa;
}

Json rational_to_json(const Rational& r) {
  Json j;
  j["num"] = numerator(r).str();
  j["den"] = denominator(r).str();
  j["approx"] = to_double(r);
  return j;
}

namespace {

Rational rational_from_json(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long long>());
  throw std::invalid_argument("rationals must be strings like \"3/10\"");
}

std::string rational_field(const Rational& r) { return rational_to_string(r); }

}  // namespace

Json bundle_to_json(const DfaInstanceBundle& bundle) {
  Json j;
  j["kind"] = "dfa";
  j["hard"] = dfa_to_json(bundle.hard);
  Json label = dfa_to_json(bundle.label.dfa);
  label["outputs"] = bundle.label.outputs;
  j["label"] = label;
  Json cost;
  if (const auto* so = std::get_if<StateOutputDfa>(&bundle.cost)) {
    cost = dfa_to_json(so->dfa);
    cost["kind"] = "output";
    cost["outputs"] = so->outputs;
  } else {
    const auto& w = std::get<WeightedDfa>(bundle.cost);
    cost = dfa_to_json(w.dfa);
    cost["kind"] = "accumulated";
    cost["weights"] = w.weights;
  }
  j["cost"] = cost;
  j["m"] = bundle.instance.min_length;
  j["n"] = bundle.instance.max_length;
  j["c"] = rational_field(bundle.instance.cost_bound);
  j["lambda"] = rational_field(bundle.instance.label_lower);
  j["rho"] = rational_field(bundle.instance.label_upper);
  Json alpha = Json::array(), beta = Json::array();
  for (const Rational& a : bundle.instance.word_lower) alpha.push_back(rational_field(a));
  for (const Rational& b : bundle.instance.word_upper) beta.push_back(rational_field(b));
  j["alpha"] = alpha;
  j["beta"] = beta;
  return j;
}

DfaInstanceBundle bundle_from_json(const Json& j) {
  DfaInstanceBundle bundle;
  bundle.hard = dfa_from_json(j.at("hard"));
  bundle.label.dfa = dfa_from_json(j.at("label"));
  bundle.label.outputs = j.at("label").at("outputs").get<std::vector<int64_t>>();
  bundle.label.validate();
  const Json& cost = j.at("cost");
  const std::string kind = cost.at("kind").get<std::string>();
  if (kind == "output") {
    StateOutputDfa so;
    so.dfa = dfa_from_json(cost);
    so.outputs = cost.at("outputs").get<std::vector<int64_t>>();
    so.validate();
    bundle.cost = std::move(so);
  } else if (kind == "accumulated") {
    WeightedDfa w;
    w.dfa = dfa_from_json(cost);
    w.weights = cost.at("weights").get<std::vector<int64_t>>();
    w.validate();
    bundle.cost = std::move(w);
  } else {
    throw std::invalid_argument("cost kind must be \"output\" or \"accumulated\"");
  }

  bundle.instance.alphabet = bundle.hard.alphabet;
  bundle.instance.min_length = j.at("m").get<uint32_t>();
  bundle.instance.max_length = j.at("n").get<uint32_t>();
  bundle.instance.cost_bound = rational_from_json(j.at("c"));
  bundle.instance.label_lower = rational_from_json(j.at("lambda"));
  bundle.instance.label_upper = rational_from_json(j.at("rho"));
  for (const auto& a : j.at("alpha")) bundle.instance.word_lower.push_back(rational_from_json(a));
  for (const auto& b : j.at("beta")) bundle.instance.word_upper.push_back(rational_from_json(b));
  bundle.validate();
  return bundle;
}

Json distribution_to_json(const ImprovisingDistributionSpec& spec) {
  Json j;
  Json costs = Json::array();
  for (const Rational& c : spec.costs) costs.push_back(rational_to_json(c));
  j["costs"] = costs;
  j["labels"] = Json::array();
  for (size_t i = 0; i < spec.labels.size(); i++) {
    const LabelClassDist& dist = spec.labels[i];
    Json row;
    row["label"] = spec.label_values[i];
    row["marginal"] = rational_to_json(dist.marginal);
    row["expected_cost"] = rational_to_json(dist.expected_cost);
    Json probs = Json::array();
    for (const Rational& p : dist.class_probs) probs.push_back(rational_to_json(p));
    row["class_probs"] = probs;
    if (dist.excluded) row["excluded"] = true;
    j["labels"].push_back(row);
  }
  j["expected_cost"] = rational_to_json(spec.overall_expected_cost);
  return j;
}

std::string canonical_dump(const Json& j) { return j.dump(2) + "\n"; }

Json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return Json::parse(in);
}

LoadedInstance load_instance_file(const std::string& path) {
  Json j = parse_json_file(path);
  const std::string kind = j.value("kind", std::string("dfa"));
  if (kind == "dfa") return bundle_from_json(j);
  if (kind != "cnf") throw std::invalid_argument("instance kind must be \"dfa\" or \"cnf\"");

  CnfInstance instance;
  std::filesystem::path base = std::filesystem::path(path).parent_path();
  std::string cnf_path = (base / j.at("cnf").get<std::string>()).string();
  instance.spec = parse_cnf_spec_file(cnf_path);
  instance.bounds.cost_bound = rational_from_json(j.at("c"));
  instance.bounds.label_lower = rational_from_json(j.at("lambda"));
  instance.bounds.label_upper = rational_from_json(j.at("rho"));
  for (const auto& a : j.at("alpha")) instance.bounds.word_lower.push_back(rational_from_json(a));
  for (const auto& b : j.at("beta")) instance.bounds.word_upper.push_back(rational_from_json(b));
  if (instance.bounds.word_lower.size() != instance.spec.label_count ||
      instance.bounds.word_upper.size() != instance.spec.label_count)
    throw std::invalid_argument("alpha/beta arrays must match the label count");
  return instance;
}

}  // namespace improv
