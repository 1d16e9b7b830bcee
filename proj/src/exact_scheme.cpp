#include "improv/exact_scheme.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <numeric>
#include <set>
#include <thread>

namespace improv {

namespace {

std::vector<uint8_t> reachable_mask(const Dfa& dfa) {
  std::vector<uint8_t> seen(dfa.num_states, 0);
  std::vector<uint32_t> stack{dfa.initial};
  seen[dfa.initial] = 1;
  while (!stack.empty()) {
    uint32_t q = stack.back();
    stack.pop_back();
    for (size_t a = 0; a < dfa.alphabet.size(); a++) {
      uint32_t t = dfa.step(q, static_cast<uint32_t>(a));
      if (!seen[t]) {
        seen[t] = 1;
        stack.push_back(t);
      }
    }
  }
  return seen;
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("IMPROV_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return 1;
}

}  // namespace

void DfaInstanceBundle::validate() const {
  instance.validate();
  hard.validate();
  label.validate();
  if (hard.alphabet != instance.alphabet || label.dfa.alphabet != instance.alphabet)
    throw AlphabetMismatch();
  std::visit([&](const auto& c) {
    c.validate();
    if (c.dfa.alphabet != instance.alphabet) throw AlphabetMismatch();
  }, cost);
  if (instance.label_count() != label_set(label).size())
    throw std::invalid_argument("per-label bounds do not match the label DFA's output set");
}

std::vector<int64_t> label_set(const StateOutputDfa& label) {
  auto seen = reachable_mask(label.dfa);
  std::set<int64_t> values;
  for (uint32_t q = 0; q < label.dfa.num_states; q++)
    if (seen[q] && label.dfa.accepting[q]) values.insert(label.outputs[q]);
  return std::vector<int64_t>(values.begin(), values.end());
}

CostClassTableBuild build_cost_class_table(const Dfa& hard, const StateOutputDfa& label,
                                           const CostSpec& cost, uint32_t m, uint32_t n,
                                           int64_t weighted_budget, unsigned threads) {
  CostClassTableBuild out;
  out.table.label_values = label_set(label);
  const size_t n_labels = out.table.label_values.size();
  if (n_labels == 0) throw std::invalid_argument("label DFA has no reachable accepting output");

  // Candidate cost axis.
  std::vector<int64_t> theta;
  if (const auto* so = std::get_if<StateOutputDfa>(&cost)) {
    auto seen = reachable_mask(so->dfa);
    std::set<int64_t> values;
    for (uint32_t q = 0; q < so->dfa.num_states; q++)
      if (seen[q] && so->dfa.accepting[q]) values.insert(so->outputs[q]);
    theta.assign(values.begin(), values.end());
  } else {
    const auto& weighted = std::get<WeightedDfa>(cost);
    int64_t expansion = weighted.max_weight() * (static_cast<int64_t>(n) + 1);
    if (expansion > weighted_budget)
      throw BudgetExceeded("accumulated-cost expansion M*(n+1) = " + std::to_string(expansion) +
                           " exceeds budget " + std::to_string(weighted_budget));
    theta = possible_costs(weighted, hard, m, n);
  }

  // One product DFA + count table per (label, cost) class, in parallel.
  const size_t n_classes = n_labels * theta.size();
  std::vector<ClassSampler> samplers(n_classes);
  std::vector<BigInt> class_sizes(n_classes);
  std::vector<Dfa> label_restricted;
  label_restricted.reserve(n_labels);
  for (int64_t v : out.table.label_values) label_restricted.push_back(restrict_output(label, v));

  auto build_class = [&](size_t idx) {
    const size_t i = idx / theta.size();
    const size_t k = idx % theta.size();
    Dfa class_dfa;
    if (const auto* so = std::get_if<StateOutputDfa>(&cost)) {
      class_dfa = product(product(hard, label_restricted[i]), restrict_output(*so, theta[k]));
    } else {
      class_dfa = product(product(hard, label_restricted[i]),
                          cost_tracking_dfa(std::get<WeightedDfa>(cost), theta[k]));
    }
    CountTable table(class_dfa, n);
    BigInt size = 0;
    for (uint32_t len = m; len <= n; len++) size += table.words_of_length(len);
    class_sizes[idx] = std::move(size);
    samplers[idx] = ClassSampler{std::move(class_dfa), std::move(table)};
  };

  const unsigned n_threads = std::min<unsigned>(resolve_threads(threads),
                                                std::max<size_t>(n_classes, 1));
  if (n_threads <= 1 || n_classes <= 1) {
    for (size_t idx = 0; idx < n_classes; idx++) build_class(idx);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n_threads; t++)
      pool.emplace_back([&] {
        for (size_t idx = next.fetch_add(1); idx < n_classes; idx = next.fetch_add(1))
          build_class(idx);
      });
    for (auto& th : pool) th.join();
  }

  // Keep only cost columns that some label realizes.
  std::vector<size_t> kept;
  for (size_t k = 0; k < theta.size(); k++) {
    BigInt col = 0;
    for (size_t i = 0; i < n_labels; i++) col += class_sizes[i * theta.size() + k];
    if (col > 0) kept.push_back(k);
  }

  out.table.costs.reserve(kept.size());
  for (size_t k : kept) out.table.costs.push_back(Rational(theta[k]));
  out.table.sizes.assign(n_labels, {});
  out.table.sampler_keys.assign(n_labels, {});
  for (size_t i = 0; i < n_labels; i++) {
    for (size_t k : kept) {
      const size_t idx = i * theta.size() + k;
      out.table.sizes[i].push_back(class_sizes[idx]);
      if (class_sizes[idx] > 0) {
        out.samplers.push_back(std::move(samplers[idx]));
        out.table.sampler_keys[i].push_back(static_cast<int>(out.samplers.size() - 1));
      } else {
        out.table.sampler_keys[i].push_back(-1);
      }
    }
  }

  // The classes must partition the hard-satisfying words; a leak means the
  // label or cost spec does not define a total function over improvisations.
  BigInt hard_total = 0;
  for (const BigInt& c : count_words(hard, m, n)) hard_total += c;
  out.hard_word_count = hard_total;
  if (out.table.grand_total() != hard_total)
    throw std::invalid_argument("label/cost classes do not partition the hard language (" +
                                out.table.grand_total().str() + " classified vs " +
                                hard_total.str() + " words)");
  return out;
}

Improviser::Improviser(LqciInstance instance, ImprovisingDistributionSpec spec,
                       CostClassTableBuild build)
    : instance_(std::move(instance)), spec_(std::move(spec)), build_(std::move(build)) {
  std::vector<Rational> probs;
  for (size_t i = 0; i < spec_.labels.size(); i++) {
    for (size_t k = 0; k < spec_.costs.size(); k++) {
      Rational p = spec_.joint(i, k);
      if (p == 0) continue;
      if (build_.table.sampler_keys[i][k] < 0)
        throw std::logic_error("positive probability on an empty class");
      choices_.emplace_back(i, k);
      probs.push_back(std::move(p));
    }
  }
  if (choices_.empty()) throw std::logic_error("distribution has no support");
  categorical_ = BigCategorical(std::span<const Rational>(probs));
}

Improviser::Draw Improviser::sample_info(Rng& rng) const {
  const auto [i, k] = choices_[categorical_.pick(rng)];
  const ClassSampler& sampler = build_.samplers[build_.table.sampler_keys[i][k]];
  Word word =
      sample_uniform(sampler.dfa, instance_.min_length, instance_.max_length, sampler.table, rng);
  return Draw{std::move(word), i, k};
}

std::map<std::string, Rational> Improviser::exact_word_distribution(size_t cap) const {
  BigInt support = 0;
  for (const auto& [i, k] : choices_) support += build_.table.sizes[i][k];
  if (support > cap) throw TooManyWords("instance has " + support.str() + " words, cap " +
                                        std::to_string(cap));

  std::map<std::string, Rational> dist;
  for (const auto& [i, k] : choices_) {
    const ClassSampler& sampler = build_.samplers[build_.table.sampler_keys[i][k]];
    const Rational per_word = spec_.joint(i, k) / Rational(build_.table.sizes[i][k]);
    for (const Word& w :
         enumerate_words(sampler.dfa, instance_.min_length, instance_.max_length, cap))
      dist[render_word(sampler.dfa, w)] += per_word;
  }
  return dist;
}

std::variant<Improviser, FeasibilityReport> build_improviser(const DfaInstanceBundle& bundle,
                                                             int64_t weighted_budget,
                                                             unsigned threads) {
  bundle.validate();
  CostClassTableBuild build = build_cost_class_table(bundle.hard, bundle.label, bundle.cost,
                                                     bundle.instance.min_length,
                                                     bundle.instance.max_length, weighted_budget,
                                                     threads);
  FeasibilityReport report = feasibility_check(bundle.instance, build.table);
  if (!report.feasible) return report;
  return Improviser(bundle.instance, std::move(*report.distribution), std::move(build));
}

Improviser bind_improviser(const DfaInstanceBundle& bundle, ImprovisingDistributionSpec spec,
                           CostClassTableBuild build) {
  return Improviser(bundle.instance, std::move(spec), std::move(build));
}

int64_t eval_label(const StateOutputDfa& label, std::span<const uint32_t> word) {
  return label.outputs[label.dfa.run(word)];
}

Rational eval_cost(const CostSpec& cost, std::span<const uint32_t> word) {
  if (const auto* so = std::get_if<StateOutputDfa>(&cost)) return Rational(so->output_of(word));
  return Rational(std::get<WeightedDfa>(cost).cost_of(word));
}

}  // namespace improv
