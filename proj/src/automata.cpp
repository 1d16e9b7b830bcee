#include "improv/automata.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

namespace improv {

void Dfa::validate() const {
  if (alphabet.empty()) throw std::invalid_argument("empty alphabet");
  if (num_states == 0) throw std::invalid_argument("DFA needs at least one state");
  if (initial >= num_states) throw std::invalid_argument("initial state out of range");
  if (transitions.size() != static_cast<size_t>(num_states) * alphabet.size())
    throw std::invalid_argument("partial transition table");
  if (accepting.size() != num_states) throw std::invalid_argument("accepting flags size mismatch");
  for (uint32_t t : transitions)
    if (t >= num_states) throw std::invalid_argument("transition target out of range");
  std::set<std::string> distinct(alphabet.begin(), alphabet.end());
  if (distinct.size() != alphabet.size()) throw std::invalid_argument("duplicate alphabet symbol");
}

void StateOutputDfa::validate() const {
  dfa.validate();
  if (outputs.size() != dfa.num_states) throw std::invalid_argument("outputs size mismatch");
}

void WeightedDfa::validate() const {
  dfa.validate();
  if (weights.size() != dfa.num_states) throw std::invalid_argument("weights size mismatch");
  for (int64_t w : weights)
    if (w < 0) throw std::invalid_argument("negative state weight");
}

int64_t WeightedDfa::max_weight() const {
  int64_t m = 0;
  for (int64_t w : weights) m = std::max(m, w);
  return m;
}

int64_t WeightedDfa::cost_of(std::span<const uint32_t> word) const {
  uint32_t q = dfa.initial;
  int64_t cost = weights[q];
  for (uint32_t s : word) {
    q = dfa.step(q, s);
    cost += weights[q];
  }
  return cost;
}

CountTable::CountTable(const Dfa& dfa, uint32_t max_len) : max_len_(max_len), initial_(dfa.initial) {
  const size_t Q = dfa.num_states;
  counts_.assign(max_len + 1, std::vector<BigInt>(Q));
  for (size_t q = 0; q < Q; q++) counts_[0][q] = dfa.accepting[q] ? 1 : 0;
  for (uint32_t s = 1; s <= max_len; s++) {
    const auto& prev = counts_[s - 1];
    auto& cur = counts_[s];
    for (size_t q = 0; q < Q; q++) {
      BigInt total = 0;
      for (size_t a = 0; a < dfa.alphabet.size(); a++)
        total += prev[dfa.step(static_cast<uint32_t>(q), static_cast<uint32_t>(a))];
      cur[q] = std::move(total);
    }
  }
}

Dfa product(const Dfa& a, const Dfa& b) {
  if (a.alphabet != b.alphabet) throw AlphabetMismatch();
  const size_t S = a.alphabet.size();

  Dfa out;
  out.alphabet = a.alphabet;

  std::unordered_map<uint64_t, uint32_t> ids;
  std::vector<std::pair<uint32_t, uint32_t>> pairs;
  auto intern = [&](uint32_t qa, uint32_t qb) {
    uint64_t key = (static_cast<uint64_t>(qa) << 32) | qb;
    auto [it, inserted] = ids.emplace(key, static_cast<uint32_t>(pairs.size()));
    if (inserted) pairs.emplace_back(qa, qb);
    return it->second;
  };

  intern(a.initial, b.initial);
  out.initial = 0;
  for (size_t i = 0; i < pairs.size(); i++) {
    auto [qa, qb] = pairs[i];
    for (size_t sym = 0; sym < S; sym++)
      out.transitions.push_back(intern(a.step(qa, static_cast<uint32_t>(sym)),
                                       b.step(qb, static_cast<uint32_t>(sym))));
  }
  out.num_states = static_cast<uint32_t>(pairs.size());
  out.accepting.resize(out.num_states);
  for (size_t i = 0; i < pairs.size(); i++)
    out.accepting[i] = a.accepting[pairs[i].first] && b.accepting[pairs[i].second];
  return out;
}

std::vector<BigInt> count_words(const Dfa& dfa, uint32_t m, uint32_t n) {
  if (m > n) throw std::invalid_argument("count_words: m > n");
  CountTable table(dfa, n);
  std::vector<BigInt> counts;
  counts.reserve(n - m + 1);
  for (uint32_t len = m; len <= n; len++) counts.push_back(table.words_of_length(len));
  return counts;
}

Word sample_uniform(const Dfa& dfa, uint32_t m, uint32_t n, const CountTable& table, Rng& rng) {
  if (m > n || table.max_len() < n) throw std::invalid_argument("sample_uniform: bad length range");
  std::vector<BigInt> per_length;
  per_length.reserve(n - m + 1);
  for (uint32_t len = m; len <= n; len++) per_length.push_back(table.words_of_length(len));
  BigCategorical length_draw{std::span<const BigInt>(per_length)};
  if (length_draw.empty()) throw EmptyLanguage();

  uint32_t len = m + static_cast<uint32_t>(length_draw.pick(rng));
  Word word;
  word.reserve(len);
  uint32_t q = dfa.initial;
  for (uint32_t remaining = len; remaining > 0; remaining--) {
    std::vector<BigInt> weights(dfa.alphabet.size());
    for (size_t a = 0; a < dfa.alphabet.size(); a++)
      weights[a] = table.count(dfa.step(q, static_cast<uint32_t>(a)), remaining - 1);
    BigCategorical sym_draw{std::span<const BigInt>(weights)};
    uint32_t sym = static_cast<uint32_t>(sym_draw.pick(rng));
    word.push_back(sym);
    q = dfa.step(q, sym);
  }
  return word;
}

Dfa restrict_output(const StateOutputDfa& s, int64_t value) {
  Dfa out = s.dfa;
  for (uint32_t q = 0; q < out.num_states; q++)
    out.accepting[q] = out.accepting[q] && s.outputs[q] == value;
  return out;
}

std::vector<int64_t> possible_costs(const WeightedDfa& w, const Dfa& hard, uint32_t m, uint32_t n) {
  if (w.dfa.alphabet != hard.alphabet) throw AlphabetMismatch();
  const size_t S = hard.alphabet.size();

  // Reachable product states (hard, cost).
  std::unordered_map<uint64_t, uint32_t> ids;
  std::vector<std::pair<uint32_t, uint32_t>> pairs;
  auto intern = [&](uint32_t qh, uint32_t qw) {
    uint64_t key = (static_cast<uint64_t>(qh) << 32) | qw;
    auto [it, inserted] = ids.emplace(key, static_cast<uint32_t>(pairs.size()));
    if (inserted) pairs.emplace_back(qh, qw);
    return it->second;
  };
  intern(hard.initial, w.dfa.initial);
  std::vector<uint32_t> delta;
  for (size_t i = 0; i < pairs.size(); i++) {
    auto [qh, qw] = pairs[i];
    for (size_t sym = 0; sym < S; sym++)
      delta.push_back(intern(hard.step(qh, static_cast<uint32_t>(sym)),
                             w.dfa.step(qw, static_cast<uint32_t>(sym))));
  }
  const size_t Q = pairs.size();

  // c(q,0) = {weight(initial)} at the initial product state; then
  // c(q,s) = weight(q) + union of parents' sets.
  std::set<int64_t> theta;
  std::vector<std::set<int64_t>> cur(Q), next(Q);
  cur[0].insert(w.weights[w.dfa.initial]);
  auto collect = [&](const std::vector<std::set<int64_t>>& layer) {
    for (size_t q = 0; q < Q; q++)
      if (hard.accepting[pairs[q].first]) theta.insert(layer[q].begin(), layer[q].end());
  };
  if (m == 0) collect(cur);
  for (uint32_t s = 1; s <= n; s++) {
    for (auto& set : next) set.clear();
    for (size_t q = 0; q < Q; q++) {
      if (cur[q].empty()) continue;
      for (size_t sym = 0; sym < S; sym++) {
        uint32_t t = delta[q * S + sym];
        int64_t wt = w.weights[pairs[t].second];
        for (int64_t c : cur[q]) next[t].insert(c + wt);
      }
    }
    cur.swap(next);
    if (s >= m) collect(cur);
  }
  return std::vector<int64_t>(theta.begin(), theta.end());
}

Dfa cost_tracking_dfa(const WeightedDfa& w, int64_t k) {
  if (k < 0) throw std::invalid_argument("cost_tracking_dfa: negative target cost");
  const size_t S = w.dfa.alphabet.size();
  const int64_t cap = k + 1;  // "more than k" sink level

  std::map<std::pair<uint32_t, int64_t>, uint32_t> ids;
  std::vector<std::pair<uint32_t, int64_t>> states;
  auto intern = [&](uint32_t q, int64_t acc) {
    acc = std::min(acc, cap);
    auto [it, inserted] = ids.emplace(std::make_pair(q, acc), static_cast<uint32_t>(states.size()));
    if (inserted) states.emplace_back(q, acc);
    return it->second;
  };

  Dfa out;
  out.alphabet = w.dfa.alphabet;
  intern(w.dfa.initial, w.weights[w.dfa.initial]);
  out.initial = 0;
  for (size_t i = 0; i < states.size(); i++) {
    auto [q, acc] = states[i];
    for (size_t sym = 0; sym < S; sym++) {
      uint32_t t = w.dfa.step(q, static_cast<uint32_t>(sym));
      out.transitions.push_back(intern(t, acc + w.weights[t]));
    }
  }
  out.num_states = static_cast<uint32_t>(states.size());
  out.accepting.resize(out.num_states);
  for (size_t i = 0; i < states.size(); i++)
    out.accepting[i] = w.dfa.accepting[states[i].first] && states[i].second == k;
  return out;
}

namespace {

void enumerate_rec(const Dfa& dfa, const CountTable& table, uint32_t q, uint32_t remaining,
                   Word& prefix, std::vector<Word>& out, size_t cap) {
  if (remaining == 0) {
    if (dfa.accepting[q]) {
      if (out.size() >= cap) throw std::length_error("word enumeration cap exceeded");
      out.push_back(prefix);
    }
    return;
  }
  for (size_t a = 0; a < dfa.alphabet.size(); a++) {
    uint32_t t = dfa.step(q, static_cast<uint32_t>(a));
    if (table.count(t, remaining - 1) == 0) continue;
    prefix.push_back(static_cast<uint32_t>(a));
    enumerate_rec(dfa, table, t, remaining - 1, prefix, out, cap);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<Word> enumerate_words(const Dfa& dfa, uint32_t m, uint32_t n, size_t cap) {
  CountTable table(dfa, n);
  std::vector<Word> out;
  Word prefix;
  for (uint32_t len = m; len <= n; len++)
    enumerate_rec(dfa, table, dfa.initial, len, prefix, out, cap);
  return out;
}

std::string render_word(const Dfa& dfa, const Word& word) {
  std::string s;
  for (uint32_t sym : word) s += dfa.alphabet[sym];
  return s;
}

Word parse_word(const std::vector<std::string>& alphabet, std::string_view text) {
  // Greedy longest-symbol match; alphabets in this toolkit use single
  // characters, but multi-character symbols parse as long as no symbol is a
  // prefix of another at the same position.
  Word word;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t best = alphabet.size();
    size_t best_len = 0;
    for (size_t a = 0; a < alphabet.size(); a++) {
      const std::string& sym = alphabet[a];
      if (sym.size() > best_len && text.substr(pos, sym.size()) == sym) {
        best = a;
        best_len = sym.size();
      }
    }
    if (best == alphabet.size()) throw std::invalid_argument("unknown symbol in word");
    word.push_back(static_cast<uint32_t>(best));
    pos += best_len;
  }
  return word;
}

}  // namespace improv
