#include "improv/approx.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <sstream>

namespace improv {

BigInt ExactEnumerationOracle::count(const CnfFormula& formula, const std::vector<int>& projection,
                                     const Rational&, const Rational&) {
  return projected_count(formula, projection, cap_);
}

std::vector<bool> ExactEnumerationOracle::sample(const CnfFormula& formula,
                                                 const std::vector<int>& projection,
                                                 const Rational&, Rng& rng) {
  auto bits = projected_sample(formula, projection, rng, cap_);
  if (!bits) throw OracleError("sample requested from an unsatisfiable formula");
  return *bits;
}

namespace {

// Runs `sh -c command`, feeding `input` on stdin and returning stdout.
std::string run_subprocess(const std::string& command, const std::string& input) {
  int in_pipe[2], out_pipe[2];
  if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0) throw OracleError("pipe() failed");

  pid_t pid = fork();
  if (pid < 0) throw OracleError("fork() failed");
  if (pid == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }

  close(in_pipe[0]);
  close(out_pipe[1]);
  size_t written = 0;
  while (written < input.size()) {
    ssize_t n = write(in_pipe[1], input.data() + written, input.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      break;
    }
    written += static_cast<size_t>(n);
  }
  close(in_pipe[1]);

  std::string output;
  char buf[4096];
  while (true) {
    ssize_t n = read(out_pipe[0], buf, sizeof(buf));
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    output.append(buf, static_cast<size_t>(n));
  }
  close(out_pipe[0]);

  int status = 0;
  waitpid(pid, &status, 0);
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
    throw OracleError("oracle subprocess failed: " + command);
  return output;
}

}  // namespace

std::string ExecOracle::run(const std::string& args, const std::string& input) const {
  return run_subprocess(command_ + " " + args, input);
}

BigInt ExecOracle::count(const CnfFormula& formula, const std::vector<int>& projection,
                         const Rational& tau, const Rational& confidence) {
  std::ostringstream args;
  args << "--mode count --tau " << rational_to_string(tau) << " --confidence "
       << rational_to_string(confidence);
  std::istringstream reply(run(args.str(), to_dimacs(formula, projection)));
  std::string token;
  if (!(reply >> token)) throw OracleError("oracle returned no count");
  try {
    return BigInt(token);
  } catch (const std::exception&) {
    throw OracleError("oracle returned a malformed count: " + token);
  }
}

std::vector<bool> ExecOracle::sample(const CnfFormula& formula, const std::vector<int>& projection,
                                     const Rational& epsilon, Rng& rng) {
  std::ostringstream args;
  args << "--mode sample --epsilon " << rational_to_string(epsilon) << " --seed " << rng();
  std::istringstream reply(run(args.str(), to_dimacs(formula, projection)));
  // Response: DIMACS-style literals of the projection vars, e.g. "1 -2 3 0".
  std::vector<bool> bits(projection.size());
  std::vector<bool> seen(projection.size(), false);
  Lit lit;
  while (reply >> lit) {
    if (lit == 0) break;
    for (size_t i = 0; i < projection.size(); i++)
      if (std::abs(lit) == projection[i]) {
        bits[i] = lit > 0;
        seen[i] = true;
      }
  }
  if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }))
    throw OracleError("oracle sample did not cover every projection variable");
  return bits;
}

BucketPlan BucketPlan::make(const Rational& ratio, size_t cost_bits) {
  if (ratio <= 1) throw std::invalid_argument("bucket ratio must exceed 1");
  if (cost_bits == 0) throw std::invalid_argument("no cost bits");
  BucketPlan plan;
  plan.ratio = ratio;
  plan.cost_bits = cost_bits;
  // b = ceil(log_r(2^|y|)): smallest b with r^b >= 2^|y|.
  const BigInt limit = BigInt(1) << cost_bits;
  Rational power = 1;
  while (power < limit) {
    power *= ratio;
    plan.bucket_count++;
  }
  return plan;
}

std::pair<BigInt, BigInt> BucketPlan::bucket_range(size_t k) const {
  if (k == 0 || k > bucket_count) throw std::out_of_range("bucket index");
  auto ceil_of = [](const Rational& r) { return -rational_floor(-r); };
  BigInt lo = ceil_of(rational_pow(ratio, long(k) - 1));
  BigInt hi = ceil_of(rational_pow(ratio, long(k))) - 1;
  // Clip to the encodable range; lo > hi marks a bucket with no costs.
  const BigInt max_encodable = (BigInt(1) << cost_bits) - 1;
  hi = std::min(hi, max_encodable);
  return {lo, hi};
}

Rational ApproxParams::tau() const {
  if (gamma < 0) throw std::invalid_argument("gamma must be nonnegative");
  if (gamma == 0) return 0;  // exact-oracle regime
  Rational root = rational_root_floor(1 + gamma, 3);
  return root - 1;
}

Rational ApproxParams::per_count_confidence(size_t total_counts) const {
  if (delta < 0 || delta >= 1) throw std::invalid_argument("need 0 <= delta < 1");
  if (delta == 0 || total_counts <= 1) return 1 - delta;
  const Rational target = 1 - delta;
  Rational root = rational_root_floor(target, static_cast<unsigned>(total_counts));
  if (rational_pow(root, long(total_counts)) < target)
    root += Rational(BigInt(1), BigInt(1) << 48);  // round the root up
  return std::min(root, Rational(1));
}

CnfFormula build_phi(const CnfSpec& spec, size_t label_index) {
  if (label_index >= spec.label_count) throw std::out_of_range("label index");
  CnfFormula phi;
  phi.num_vars = spec.num_vars();
  phi.append(spec.hard);
  phi.append(spec.label);
  phi.append(spec.cost);
  for (Clause& c : pin_value_clauses(spec.groups.label_bits, label_index)) phi.add_clause(std::move(c));
  return phi;
}

std::optional<BucketEstimates> approximate_greedy_cost(const CnfSpec& spec, size_t label_index,
                                                       const Rational& alpha, const Rational& beta,
                                                       const BucketPlan& plan, const Rational& tau,
                                                       const Rational& confidence,
                                                       CounterOracle& counter) {
  const CnfFormula phi = build_phi(spec, label_index);
  const size_t b = plan.bucket_count;

  BucketEstimates est;
  est.counts.resize(b);
  est.probs.resize(b);

  for (size_t k = 1; k <= b; k++) {
    auto [lo, hi] = plan.bucket_range(k);
    CnfFormula bucket = phi;
    if (lo > hi) {
      est.counts[k - 1] = 0;  // bucket entirely above the encodable range
      est.probs[k - 1] = 0;
      continue;
    }
    for (Clause& c : cost_interval_clauses(spec.groups.y, lo, hi)) bucket.add_clause(std::move(c));
    est.counts[k - 1] = counter.count(bucket, spec.groups.x, tau, confidence);
    if (est.counts[k - 1] < 0) throw OracleError("negative count from oracle");
    est.probs[k - 1] = alpha * Rational(est.counts[k - 1]) / (1 + tau);
  }

  Rational sum = 0;
  for (const Rational& p : est.probs) sum += p;
  if (sum > 1) return std::nullopt;  // too many improvisations for alpha

  for (size_t k = 0; k < b; k++) {
    Rational others = sum - est.probs[k];
    est.probs[k] = std::min(Rational((1 + tau) * beta * Rational(est.counts[k])), Rational(1 - others));
    sum = others + est.probs[k];
    if (sum == 1) break;
  }
  if (sum < 1) return std::nullopt;  // too few improvisations for beta

  est.lower_bound = 0;
  for (size_t k = 0; k < b; k++)
    est.lower_bound += est.probs[k] * plan.representative_low(k + 1);
  return est;
}

ApproxImproviser::ApproxImproviser(CnfSpec spec, BucketPlan plan,
                                   std::vector<Rational> label_marginal,
                                   std::vector<BucketEstimates> per_label, Rational epsilon,
                                   GeneratorOracle& generator)
    : spec_(std::move(spec)),
      plan_(std::move(plan)),
      label_marginal_(std::move(label_marginal)),
      per_label_(std::move(per_label)),
      epsilon_(std::move(epsilon)),
      generator_(generator) {
  label_draw_ = BigCategorical(std::span<const Rational>(label_marginal_));
  bucket_draw_.reserve(per_label_.size());
  for (const BucketEstimates& est : per_label_)
    bucket_draw_.emplace_back(std::span<const Rational>(est.probs));
}

CnfFormula ApproxImproviser::bucket_formula(size_t label_index, size_t bucket) const {
  CnfFormula f = build_phi(spec_, label_index);
  auto [lo, hi] = plan_.bucket_range(bucket);
  for (Clause& c : cost_interval_clauses(spec_.groups.y, lo, hi)) f.add_clause(std::move(c));
  return f;
}

ApproxImproviser::Draw ApproxImproviser::sample_info(Rng& rng) {
  Draw draw;
  draw.label_index = label_draw_.pick(rng);
  draw.bucket = bucket_draw_[draw.label_index].pick(rng) + 1;
  std::vector<bool> bits =
      generator_.sample(bucket_formula(draw.label_index, draw.bucket), spec_.groups.x, epsilon_, rng);
  draw.word.reserve(bits.size());
  for (bool b : bits) draw.word.push_back(b ? '1' : '0');
  return draw;
}

std::string ApproxImproviser::sample(Rng& rng) { return sample_info(rng).word; }

Rational ApproxImproviser::certified_cost_lower_bound() const {
  Rational low = 0;
  for (size_t i = 0; i < label_marginal_.size(); i++)
    low += label_marginal_[i] * per_label_[i].lower_bound;
  return low;
}

std::map<std::string, Rational> ApproxImproviser::exact_word_distribution(
    uint64_t candidate_cap) const {
  std::map<std::string, Rational> dist;
  for (size_t i = 0; i < label_marginal_.size(); i++) {
    if (label_marginal_[i] == 0) continue;
    for (size_t k = 1; k <= plan_.bucket_count; k++) {
      const Rational& pk = per_label_[i].probs[k - 1];
      if (pk == 0) continue;
      auto models = projected_models(bucket_formula(i, k), spec_.groups.x, candidate_cap);
      if (models.empty()) throw std::logic_error("positive bucket probability with no words");
      const Rational per_word = label_marginal_[i] * pk / Rational(long(models.size()));
      for (const auto& bits : models) {
        std::string word;
        word.reserve(bits.size());
        for (bool b : bits) word.push_back(b ? '1' : '0');
        dist[word] += per_word;
      }
    }
  }
  return dist;
}

std::optional<ApproxImproviser> build_approx_improviser(const CnfSpec& spec,
                                                        const CnfInstanceBounds& bounds,
                                                        const ApproxParams& params,
                                                        CounterOracle& counter,
                                                        GeneratorOracle& generator) {
  spec.validate();
  if (bounds.word_lower.size() != spec.label_count || bounds.word_upper.size() != spec.label_count)
    throw std::invalid_argument("per-label bounds do not match the label count");

  const BucketPlan plan = BucketPlan::make(params.ratio(), spec.groups.y.size());
  const Rational tau = params.tau();
  const Rational confidence = params.per_count_confidence(spec.label_count * plan.bucket_count);

  std::vector<BucketEstimates> per_label;
  per_label.reserve(spec.label_count);
  for (size_t i = 0; i < spec.label_count; i++) {
    auto est = approximate_greedy_cost(spec, i, bounds.word_lower[i], bounds.word_upper[i], plan,
                                       tau, confidence, counter);
    if (!est) return std::nullopt;
    per_label.push_back(std::move(*est));
  }

  std::vector<Rational> lows;
  lows.reserve(spec.label_count);
  for (const BucketEstimates& est : per_label) lows.push_back(est.lower_bound);
  auto marginal = greedy_label_construction(lows, bounds.label_lower, bounds.label_upper);
  if (std::holds_alternative<LabelError>(marginal)) return std::nullopt;
  auto& label_marginal = std::get<std::vector<Rational>>(marginal);

  Rational low = 0;
  for (size_t i = 0; i < spec.label_count; i++) low += label_marginal[i] * per_label[i].lower_bound;
  if (low > bounds.cost_bound) return std::nullopt;

  return ApproxImproviser(spec, plan, std::move(label_marginal), std::move(per_label),
                          params.epsilon(), generator);
}

}  // namespace improv
