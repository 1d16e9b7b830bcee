#include "improv/approx.hpp"
#include "improv/exact_scheme.hpp"
#include "improv/gridworld.hpp"
#include "improv/json_io.hpp"
#include "improv/maxent.hpp"
#include "improv/stats.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace {

using namespace improv;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

unsigned thread_count(unsigned flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("IMPROV_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return 1;
}

struct SampleOptions {
  std::string instance_path;
  uint64_t count = 0;
  uint64_t seed = 0;
  unsigned threads = 0;
  bool maxent = false;
  double gap = 1e-6;
  bool approx = false;
  std::string zeta = "1", gamma = "1", delta = "1/5";
  std::string oracle = "exact";
  std::string out_path;
};

std::unique_ptr<CounterOracle> make_counter(const std::string& name) {
  if (name == "exact") return std::make_unique<ExactEnumerationOracle>();
  if (name.rfind("exec:", 0) == 0) return std::make_unique<ExecOracle>(name.substr(5));
  throw std::invalid_argument("--oracle must be 'exact' or 'exec:<command>'");
}
std::unique_ptr<GeneratorOracle> make_generator(const std::string& name) {
  if (name == "exact") return std::make_unique<ExactEnumerationOracle>();
  if (name.rfind("exec:", 0) == 0) return std::make_unique<ExecOracle>(name.substr(5));
  throw std::invalid_argument("--oracle must be 'exact' or 'exec:<command>'");
}

ApproxParams approx_params(const SampleOptions& opt) {
  ApproxParams params;
  params.zeta = parse_rational(opt.zeta);
  params.gamma = parse_rational(opt.gamma);
  params.delta = parse_rational(opt.delta);
  return params;
}

int cmd_check(const std::string& path, const SampleOptions& opt) {
  LoadedInstance loaded = load_instance_file(path);
  if (const auto* bundle = std::get_if<DfaInstanceBundle>(&loaded)) {
    CostClassTableBuild build =
        build_cost_class_table(bundle->hard, bundle->label, bundle->cost,
                               bundle->instance.min_length, bundle->instance.max_length);
    FeasibilityReport report = feasibility_check(bundle->instance, build.table);
    if (!report.feasible) {
      std::cout << "infeasible: " << to_string(*report.reason);
      if (report.offending_label)
        std::cout << " (label " << build.table.label_values[*report.offending_label] << ")";
      std::cout << "\n";
      return kExitInfeasible;
    }
    std::cout << "feasible\n";
    std::cout << "expected_cost " << rational_to_string(report.distribution->overall_expected_cost)
              << "\n";
    std::cout << canonical_dump(distribution_to_json(*report.distribution));
    return kExitOk;
  }

  const auto& cnf = std::get<CnfInstance>(loaded);
  auto counter = make_counter(opt.oracle);
  auto generator = make_generator(opt.oracle);
  auto improviser =
      build_approx_improviser(cnf.spec, cnf.bounds, approx_params(opt), *counter, *generator);
  if (!improviser) {
    std::cout << "infeasible (approximate pipeline returned bottom)\n";
    return kExitInfeasible;
  }
  std::cout << "feasible\n";
  std::cout << "certified_cost_lower_bound "
            << rational_to_string(improviser->certified_cost_lower_bound()) << "\n";
  return kExitOk;
}

int cmd_sample(const SampleOptions& opt) {
  std::ostringstream out;
  LoadedInstance loaded = load_instance_file(opt.instance_path);

  if (const auto* bundle = std::get_if<DfaInstanceBundle>(&loaded)) {
    if (opt.approx) throw std::invalid_argument("--approx requires a CNF instance");
    std::optional<Improviser> improviser;
    if (opt.maxent) {
      MaxEntImproviserResult result = build_maxent_improviser(*bundle, opt.gap);
      if (result.status == MaxEntStatus::Infeasible) {
        std::cerr << "infeasible";
        if (result.reason) std::cerr << ": " << to_string(*result.reason);
        std::cerr << "\n";
        return kExitInfeasible;
      }
      if (result.status == MaxEntStatus::NoConvergence)
        throw std::runtime_error("maxent solver missed the gap target");
      improviser = std::move(result.improviser);
    } else {
      auto outcome = build_improviser(*bundle);
      if (auto* report = std::get_if<FeasibilityReport>(&outcome)) {
        std::cerr << "infeasible: " << to_string(*report->reason) << "\n";
        return kExitInfeasible;
      }
      improviser = std::move(std::get<Improviser>(outcome));
    }

    // Worker w owns the stream mix_seed(seed, w) and produces the samples
    // with index = w (mod T); the merged order is deterministic for a fixed
    // thread count.
    const unsigned threads = thread_count(opt.threads);
    std::vector<std::string> words(opt.count);
    auto worker = [&](unsigned w, unsigned total) {
      Rng rng(mix_seed(opt.seed, w));
      for (uint64_t i = w; i < opt.count; i += total)
        words[i] = render_word(bundle->hard, improviser->sample(rng));
    };
    if (threads <= 1) {
      worker(0, 1);
    } else {
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < threads; w++) pool.emplace_back(worker, w, threads);
      for (auto& t : pool) t.join();
    }
    for (const std::string& w : words) out << w << "\n";
  } else {
    if (!opt.approx) throw std::invalid_argument("CNF instances require --approx");
    const auto& cnf = std::get<CnfInstance>(loaded);
    auto counter = make_counter(opt.oracle);
    auto generator = make_generator(opt.oracle);
    auto improviser =
        build_approx_improviser(cnf.spec, cnf.bounds, approx_params(opt), *counter, *generator);
    if (!improviser) {
      std::cerr << "infeasible (approximate pipeline returned bottom)\n";
      return kExitInfeasible;
    }
    Rng rng(mix_seed(opt.seed, 0));
    for (uint64_t i = 0; i < opt.count; i++) out << improviser->sample(rng) << "\n";
  }

  if (opt.out_path.empty()) {
    std::cout << out.str();
  } else {
    std::ofstream f(opt.out_path);
    f << out.str();
  }
  return kExitOk;
}

int cmd_stats(const SampleOptions& opt, uint64_t trace_count) {
  LoadedInstance loaded = load_instance_file(opt.instance_path);
  const auto* bundle = std::get_if<DfaInstanceBundle>(&loaded);
  if (!bundle) throw std::invalid_argument("stats supports DFA instances");

  std::optional<Improviser> improviser;
  if (opt.maxent) {
    MaxEntImproviserResult result = build_maxent_improviser(*bundle, opt.gap);
    if (result.status == MaxEntStatus::Infeasible) {
      std::cerr << "infeasible\n";
      return kExitInfeasible;
    }
    if (result.status == MaxEntStatus::NoConvergence)
      throw std::runtime_error("maxent solver missed the gap target");
    improviser = std::move(result.improviser);
  } else {
    auto outcome = build_improviser(*bundle);
    if (auto* report = std::get_if<FeasibilityReport>(&outcome)) {
      std::cerr << "infeasible: " << to_string(*report->reason) << "\n";
      return kExitInfeasible;
    }
    improviser = std::move(std::get<Improviser>(outcome));
  }

  Rng rng(mix_seed(opt.seed, 0));
  std::vector<SampleRecord> records;
  std::vector<std::string> traces;
  records.reserve(opt.count);
  for (uint64_t i = 0; i < opt.count; i++) {
    auto draw = improviser->sample_info(rng);
    records.push_back({draw.label_index, improviser->table().costs[draw.cost_index]});
    if (traces.size() < trace_count) traces.push_back(render_word(bundle->hard, draw.word));
  }
  EmpiricalReport report =
      build_report(improviser->table().label_values, records, bundle->instance.label_lower,
                   bundle->instance.label_upper, bundle->instance.cost_bound, std::move(traces));
  std::cout << report_to_json(report);
  return kExitOk;
}

int cmd_grid_encode(const std::string& map_path, uint32_t m, uint32_t n, const std::string& c,
                    const std::string& lambda, const std::string& rho, const std::string& alpha,
                    const std::string& beta, const std::string& out_path) {
  std::ifstream in(map_path);
  if (!in) throw std::runtime_error("cannot open " + map_path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  GridMap map = parse_map(buffer.str());
  GridEncoding enc = encode(map);

  DfaInstanceBundle bundle;
  bundle.hard = enc.hard;
  bundle.label = enc.label;
  bundle.cost = enc.cost;
  bundle.instance.alphabet = enc.hard.alphabet;
  bundle.instance.min_length = m;
  bundle.instance.max_length = n;
  bundle.instance.cost_bound = parse_rational(c);
  bundle.instance.label_lower = parse_rational(lambda);
  bundle.instance.label_upper = parse_rational(rho);
  const size_t labels = label_set(enc.label).size();
  auto parse_list = [&](const std::string& text) {
    std::vector<Rational> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) values.push_back(parse_rational(item));
    if (values.size() == 1) values.assign(labels, values[0]);
    if (values.size() != labels)
      throw std::invalid_argument("need one bound per charging station (" +
                                  std::to_string(labels) + ")");
    return values;
  };
  bundle.instance.word_lower = parse_list(alpha);
  bundle.instance.word_upper = parse_list(beta);
  bundle.validate();

  std::string text = canonical_dump(bundle_to_json(bundle));
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    out << text;
  }
  return kExitOk;
}

int cmd_oracle(const std::string& mode, uint64_t seed) {
  ProjectedFormula input = parse_dimacs(std::cin);
  if (input.projection.empty())
    throw std::invalid_argument("oracle input needs a 'c ind' projection line");
  if (mode == "count") {
    std::cout << projected_count(input.formula, input.projection).str() << "\n";
    return kExitOk;
  }
  if (mode == "sample") {
    Rng rng(seed);
    auto bits = projected_sample(input.formula, input.projection, rng);
    if (!bits) throw std::runtime_error("formula is unsatisfiable");
    for (size_t i = 0; i < input.projection.size(); i++)
      std::cout << ((*bits)[i] ? input.projection[i] : -input.projection[i]) << ' ';
    std::cout << "0\n";
    return kExitOk;
  }
  throw std::invalid_argument("--mode must be count or sample");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LQCI toolkit: feasibility, improviser construction, sampling"};
  app.require_subcommand(1);

  SampleOptions opt;

  auto* check = app.add_subcommand("check", "decide feasibility and print the greedy distribution");
  check->add_option("instance", opt.instance_path, "instance JSON")->required();
  check->add_option("--zeta", opt.zeta, "cost tolerance (CNF instances)");
  check->add_option("--gamma", opt.gamma, "randomness tolerance (CNF instances)");
  check->add_option("--delta", opt.delta, "1 - confidence (CNF instances)");
  check->add_option("--oracle", opt.oracle, "exact | exec:<command>");

  auto* sample = app.add_subcommand("sample", "emit random traces, one per line");
  sample->add_option("instance", opt.instance_path, "instance JSON")->required();
  sample->add_option("--count", opt.count, "number of traces")->required();
  sample->add_option("--seed", opt.seed, "RNG seed")->default_val(0);
  sample->add_option("--threads", opt.threads, "worker threads (default IMPROV_THREADS or 1)");
  sample->add_flag("--maxent", opt.maxent, "maximum-entropy distribution");
  sample->add_option("--gap", opt.gap, "maxent entropy gap target (bits)");
  sample->add_flag("--approx", opt.approx, "approximate scheme (CNF instances)");
  sample->add_option("--zeta", opt.zeta, "cost tolerance");
  sample->add_option("--gamma", opt.gamma, "randomness tolerance");
  sample->add_option("--delta", opt.delta, "1 - confidence");
  sample->add_option("--oracle", opt.oracle, "exact | exec:<command>");
  sample->add_option("--out", opt.out_path, "write traces to a file");

  uint64_t trace_count = 10;
  auto* stats = app.add_subcommand("stats", "sample and print an empirical report");
  stats->add_option("instance", opt.instance_path, "instance JSON")->required();
  stats->add_option("--samples", opt.count, "number of samples")->required();
  stats->add_option("--seed", opt.seed, "RNG seed")->default_val(0);
  stats->add_flag("--maxent", opt.maxent, "maximum-entropy distribution");
  stats->add_option("--gap", opt.gap, "maxent entropy gap target (bits)");
  stats->add_option("--traces", trace_count, "number of traces to embed in the report");

  std::string map_path, out_path, c_text, lambda_text = "0", rho_text = "1";
  std::string alpha_text = "0", beta_text = "1";
  uint32_t m = 0, n = 0;
  auto* grid = app.add_subcommand("grid-encode", "compile a grid map to an instance JSON");
  grid->add_option("map", map_path, "map text file")->required();
  grid->add_option("--m", m, "minimum trace length")->required();
  grid->add_option("--n", n, "maximum trace length")->required();
  grid->add_option("--c", c_text, "expected-cost bound")->required();
  grid->add_option("--lambda", lambda_text, "label lower bound");
  grid->add_option("--rho", rho_text, "label upper bound");
  grid->add_option("--alpha", alpha_text, "per-word lower bound(s), comma separated");
  grid->add_option("--beta", beta_text, "per-word upper bound(s), comma separated");
  grid->add_option("-o,--out", out_path, "output path (default stdout)");

  std::string oracle_mode;
  uint64_t oracle_seed = 0;
  auto* oracle = app.add_subcommand("oracle", "exact counter/generator over the stdin protocol");
  oracle->add_option("--mode", oracle_mode, "count | sample")->required();
  oracle->add_option("--tau", opt.zeta, "tolerance (ignored; results are exact)");
  oracle->add_option("--confidence", opt.delta, "confidence (ignored; results are exact)");
  oracle->add_option("--epsilon", opt.gamma, "tolerance (ignored; results are exact)");
  oracle->add_option("--seed", oracle_seed, "RNG seed for sampling");

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed()) return cmd_check(opt.instance_path, opt);
    if (sample->parsed()) return cmd_sample(opt);
    if (stats->parsed()) return cmd_stats(opt, trace_count);
    if (grid->parsed())
      return cmd_grid_encode(map_path, m, n, c_text, lambda_text, rho_text, alpha_text, beta_text,
                             out_path);
    if (oracle->parsed()) return cmd_oracle(oracle_mode, oracle_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
