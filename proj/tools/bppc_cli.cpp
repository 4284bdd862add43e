// bppc: instance generation, model training, LP/IP solving and benchmarks.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bppc/bppc.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kExitSolver = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct WeightSpec {
  bppc::Weight lo = 20;
  bppc::Weight hi = 100;
};

WeightSpec parse_weight_spec(const std::string& s) {
  // uniform:lo:hi
  std::vector<std::string> parts;
  std::stringstream ss(s);
  for (std::string tok; std::getline(ss, tok, ':');) parts.push_back(tok);
  if (parts.size() != 3 || parts[0] != "uniform") throw UsageError("--weights expects uniform:LO:HI, got '" + s + "'");
  try {
    return {std::stoll(parts[1]), std::stoll(parts[2])};
  } catch (const std::exception&) {
    throw UsageError("--weights bounds must be integers, got '" + s + "'");
  }
}

void add_aco_flags(CLI::App* app, bppc::AcoConfig& aco, std::optional<int>& population) {
  app->add_option("--alpha", aco.alpha, "pheromone exponent")->capture_default_str();
  app->add_option("--beta", aco.beta, "heuristic exponent")->capture_default_str();
  app->add_option("--rho", aco.rho, "evaporation coefficient in (0,1]")->capture_default_str();
  app->add_flag("--rho-persistence", aco.rho_is_persistence, "treat --rho as the kept fraction instead");
  app->add_option("--lambda", aco.lambda, "deposit divisor")->capture_default_str();
  app->add_option("--aco-iters", aco.iterations, "sampling rounds per pricing call")->capture_default_str();
  app->add_option("--population", population, "samples per round (default: number of items)");
  app->add_flag("!--no-diversity", aco.diversity_sampling, "sample without per-item seeding");
}

void add_rc_flag(CLI::App* app, double& rc) {
  app->add_option("--rc-threshold", rc, "reduced cost below which a column improves")->capture_default_str();
}

std::ifstream open_in(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  return in;
}

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

bppc::Instance load_instance(const fs::path& path, const std::optional<fs::path>& conflicts) {
  auto in = open_in(path);
  try {
    if (conflicts) {
      auto cin = open_in(*conflicts);
      return bppc::parse_instance(in, &cin, path.stem().string());
    }
    return bppc::parse_instance(in, nullptr, path.stem().string());
  } catch (const bppc::ParseError& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

bppc::LinearModel load_model(const fs::path& p) {
  auto in = open_in(p);
  try {
    return bppc::read_model(in);
  } catch (const std::exception& e) {
    throw std::runtime_error(p.string() + ": " + e.what());
  }
}

std::vector<bppc::PricingKind> parse_strategies(const std::vector<std::string>& names) {
  std::vector<bppc::PricingKind> out;
  for (const auto& s : names) {
    auto k = bppc::parse_pricing_kind(s);
    if (!k) throw UsageError("unknown pricing kind '" + s + "'");
    out.push_back(*k);
  }
  return out;
}

// Seed of the k-th generated instance.
std::uint64_t instance_seed(std::uint64_t master, int k, int count) {
  return count == 1 ? master : bppc::derive_seed(master, static_cast<std::uint64_t>(k));
}

bppc::Instance generate(int items, bppc::Weight cap, WeightSpec w, double density, std::uint64_t seed,
                        std::string name) {
  auto inst = bppc::generate_uniform_instance(items, cap, w.lo, w.hi, seed, std::move(name));
  return bppc::generate_conflicts(inst, bppc::GenConfig{density, bppc::derive_seed(seed, 1), 1});
}

json aco_json(const bppc::AcoConfig& a) {
  json j{{"alpha", a.alpha},       {"beta", a.beta},
         {"rho", a.rho},           {"rho_is_persistence", a.rho_is_persistence},
         {"lambda", a.lambda},     {"iterations", a.iterations},
         {"rc_threshold", a.rc_threshold}, {"diversity_sampling", a.diversity_sampling}};
  j["population"] = a.population ? json(*a.population) : json(nullptr);
  return j;
}

json patterns_json(const std::vector<bppc::Column>& cols) {
  json arr = json::array();
  for (const auto& c : cols) arr.push_back(c.items);
  return arr;
}

// ---- gen -------------------------------------------------------------------

struct GenArgs {
  int items = 120;
  bppc::Weight cap = 1000;
  std::string weights = "uniform:20:100";
  double density = 0.5;
  std::uint64_t seed = 1;
  int count = 1;
  bppc::Weight multiplier = 1;
  std::string prefix = "inst";
  fs::path out = ".";
};

int cmd_gen(const GenArgs& a) {
  const auto w = parse_weight_spec(a.weights);
  if (a.count < 1) throw UsageError("--count must be >= 1");
  if (a.items < 0) throw UsageError("--items must be >= 0");
  fs::create_directories(a.out);
  for (int k = 0; k < a.count; ++k) {
    const auto seed = instance_seed(a.seed, k, a.count);
    std::ostringstream name;
    name << a.prefix << '_' << std::setw(3) << std::setfill('0') << k;
    auto inst = bppc::apply_capacity_multiplier(generate(a.items, a.cap, w, a.density, seed, name.str()), a.multiplier);
    auto out = open_out(a.out / (name.str() + ".txt"));
    bppc::write_instance(out, inst);
    auto cout = open_out(a.out / (name.str() + ".conflicts"));
    bppc::write_conflicts(cout, inst.conflicts);
    std::cout << (a.out / (name.str() + ".txt")).string() << '\n';
  }
  return 0;
}

// ---- train -----------------------------------------------------------------

struct TrainArgs {
  std::vector<fs::path> instances;
  int count = 20;
  int items = 120;
  bppc::Weight cap = 150;
  std::string weights = "uniform:20:100";
  double density = 0.5;
  bppc::Weight multiplier = 1;
  std::uint64_t seed = 1;
  double time_limit = 600;
  double svm_c = 10.0;
  fs::path out = "model.txt";
  std::optional<fs::path> dump;
};

int cmd_train(const TrainArgs& a) {
  std::vector<bppc::Instance> train;
  if (!a.instances.empty()) {
    for (const auto& p : a.instances) {
      fs::path conf = p;
      conf.replace_extension(".conflicts");
      train.push_back(load_instance(p, fs::exists(conf) ? std::optional<fs::path>(conf) : std::nullopt));
    }
  } else {
    const auto w = parse_weight_spec(a.weights);
    for (int k = 0; k < a.count; ++k)
      train.push_back(generate(a.items, a.cap, w, a.density, instance_seed(a.seed, k, a.count), "train" + std::to_string(k)));
  }
  for (auto& inst : train) inst = bppc::apply_capacity_multiplier(inst, a.multiplier);
  bppc::CollectConfig cc;
  cc.time_limit = a.time_limit;
  cc.seed = a.seed;
  const auto data = bppc::collect_training_data(train, cc);
  std::size_t pos = 0;
  for (const auto& e : data) pos += e.label;
  std::cout << "examples " << data.size() << " (positive " << pos << ", negative " << data.size() - pos << ")\n";
  if (a.dump) {
    auto out = open_out(*a.dump);
    bppc::write_training_csv(out, data);
  }
  bppc::SvmConfig sc;
  sc.c = a.svm_c;
  sc.seed = a.seed;
  const auto model = bppc::train_svm(data, sc);
  std::cout << "training accuracy " << bppc::training_accuracy(model, data) << '\n';
  auto out = open_out(a.out);
  bppc::write_model(out, model);
  std::cout << "model written to " << a.out.string() << '\n';
  return 0;
}

// ---- solve -----------------------------------------------------------------

struct SolveArgs {
  fs::path instance;
  std::optional<fs::path> conflicts;
  std::optional<double> conflict_density;
  std::uint64_t seed = 1;
  bppc::Weight multiplier = 1;
  std::string mode = "lp";
  std::string pricing = "exact";
  std::optional<fs::path> model;
  double time_limit = 1800;
  std::optional<fs::path> iter_log, node_log, lp_dump, out;
  std::optional<std::size_t> max_cols, pool_size, node_limit;
  std::optional<int> population;
  bppc::CgConfig cfg;
};

int cmd_solve(SolveArgs& a) {
  auto kind = bppc::parse_pricing_kind(a.pricing);
  if (!kind) throw UsageError("unknown --pricing '" + a.pricing + "'");
  if (a.mode != "lp" && a.mode != "ip") throw UsageError("--mode must be lp or ip");
  if (bppc::needs_model(*kind) && !a.model) throw UsageError("--pricing " + a.pricing + " requires --model");
  if (a.conflicts && a.conflict_density) throw UsageError("--conflicts and --conflict-density are exclusive");

  auto inst = load_instance(a.instance, a.conflicts);
  if (a.conflict_density) inst = bppc::generate_conflicts(inst, bppc::GenConfig{*a.conflict_density, a.seed, 1});
  inst = bppc::apply_capacity_multiplier(inst, a.multiplier);

  auto& cfg = a.cfg;
  cfg.pricing = *kind;
  cfg.time_limit = a.time_limit;
  cfg.seed = a.seed;
  cfg.max_cols_per_iter = a.max_cols;
  cfg.pool_size = a.pool_size;
  if (a.population) cfg.aco.population = *a.population;
  if (a.model) cfg.model = load_model(*a.model);
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  json j;
  j["config"] = {{"instance", a.instance.string()},
                 {"items", inst.n_items()},
                 {"capacity", inst.capacity},
                 {"conflict_edges", inst.conflicts.edge_count()},
                 {"multiplier", a.multiplier},
                 {"mode", a.mode},
                 {"pricing", a.pricing},
                 {"model", a.model ? json(a.model->string()) : json(nullptr)},
                 {"time_limit", a.time_limit},
                 {"seed", a.seed},
                 {"aco", aco_json(cfg.aco)}};

  if (a.mode == "lp") {
    std::ofstream iter_log;
    bppc::CgRunOptions opt;
    if (a.iter_log) {
      iter_log = open_out(*a.iter_log);
      opt.iteration_log = &iter_log;
    }
    const auto r = bppc::run_cg(inst, cfg, opt);
    j["result"] = {{"status", bppc::to_string(r.status)},
                   {"lp_objective", r.lp_objective},
                   {"iterations", r.iterations},
                   {"pricing_calls", r.pricing_calls},
                   {"columns_generated", r.columns_generated},
                   {"exact_fallback_calls", r.exact_fallback_calls},
                   {"wall_time", r.wall_time},
                   {"n_columns", r.final_columns.size()}};
    if (a.lp_dump) {
      auto out = open_out(*a.lp_dump);
      const auto rmp = bppc::solve_rmp(r.final_columns, inst.n_items());
      bppc::write_lp_dump(out, r.final_columns, inst.n_items(), rmp.solution);
    }
  } else {
    std::ofstream node_log;
    bppc::BnpOptions opt;
    opt.node_limit = a.node_limit;
    if (a.node_log) {
      node_log = open_out(*a.node_log);
      opt.node_log = &node_log;
    }
    const auto r = bppc::run_bnp(inst, cfg, opt);
    j["result"] = {{"status", bppc::to_string(r.status)},
                   {"incumbent", r.incumbent_value ? json(*r.incumbent_value) : json(nullptr)},
                   {"global_lower_bound", r.global_lower_bound},
                   {"gap_percent", r.gap_percent},
                   {"root_lp_bound", r.root_solved ? json(r.root_lp_bound) : json(nullptr)},
                   {"nodes_explored", r.nodes_explored},
                   {"wall_time", r.wall_time},
                   {"bins", patterns_json(r.incumbent_patterns)}};
  }
  if (a.out) {
    auto out = open_out(*a.out);
    out << j.dump(2) << '\n';
  } else {
    std::cout << j.dump(2) << '\n';
  }
  return 0;
}

// ---- bench -----------------------------------------------------------------

struct BenchArgs {
  std::vector<fs::path> instances;
  std::vector<int> sizes;
  std::vector<double> densities{0.5};
  std::vector<bppc::Weight> multipliers{1};
  std::vector<std::uint64_t> seeds{1};
  bppc::Weight cap = 150;
  std::string weights = "uniform:20:100";
  std::vector<std::string> strategies{"exact"};
  std::optional<fs::path> model;
  double time_limit = 60;
  fs::path out = "bench_out";
  unsigned jobs = 1;
  std::uint64_t seed = 1;
  std::optional<int> population;
  bppc::CgConfig cfg;
};

int cmd_bench(BenchArgs& a) {
  bppc::BenchPlan plan;
  plan.strategies = parse_strategies(a.strategies);
  plan.time_limit = a.time_limit;
  plan.output_dir = a.out;
  plan.jobs = a.jobs;
  plan.base = a.cfg;
  plan.base.seed = a.seed;
  if (a.population) plan.base.aco.population = *a.population;
  if (a.model) plan.base.model = load_model(*a.model);
  if (!a.instances.empty()) {
    for (const auto& p : a.instances) {
      fs::path conf = p;
      conf.replace_extension(".conflicts");
      const auto base = load_instance(p, fs::exists(conf) ? std::optional<fs::path>(conf) : std::nullopt);
      for (auto m : a.multipliers) plan.instances.push_back({bppc::apply_capacity_multiplier(base, m), m});
    }
  } else {
    const auto w = parse_weight_spec(a.weights);
    bppc::GridSpec g;
    g.sizes = a.sizes;
    g.densities = a.densities;
    g.multipliers = a.multipliers;
    g.seeds = a.seeds;
    g.capacity = a.cap;
    g.weight_lo = w.lo;
    g.weight_hi = w.hi;
    plan.instances = bppc::grid_instances(g);
  }
  try {
    plan.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto rows = bppc::run_bench_to_dir(plan, &std::cerr);
  bppc::write_summary(std::cout, rows, plan);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Column generation and branch-and-price for bin packing with conflicts"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "generate random instances");
  g->add_option("--items", gen.items, "items per instance")->capture_default_str();
  g->add_option("--cap", gen.cap, "bin capacity")->capture_default_str();
  g->add_option("--weights", gen.weights, "weight distribution, uniform:LO:HI")->capture_default_str();
  g->add_option("--density", gen.density, "conflict graph edge probability")->capture_default_str();
  g->add_option("--seed", gen.seed, "master seed")->capture_default_str();
  g->add_option("--count", gen.count, "number of instances")->capture_default_str();
  g->add_option("--multiplier", gen.multiplier, "capacity multiplier")->capture_default_str();
  g->add_option("--prefix", gen.prefix, "file name prefix")->capture_default_str();
  g->add_option("--out", gen.out, "output directory")->capture_default_str();

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "collect pricing data with exact CG and fit the membership model");
  t->add_option("--instances", tr.instances, "training instance files (default: generate)");
  t->add_option("--count", tr.count, "generated training instances")->capture_default_str();
  t->add_option("--items", tr.items, "items per generated instance")->capture_default_str();
  t->add_option("--cap", tr.cap, "capacity of generated instances")->capture_default_str();
  t->add_option("--weights", tr.weights, "weight distribution, uniform:LO:HI")->capture_default_str();
  t->add_option("--density", tr.density, "conflict density of generated instances")->capture_default_str();
  t->add_option("--multiplier", tr.multiplier, "capacity multiplier applied to training instances")->capture_default_str();
  t->add_option("--seed", tr.seed, "master seed")->capture_default_str();
  t->add_option("--time-limit", tr.time_limit, "CG budget per training instance (s)")->capture_default_str();
  t->add_option("--svm-c", tr.svm_c, "SVM regularization constant")->capture_default_str();
  t->add_option("--out", tr.out, "model file")->capture_default_str();
  t->add_option("--dump-data", tr.dump, "write training examples as CSV");

  SolveArgs so;
  auto* s = app.add_subcommand("solve", "solve the LP relaxation (lp) or the integer problem (ip)");
  s->add_option("--instance", so.instance, "instance file")->required();
  s->add_option("--conflicts", so.conflicts, "conflict edge list file");
  s->add_option("--conflict-density", so.conflict_density, "generate conflicts with this density and --seed");
  s->add_option("--seed", so.seed, "seed for generation and sampling")->capture_default_str();
  s->add_option("--multiplier", so.multiplier, "capacity multiplier")->capture_default_str();
  s->add_option("--mode", so.mode, "lp or ip")->capture_default_str();
  s->add_option("--pricing", so.pricing,
                "exact | exact-pool | aco | mlph | mlaco | mlaco-pred-heu-eta | mlaco-pred-tau")
      ->capture_default_str();
  s->add_option("--model", so.model, "model file for ML pricing");
  s->add_option("--time-limit", so.time_limit, "wall-clock limit (s)")->capture_default_str();
  s->add_option("--iter-log", so.iter_log, "per-iteration CSV (lp mode)");
  s->add_option("--node-log", so.node_log, "per-node CSV (ip mode)");
  s->add_option("--lp-dump", so.lp_dump, "final RMP dump (lp mode)");
  s->add_option("--max-cols-per-iter", so.max_cols, "cap on columns added per iteration");
  s->add_option("--pool-size", so.pool_size, "exact-pool solutions per call");
  s->add_option("--node-limit", so.node_limit, "branch-and-price node limit");
  s->add_option("--out", so.out, "write result JSON here instead of stdout");
  add_aco_flags(s, so.cfg.aco, so.population);
  add_rc_flag(s, so.cfg.rc_threshold);

  BenchArgs be;
  auto* b = app.add_subcommand("bench", "run a strategy grid and write results.csv and summary.txt");
  b->add_option("--instances", be.instances, "instance files (otherwise a generated grid)");
  b->add_option("--sizes", be.sizes, "grid item counts")->delimiter(',');
  b->add_option("--densities", be.densities, "grid conflict densities")->delimiter(',')->capture_default_str();
  b->add_option("--multipliers", be.multipliers, "capacity multipliers")->delimiter(',')->capture_default_str();
  b->add_option("--seeds", be.seeds, "grid seeds")->delimiter(',')->capture_default_str();
  b->add_option("--cap", be.cap, "grid capacity")->capture_default_str();
  b->add_option("--weights", be.weights, "grid weight distribution, uniform:LO:HI")->capture_default_str();
  b->add_option("--strategies", be.strategies, "pricing kinds")->delimiter(',')->capture_default_str();
  b->add_option("--model", be.model, "model file for ML pricing");
  b->add_option("--time-limit", be.time_limit, "per-run limit (s)")->capture_default_str();
  b->add_option("--out", be.out, "output directory")->capture_default_str();
  b->add_option("--jobs", be.jobs, "concurrent runs")->capture_default_str();
  b->add_option("--seed", be.seed, "sampling seed")->capture_default_str();
  add_aco_flags(b, be.cfg.aco, be.population);
  add_rc_flag(b, be.cfg.rc_threshold);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*g) return cmd_gen(gen);
    if (*t) return cmd_train(tr);
    if (*s) return cmd_solve(so);
    if (*b) return cmd_bench(be);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSolver;
  }
  return 0;
}
