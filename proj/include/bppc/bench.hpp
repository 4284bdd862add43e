#pragma once

// Benchmark grid: every (instance, strategy) cell runs column generation
// under a time limit; rows go to results.csv in grid order and a summary
// table counts solved runs per strategy and capacity multiplier.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "bppc/cg_engine.hpp"

namespace bppc {

struct BenchInstance {
  Instance instance;     // capacity already scaled
  Weight multiplier = 1;
};

struct GridSpec {
  std::vector<int> sizes;
  std::vector<double> densities{0.5};
  std::vector<Weight> multipliers{1};
  std::vector<std::uint64_t> seeds{1};
  Weight capacity = 150;
  Weight weight_lo = 20;
  Weight weight_hi = 100;
};

// Base instance per (size, density, seed), then one scaled copy per
// multiplier. Conflicts come from an independent derived seed.
inline std::vector<BenchInstance> grid_instances(const GridSpec& g) {
  std::vector<BenchInstance> out;
  for (int n : g.sizes)
    for (double d : g.densities)
      for (auto seed : g.seeds) {
        std::ostringstream name;
        name << "u" << n << "_d" << d << "_s" << seed;
        Instance base = generate_uniform_instance(n, g.capacity, g.weight_lo, g.weight_hi, seed, name.str());
        base = generate_conflicts(base, GenConfig{d, derive_seed(seed, 1), 1});
        for (Weight m : g.multipliers) out.push_back({apply_capacity_multiplier(base, m), m});
      }
  return out;
}

struct BenchPlan {
  std::vector<BenchInstance> instances;
  std::vector<PricingKind> strategies;
  double time_limit = 60.0;
  std::filesystem::path output_dir;
  unsigned jobs = 1;
  CgConfig base;  // ACO parameters, model, seed

  void validate() const {
    if (instances.empty()) throw std::invalid_argument("bench plan has no instances");
    if (strategies.empty()) throw std::invalid_argument("bench plan has no strategies");
    if (!(time_limit > 0)) throw std::invalid_argument("time limit must be positive");
    if (jobs == 0) throw std::invalid_argument("--jobs must be >= 1");
    for (auto k : strategies)
      if (needs_model(k) && !base.model)
        throw std::invalid_argument("strategy '" + to_string(k) + "' requires a model (--model)");
  }
};

struct BenchRow {
  std::string instance;
  std::string strategy;
  Weight multiplier = 1;
  std::string status;  // CgStatus name, or "Error"
  double lp_objective = 0.0;
  double wall_s = 0.0;
  int iters = 0;
  std::size_t cols = 0;
  int fallbacks = 0;
  std::string error;
};

inline constexpr const char* kResultsHeader = "instance,strategy,multiplier,status,lp_objective,wall_s,iters,cols,fallbacks";

inline BenchRow run_cell(const BenchInstance& bi, PricingKind kind, const BenchPlan& plan) {
  BenchRow row;
  row.instance = bi.instance.name;
  row.strategy = to_string(kind);
  row.multiplier = bi.multiplier;
  CgConfig cfg = plan.base;
  cfg.pricing = kind;
  cfg.time_limit = plan.time_limit;
  try {
    const CgResult r = run_cg(bi.instance, cfg);
    row.status = to_string(r.status);
    row.lp_objective = r.lp_objective;
    row.wall_s = r.wall_time;
    row.iters = r.iterations;
    row.cols = r.columns_generated;
    row.fallbacks = r.exact_fallback_calls;
  } catch (const std::exception& e) {
    row.status = "Error";
    row.error = e.what();
  }
  return row;
}

// Cells run on `plan.jobs` workers; rows come back in grid order
// (instance-major, then strategy). Failures become "Error" rows.
inline std::vector<BenchRow> run_bench(const BenchPlan& plan, std::ostream* progress = nullptr) {
  plan.validate();
  const std::size_t n_cells = plan.instances.size() * plan.strategies.size();
  std::vector<BenchRow> rows(n_cells);
  std::atomic<std::size_t> next{0};
  std::mutex io;
  auto worker = [&] {
    for (std::size_t c = next++; c < n_cells; c = next++) {
      const auto& bi = plan.instances[c / plan.strategies.size()];
      const auto kind = plan.strategies[c % plan.strategies.size()];
      rows[c] = run_cell(bi, kind, plan);
      if (progress) {
        std::lock_guard lock(io);
        *progress << "[" << (c + 1) << "/" << n_cells << "] " << rows[c].instance << " x" << rows[c].multiplier << " "
                  << rows[c].strategy << ": " << rows[c].status;
        if (!rows[c].error.empty()) *progress << " (" << rows[c].error << ")";
        *progress << '\n';
      }
    }
  };
  const unsigned workers = std::min<unsigned>(plan.jobs, static_cast<unsigned>(n_cells));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return rows;
}

inline void write_results_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << kResultsHeader << '\n';
  for (const auto& r : rows)
    out << r.instance << ',' << r.strategy << ',' << r.multiplier << ',' << r.status << ','
        << format_double(r.lp_objective) << ',' << format_double(r.wall_s) << ',' << r.iters << ',' << r.cols << ','
        << r.fallbacks << '\n';
}

struct SummaryCell {
  int runs = 0;
  int solved = 0;
  double mean_wall = 0.0;  // unsolved runs charged the time limit
};

// (strategy, multiplier) -> counts, strategies in first-seen order.
inline std::vector<std::pair<std::pair<std::string, Weight>, SummaryCell>> summarize(const std::vector<BenchRow>& rows,
                                                                                      double time_limit) {
  std::vector<std::pair<std::pair<std::string, Weight>, SummaryCell>> out;
  std::map<std::pair<std::string, Weight>, std::size_t> where;
  std::vector<double> total;
  for (const auto& r : rows) {
    const auto key = std::make_pair(r.strategy, r.multiplier);
    auto [it, fresh] = where.emplace(key, out.size());
    if (fresh) {
      out.push_back({key, {}});
      total.push_back(0.0);
    }
    auto& cell = out[it->second].second;
    ++cell.runs;
    const bool solved = r.status == "Optimal";
    cell.solved += solved ? 1 : 0;
    total[it->second] += solved ? r.wall_s : time_limit;
  }
  for (std::size_t k = 0; k < out.size(); ++k) out[k].second.mean_wall = total[k] / out[k].second.runs;
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first.second < b.first.second; });
  return out;
}

inline void write_summary(std::ostream& out, const std::vector<BenchRow>& rows, const BenchPlan& plan) {
  out << "time limit " << plan.time_limit << " s, " << plan.jobs << " concurrent job(s)"
      << (plan.jobs > 1 ? " (wall times include contention)" : "") << "\n\n";
  out << std::left << std::setw(22) << "strategy" << std::setw(12) << "multiplier" << std::setw(10) << "solved"
      << std::setw(8) << "runs" << "mean_wall_s\n";
  for (const auto& [key, cell] : summarize(rows, plan.time_limit)) {
    out << std::left << std::setw(22) << key.first << std::setw(12) << key.second << std::setw(10) << cell.solved
        << std::setw(8) << cell.runs << std::fixed << std::setprecision(3) << cell.mean_wall << '\n';
    out.unsetf(std::ios::fixed);
  }
}

// Runs the plan and writes results.csv and summary.txt into output_dir.
inline std::vector<BenchRow> run_bench_to_dir(const BenchPlan& plan, std::ostream* progress = nullptr) {
  plan.validate();
  std::filesystem::create_directories(plan.output_dir);
  const auto rows = run_bench(plan, progress);
  const auto csv_path = plan.output_dir / "results.csv";
  std::ofstream csv(csv_path);
  if (!csv) throw std::runtime_error("cannot write " + csv_path.string());
  write_results_csv(csv, rows);
  const auto sum_path = plan.output_dir / "summary.txt";
  std::ofstream sum(sum_path);
  if (!sum) throw std::runtime_error("cannot write " + sum_path.string());
  write_summary(sum, rows, plan);
  return rows;
}

}  // namespace bppc
