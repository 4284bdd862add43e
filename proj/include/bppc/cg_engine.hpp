#pragma once

// Column generation for the bin packing LP with conflicts: RMP seeding,
// the solve/price/add loop, exact fallback for heuristic pricers, and the
// optimality certificate.

#include <algorithm>
#include <chrono>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bppc/instance.hpp"
#include "bppc/linear_model.hpp"
#include "bppc/pricing_exact.hpp"
#include "bppc/pricing_problem.hpp"
#include "bppc/rng.hpp"
#include "bppc/sampling_aco.hpp"
#include "bppc/simplex.hpp"

namespace bppc {

// A column must have reduced cost below -kNegativeRc to count as improving.
inline constexpr double kNegativeRc = 1e-6;

enum class PricingKind { ExactSingle, ExactPool, PlainAco, Mlph, MlacoPredictedEta, MlacoPredHeuEta, MlacoPredictedTau };

inline const std::vector<PricingKind>& all_pricing_kinds() {
  static const std::vector<PricingKind> kinds = {PricingKind::ExactSingle,       PricingKind::ExactPool,
                                                 PricingKind::PlainAco,          PricingKind::Mlph,
                                                 PricingKind::MlacoPredictedEta, PricingKind::MlacoPredHeuEta,
                                                 PricingKind::MlacoPredictedTau};
  return kinds;
}

inline std::optional<StrategyKind> heuristic_of(PricingKind k) {
  switch (k) {
    case PricingKind::ExactSingle:
    case PricingKind::ExactPool: return std::nullopt;
    case PricingKind::PlainAco: return StrategyKind::PlainAco;
    case PricingKind::Mlph: return StrategyKind::Mlph;
    case PricingKind::MlacoPredictedEta: return StrategyKind::MlacoPredictedEta;
    case PricingKind::MlacoPredHeuEta: return StrategyKind::MlacoPredHeuEta;
    case PricingKind::MlacoPredictedTau: return StrategyKind::MlacoPredictedTau;
  }
  return std::nullopt;
}

inline bool needs_model(PricingKind k) {
  const auto h = heuristic_of(k);
  return h && needs_model(*h);
}

inline std::string to_string(PricingKind k) {
  switch (k) {
    case PricingKind::ExactSingle: return "exact";
    case PricingKind::ExactPool: return "exact-pool";
    default: return to_string(*heuristic_of(k));
  }
}

inline std::optional<PricingKind> parse_pricing_kind(const std::string& s) {
  for (PricingKind k : all_pricing_kinds())
    if (to_string(k) == s) return k;
  return std::nullopt;
}

struct CgConfig {
  PricingKind pricing = PricingKind::ExactSingle;
  double time_limit = 1800.0;  // seconds
  double rc_threshold = -kNegativeRc;
  std::uint64_t seed = 1;
  AcoConfig aco;
  std::optional<LinearModel> model;
  std::optional<std::size_t> max_cols_per_iter;
  std::optional<std::size_t> pool_size;  // ExactPool; default n_items
  std::optional<std::uint64_t> exact_node_budget;

  void validate() const {
    if (!(time_limit > 0)) throw std::invalid_argument("time limit must be positive");
    if (needs_model(pricing) && !model)
      throw std::invalid_argument("pricing '" + to_string(pricing) + "' requires a model (--model)");
    aco.validate();
  }
};

enum class CgStatus { Optimal, TimeLimit, Infeasible };

inline const char* to_string(CgStatus s) {
  switch (s) {
    case CgStatus::Optimal: return "Optimal";
    case CgStatus::TimeLimit: return "TimeLimit";
    case CgStatus::Infeasible: return "Infeasible";
  }
  return "?";
}

struct IterationRecord {
  int iteration = 0;
  double lp_objective = 0.0;
  std::size_t columns_added = 0;
  double min_reduced_cost = 0.0;
  double elapsed = 0.0;
  bool used_fallback = false;
};

struct CgResult {
  CgStatus status = CgStatus::TimeLimit;
  double lp_objective = std::numeric_limits<double>::infinity();
  int iterations = 0;
  int pricing_calls = 0;
  std::size_t columns_generated = 0;
  int exact_fallback_calls = 0;
  double wall_time = 0.0;
  std::vector<Column> final_columns;
  std::vector<double> final_primal;  // aligned with final_columns
  std::vector<double> final_duals;
  std::vector<IterationRecord> history;
};

// Observer invoked once per iteration after the RMP solve, before pricing.
struct PricingSnapshot {
  int iteration;
  const ReducedProblem& problem;
  const std::vector<double>& duals;
  double lp_objective;
};
using PricingObserver = std::function<void(const PricingSnapshot&)>;

// Branching restrictions of a branch-and-price node.
struct NodeRestrictions {
  std::vector<std::vector<int>> together;  // groups selected all-or-nothing
  std::vector<std::pair<int, int>> apart;  // extra conflicts

  PricingProblem pricing_template(const Instance& inst) const {
    PricingProblem p = PricingProblem::from_instance(inst, std::vector<double>(inst.weights.size(), 0.0));
    for (auto [i, j] : apart) p.conflicts.add_edge(i, j);
    for (const auto& g : together)
      if (g.size() > 1) p.merged_groups.push_back(g);
    return p;
  }
};

namespace detail {

class ColumnPool {
 public:
  bool contains(const std::vector<int>& items) const { return keys_.count(items) != 0; }

  // Appends unless the item set is already present.
  bool add(std::vector<int> items) {
    if (items.empty() || !keys_.insert(items).second) return false;
    columns_.push_back(Column{std::move(items), next_id_++});
    return true;
  }

  void add_with_id(const Column& c) {
    if (c.items.empty() || !keys_.insert(c.items).second) return;
    columns_.push_back(c);
    next_id_ = std::max(next_id_, c.id + 1);
  }

  const std::vector<Column>& columns() const { return columns_; }
  std::size_t size() const { return columns_.size(); }

 private:
  std::vector<Column> columns_;
  std::set<std::vector<int>> keys_;
  std::int64_t next_id_ = 0;
};

}  // namespace detail

// Random maximal patterns until every usable item is covered; after n
// draws any item still uncovered gets its own (super-)singleton column.
inline std::vector<std::vector<int>> init_rmp(const ReducedProblem& p, Rng& rng) {
  const int n = p.size();
  std::vector<char> covered(static_cast<std::size_t>(n), 0);
  int uncovered = n;
  std::set<Selection> chosen;
  for (int attempt = 0; attempt < n && uncovered > 0; ++attempt) {
    auto s = random_selection(p, rng);
    bool useful = false;
    for (int i : s)
      if (!covered[i]) {
        covered[i] = 1;
        --uncovered;
        useful = true;
      }
    if (useful) chosen.insert(std::move(s));
  }
  for (int i = 0; i < n; ++i)
    if (!covered[i]) chosen.insert(Selection{i});
  std::vector<std::vector<int>> out;
  out.reserve(chosen.size());
  for (const auto& s : chosen) out.push_back(p.expand(s).items);
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<Column> init_rmp(const Instance& inst, Rng& rng) {
  const ReducedProblem p(PricingProblem::from_instance(inst, std::vector<double>(inst.weights.size(), 0.0)));
  std::vector<Column> cols;
  std::int64_t id = 0;
  for (auto& items : init_rmp(p, rng)) cols.push_back(Column{std::move(items), id++});
  return cols;
}

// True iff no feasible pattern prices out below -kNegativeRc under `duals`.
inline bool certify_optimality(const Instance& inst, const std::vector<double>& duals) {
  const auto r = solve_exact(PricingProblem::from_instance(inst, duals));
  return r.proven_optimal && r.solution.reduced_cost >= -kNegativeRc;
}

inline bool certify_optimality(const Instance& inst, const std::vector<Column>& /*columns*/,
                               const std::vector<double>& duals) {
  return certify_optimality(inst, duals);
}

struct CgRunOptions {
  NodeRestrictions restrictions;
  std::vector<Column> initial_columns;  // empty: seed with init_rmp
  std::optional<Clock::time_point> deadline;  // overrides cfg.time_limit when earlier
  std::ostream* iteration_log = nullptr;  // CSV, header written first
  PricingObserver observer;
};

inline constexpr const char* kIterationLogHeader = "iteration,lp_objective,columns_added,min_reduced_cost,elapsed_seconds";

inline CgResult run_cg(const Instance& inst, const CgConfig& cfg, const CgRunOptions& opt = {}) {
  cfg.validate();
  for (int i = 0; i < inst.n_items(); ++i)
    if (inst.weights[i] > inst.capacity) throw InfeasibleItemError(i, inst.weights[i], inst.capacity);

  const auto start = Clock::now();
  auto deadline = start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(cfg.time_limit));
  if (opt.deadline && *opt.deadline < deadline) deadline = *opt.deadline;
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

  CgResult res;
  Rng rng(cfg.seed);
  ReducedProblem reduced(opt.restrictions.pricing_template(inst));
  const int n = inst.n_items();
  const auto heuristic = heuristic_of(cfg.pricing);
  AcoConfig aco = cfg.aco;
  aco.rc_threshold = std::min(aco.rc_threshold, cfg.rc_threshold);
  const LinearModel* model = cfg.model ? &*cfg.model : nullptr;

  detail::ColumnPool pool;
  if (opt.initial_columns.empty()) {
    for (auto& items : init_rmp(reduced, rng)) pool.add(std::move(items));
  } else {
    for (const auto& c : opt.initial_columns) pool.add_with_id(c);
  }

  if (opt.iteration_log) *opt.iteration_log << kIterationLogHeader << '\n';

  BasisToken basis;
  SearchLimits limits{cfg.exact_node_budget, deadline};
  bool done = false;
  while (!done) {
    if (Clock::now() > deadline) {
      res.status = CgStatus::TimeLimit;
      break;
    }
    ++res.iterations;
    auto rmp = solve_rmp(pool.columns(), n, basis.empty() ? nullptr : &basis);
    if (rmp.solution.status == LpStatus::Infeasible) {
      res.status = CgStatus::Infeasible;
      break;
    }
    basis = std::move(rmp.basis);
    const LpSolution& lp = rmp.solution;
    res.lp_objective = lp.objective;
    res.final_primal = lp.primal;
    res.final_duals = lp.duals;
    reduced.set_profits(lp.duals);
    if (opt.observer) opt.observer(PricingSnapshot{res.iterations, reduced, lp.duals, lp.objective});

    IterationRecord rec;
    rec.iteration = res.iterations;
    rec.lp_objective = lp.objective;
    rec.min_reduced_cost = std::numeric_limits<double>::infinity();
    std::vector<PricingSolution> found;
    bool certified = false;  // exact pricing proved that nothing improves
    bool exhausted = false;  // pricing ran out of time or nodes without a verdict
    ++res.pricing_calls;

    auto exact_single = [&] {
      const auto ex = solve_exact(reduced, limits);
      rec.min_reduced_cost = std::min(rec.min_reduced_cost, ex.solution.reduced_cost);
      if (ex.solution.reduced_cost < cfg.rc_threshold)
        found.push_back(ex.solution);
      else if (ex.proven_optimal)
        certified = true;
      else
        exhausted = true;
    };

    if (cfg.pricing == PricingKind::ExactSingle) {
      exact_single();
    } else if (cfg.pricing == PricingKind::ExactPool) {
      auto pr = solve_pool_ex(reduced, cfg.pool_size.value_or(static_cast<std::size_t>(std::max(n, 1))),
                              cfg.rc_threshold, limits);
      found = std::move(pr.solutions);
      for (const auto& s : found) rec.min_reduced_cost = std::min(rec.min_reduced_cost, s.reduced_cost);
      if (found.empty()) {
        if (pr.complete) {
          certified = true;
          rec.min_reduced_cost = std::min(rec.min_reduced_cost, solve_exact(reduced).solution.reduced_cost);
        } else {
          exhausted = true;
        }
      }
    } else {
      auto sr = run_strategy(reduced, *heuristic, aco, model, rng, deadline);
      found = std::move(sr.columns);
      std::erase_if(found, [&](const PricingSolution& s) { return pool.contains(s.items); });
      for (const auto& s : found) rec.min_reduced_cost = std::min(rec.min_reduced_cost, s.reduced_cost);
      if (found.empty()) {
        ++res.exact_fallback_calls;
        rec.used_fallback = true;
        exact_single();
      }
    }

    if (cfg.max_cols_per_iter && found.size() > *cfg.max_cols_per_iter) {
      std::stable_sort(found.begin(), found.end(),
                       [](const PricingSolution& a, const PricingSolution& b) { return a.reduced_cost < b.reduced_cost; });
      found.resize(*cfg.max_cols_per_iter);
    }
    for (auto& s : found)
      if (pool.add(std::move(s.items))) ++rec.columns_added;
    res.columns_generated += rec.columns_added;
    rec.elapsed = elapsed();
    res.history.push_back(rec);
    if (opt.iteration_log)
      *opt.iteration_log << rec.iteration << ',' << format_double(rec.lp_objective) << ',' << rec.columns_added << ','
                         << format_double(rec.min_reduced_cost) << ',' << format_double(rec.elapsed) << '\n';

    if (certified) {
      res.status = CgStatus::Optimal;
      done = true;
    } else if (exhausted) {
      res.status = CgStatus::TimeLimit;
      done = true;
    } else if (rec.columns_added == 0) {
      // Only reachable when an improving column is already pooled, i.e. the
      // RMP duals are numerically off; treat as converged.
      res.status = CgStatus::Optimal;
      done = true;
    }
  }
  res.final_columns = pool.columns();
  if (res.final_primal.size() != res.final_columns.size()) res.final_primal.resize(res.final_columns.size(), 0.0);
  res.wall_time = elapsed();
  return res;
}

}  // namespace bppc
