#pragma once

// Exact pricing: depth-first branch-and-bound for the knapsack problem with
// conflicts, a solution-pool variant, and an exhaustive oracle.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "bppc/pricing_problem.hpp"

namespace bppc {

using Clock = std::chrono::steady_clock;

inline constexpr double kPruneTol = 1e-9;

struct SearchLimits {
  std::optional<std::uint64_t> node_budget;
  std::optional<Clock::time_point> deadline;
};

struct ExactResult {
  PricingSolution solution;
  bool proven_optimal = true;
  std::uint64_t nodes = 0;
  double root_bound = 0.0;
};

namespace detail {

// Items with positive profit are branched on in decreasing profit/weight
// order (ties: lower index first). Zero-profit items never raise the
// objective and are left out of the tree.
class ConflictKnapsackSearch {
 public:
  ConflictKnapsackSearch(const ReducedProblem& p, const SearchLimits& limits) : p_(p), limits_(limits) {
    for (int s = 0; s < p.size(); ++s)
      if (p.profit(s) > 0.0) order_.push_back(s);
    std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) {
      const double ra = p.profit(a) / static_cast<double>(p.weight(a));
      const double rb = p.profit(b) / static_cast<double>(p.weight(b));
      return ra > rb;
    });
    blocked_.assign(static_cast<std::size_t>(p.size()), 0);
  }

  // Best single solution.
  ExactResult solve_best() {
    mode_ = Mode::Best;
    best_profit_ = 0.0;
    best_.clear();
    root_bound_ = bound(0, p_.capacity());
    dfs(0, p_.capacity(), 0.0);
    ExactResult r;
    r.solution = p_.expand(best_);
    r.proven_optimal = !aborted_;
    r.nodes = nodes_;
    r.root_bound = root_bound_;
    return r;
  }

  // Top `max_solutions` maximal solutions with profit > min_profit.
  std::vector<std::vector<int>> solve_pool(std::size_t max_solutions, double min_profit, bool& complete) {
    mode_ = Mode::Pool;
    pool_limit_ = max_solutions;
    pool_floor_ = min_profit;
    root_bound_ = bound(0, p_.capacity());
    dfs(0, p_.capacity(), 0.0);
    complete = !aborted_;
    std::vector<std::vector<int>> out;
    out.reserve(pool_.size());
    for (auto& e : pool_) out.push_back(std::move(e.items));
    return out;
  }

  double root_bound() const { return root_bound_; }

 private:
  enum class Mode { Best, Pool };
  struct PoolEntry {
    double profit;
    std::vector<int> items;
  };

  double threshold() const {
    if (mode_ == Mode::Best) return best_profit_;
    if (pool_.size() < pool_limit_) return pool_floor_;
    return std::max(pool_floor_, pool_.back().profit);
  }

  // Dantzig bound over undecided, unblocked items that fit on their own.
  double bound(int k, Weight remaining) const {
    double b = 0.0;
    const int m = static_cast<int>(order_.size());
    for (int j = k; j < m && remaining > 0; ++j) {
      const int s = order_[j];
      if (blocked_[s]) continue;
      const Weight w = p_.weight(s);
      if (w <= remaining) {
        b += p_.profit(s);
        remaining -= w;
      } else {
        b += p_.profit(s) * static_cast<double>(remaining) / static_cast<double>(w);
        break;
      }
    }
    return b;
  }

  bool out_of_budget() {
    if (limits_.node_budget && nodes_ > *limits_.node_budget) return true;
    if (limits_.deadline && (nodes_ & 1023) == 0 && Clock::now() > *limits_.deadline) return true;
    return false;
  }

  void select(int s, int delta) {
    for (int t : p_.graph().neighbors(s)) blocked_[t] += delta;
  }

  bool maximal(Weight remaining) const {
    for (int s : order_)
      if (!in_[s] && !blocked_[s] && p_.weight(s) <= remaining) return false;
    return true;
  }

  void record_leaf(double profit, Weight remaining) {
    if (mode_ == Mode::Best) return;
    if (profit <= threshold() || !maximal(remaining)) return;
    PoolEntry e{profit, current_};
    std::sort(e.items.begin(), e.items.end());
    auto pos = std::upper_bound(pool_.begin(), pool_.end(), e, [](const PoolEntry& a, const PoolEntry& b) {
      if (a.profit != b.profit) return a.profit > b.profit;
      return a.items < b.items;
    });
    pool_.insert(pos, std::move(e));
    if (pool_.size() > pool_limit_) pool_.pop_back();
  }

  void dfs(int k, Weight remaining, double profit) {
    if (aborted_) return;
    ++nodes_;
    if (out_of_budget()) {
      aborted_ = true;
      return;
    }
    if (mode_ == Mode::Best && profit > best_profit_ + kPruneTol) {
      best_profit_ = profit;
      best_ = current_;
    }
    if (profit + bound(k, remaining) <= threshold() + kPruneTol) return;
    const int m = static_cast<int>(order_.size());
    if (k == m) {
      record_leaf(profit, remaining);
      return;
    }
    const int s = order_[k];
    if (!blocked_[s] && p_.weight(s) <= remaining) {
      current_.push_back(s);
      in_[s] = 1;
      select(s, +1);
      dfs(k + 1, remaining - p_.weight(s), profit + p_.profit(s));
      select(s, -1);
      in_[s] = 0;
      current_.pop_back();
    }
    dfs(k + 1, remaining, profit);
  }

  const ReducedProblem& p_;
  SearchLimits limits_;
  Mode mode_ = Mode::Best;
  std::vector<int> order_;
  std::vector<int> blocked_;
  std::vector<char> in_ = std::vector<char>(static_cast<std::size_t>(p_.size()), 0);
  std::vector<int> current_;
  std::vector<int> best_;
  double best_profit_ = 0.0;
  double root_bound_ = 0.0;
  std::uint64_t nodes_ = 0;
  bool aborted_ = false;
  std::vector<PoolEntry> pool_;
  std::size_t pool_limit_ = 0;
  double pool_floor_ = 0.0;
};

}  // namespace detail

inline ExactResult solve_exact(const ReducedProblem& problem, const SearchLimits& limits = {}) {
  detail::ConflictKnapsackSearch search(problem, limits);
  return search.solve_best();
}

inline ExactResult solve_exact(const PricingProblem& problem, const SearchLimits& limits = {}) {
  return solve_exact(ReducedProblem(problem), limits);
}

struct PoolResult {
  std::vector<PricingSolution> solutions;  // profit descending
  bool complete = true;
};

// Distinct maximal solutions with reduced cost below rc_threshold, best
// max_solutions of them by profit; the optimum is always first when it
// qualifies.
inline PoolResult solve_pool_ex(const ReducedProblem& problem, std::size_t max_solutions, double rc_threshold,
                                const SearchLimits& limits = {}) {
  if (max_solutions < 1) throw std::invalid_argument("max_solutions must be >= 1");
  detail::ConflictKnapsackSearch search(problem, limits);
  PoolResult r;
  const auto sets = search.solve_pool(max_solutions, 1.0 - rc_threshold, r.complete);
  for (const auto& s : sets) {
    auto sol = problem.expand(s);
    if (sol.reduced_cost < rc_threshold) r.solutions.push_back(std::move(sol));
  }
  return r;
}

inline std::vector<PricingSolution> solve_pool(const PricingProblem& problem, std::size_t max_solutions,
                                               double rc_threshold = -1e-6) {
  return solve_pool_ex(ReducedProblem(problem), max_solutions, rc_threshold).solutions;
}

// Exhaustive enumeration of every feasible subset. Test oracle only.
inline PricingSolution brute_force_pricing(const PricingProblem& p) {
  const int n = p.size();
  if (n > 25) throw std::invalid_argument("brute_force_pricing refuses n > 25");
  std::vector<char> forbidden(static_cast<std::size_t>(n), 0);
  for (int i : p.forbidden_items) forbidden[i] = 1;
  std::vector<int> current;
  PricingSolution best;
  best.profit = 0.0;
  best.reduced_cost = 1.0;
  auto recurse = [&](auto&& self, int i, Weight load, double profit) -> void {
    if (i == n) {
      if (profit > best.profit && satisfies_pricing_constraints(p, current)) {
        best.items = current;
        best.profit = profit;
        best.reduced_cost = 1.0 - profit;
      }
      return;
    }
    self(self, i + 1, load, profit);
    if (forbidden[i] || load + p.weights[i] > p.capacity) return;
    for (int j : current)
      if (p.conflicts.adjacent(i, j)) return;
    current.push_back(i);
    self(self, i + 1, load + p.weights[i], profit + p.profits[i]);
    current.pop_back();
  };
  recurse(recurse, 0, 0, 0.0);
  return best;
}

}  // namespace bppc
