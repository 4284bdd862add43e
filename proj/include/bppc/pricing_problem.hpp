#pragma once

// The pricing subproblem: a knapsack with conflicts whose profits are the
// current covering duals, plus the branching restrictions of a search node.

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "bppc/instance.hpp"

namespace bppc {

struct PricingProblem {
  std::vector<double> profits;
  std::vector<Weight> weights;
  Weight capacity = 0;
  ConflictGraph conflicts;
  std::vector<int> forbidden_items;
  // Groups of items that must be selected all-or-nothing. Items not listed
  // form singleton groups.
  std::vector<std::vector<int>> merged_groups;

  int size() const { return static_cast<int>(weights.size()); }

  static PricingProblem from_instance(const Instance& inst, std::vector<double> profits) {
    if (profits.size() != inst.weights.size()) throw std::invalid_argument("profit vector length mismatch");
    return PricingProblem{std::move(profits), inst.weights, inst.capacity, inst.conflicts, {}, {}};
  }
};

struct PricingSolution {
  std::vector<int> items;  // original item indices, sorted
  double profit = 0.0;
  double reduced_cost = 1.0;

  friend bool operator==(const PricingSolution&, const PricingSolution&) = default;
};

// PricingProblem with merged groups contracted into super-items and
// unusable items dropped. Every sampler and the exact search work here.
//
// A super-item is dropped when it holds a forbidden item, when its members
// conflict with each other, or when it does not fit in an empty bin.
class ReducedProblem {
 public:
  ReducedProblem() = default;

  explicit ReducedProblem(const PricingProblem& p) : capacity_(p.capacity), n_original_(p.size()) {
    const int n = p.size();
    if (static_cast<int>(p.profits.size()) != n || p.conflicts.size() != n)
      throw std::invalid_argument("pricing problem vectors disagree in length");

    std::vector<int> group_of(static_cast<std::size_t>(n), -1);
    std::vector<std::vector<int>> groups;
    for (const auto& g : p.merged_groups) {
      if (g.empty()) continue;
      std::vector<int> sorted = g;
      std::sort(sorted.begin(), sorted.end());
      for (int i : sorted) {
        if (i < 0 || i >= n) throw std::invalid_argument("merged group index out of range");
        if (group_of[i] != -1) throw std::invalid_argument("item appears in two merged groups");
        group_of[i] = static_cast<int>(groups.size());
      }
      groups.push_back(std::move(sorted));
    }
    for (int i = 0; i < n; ++i)
      if (group_of[i] == -1) {
        group_of[i] = static_cast<int>(groups.size());
        groups.push_back({i});
      }
    // Order super-items by smallest member so the identity contraction keeps
    // original indices.
    std::vector<int> order(groups.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return groups[a].front() < groups[b].front(); });

    std::vector<char> forbidden(static_cast<std::size_t>(n), 0);
    for (int i : p.forbidden_items) {
      if (i < 0 || i >= n) throw std::invalid_argument("forbidden item index out of range");
      forbidden[i] = 1;
    }

    std::vector<int> super_of_group(groups.size(), -1);
    for (int g : order) {
      const auto& members = groups[g];
      Weight w = 0;
      bool usable = true;
      for (std::size_t a = 0; a < members.size() && usable; ++a) {
        w += p.weights[members[a]];
        if (forbidden[members[a]]) usable = false;
        for (std::size_t b = a + 1; b < members.size() && usable; ++b)
          if (p.conflicts.adjacent(members[a], members[b])) usable = false;
      }
      if (!usable || w > capacity_) continue;
      super_of_group[g] = static_cast<int>(members_.size());
      members_.push_back(members);
      weights_.push_back(w);
    }
    const int m = size();
    original_to_super_.assign(static_cast<std::size_t>(n), -1);
    for (int s = 0; s < m; ++s)
      for (int i : members_[s]) original_to_super_[i] = s;

    std::vector<std::pair<int, int>> edges;
    for (int s = 0; s < m; ++s)
      for (int i : members_[s])
        for (int j : p.conflicts.neighbors(i)) {
          const int t = original_to_super_[j];
          if (t > s) edges.emplace_back(s, t);
        }
    graph_ = ConflictGraph::from_edges(m, edges);
    profits_.assign(static_cast<std::size_t>(m), 0.0);
    set_profits(p.profits);
  }

  // Re-prices super-items from per-original-item profits.
  void set_profits(const std::vector<double>& original_profits) {
    if (static_cast<int>(original_profits.size()) != n_original_) throw std::invalid_argument("profit vector length mismatch");
    for (int s = 0; s < size(); ++s) {
      double sum = 0.0;
      for (int i : members_[s]) sum += original_profits[i];
      profits_[s] = sum;
    }
  }

  int size() const { return static_cast<int>(members_.size()); }
  int original_size() const { return n_original_; }
  Weight capacity() const { return capacity_; }
  double profit(int s) const { return profits_[s]; }
  Weight weight(int s) const { return weights_[s]; }
  const std::vector<double>& profits() const { return profits_; }
  const std::vector<Weight>& weights() const { return weights_; }
  const ConflictGraph& graph() const { return graph_; }
  const std::vector<int>& members(int s) const { return members_[s]; }
  // -1 when the original item cannot be part of any pattern.
  int super_of(int original) const { return original_to_super_[original]; }

  // Maps a set of super-items to a solution over original items.
  // Profit is summed in ascending super-item order, so it does not depend
  // on the order of `selection`.
  PricingSolution expand(std::vector<int> selection) const {
    std::sort(selection.begin(), selection.end());
    PricingSolution sol;
    for (int s : selection) {
      sol.items.insert(sol.items.end(), members_[s].begin(), members_[s].end());
      sol.profit += profits_[s];
    }
    std::sort(sol.items.begin(), sol.items.end());
    sol.reduced_cost = 1.0 - sol.profit;
    return sol;
  }

  double selection_profit(const std::vector<int>& selection) const {
    double sum = 0.0;
    for (int s : selection) sum += profits_[s];
    return sum;
  }

  // Checks capacity and pairwise conflicts of a selection of super-items.
  bool feasible(const std::vector<int>& selection) const {
    Weight load = 0;
    for (std::size_t a = 0; a < selection.size(); ++a) {
      load += weights_[selection[a]];
      for (std::size_t b = a + 1; b < selection.size(); ++b)
        if (selection[a] == selection[b] || graph_.adjacent(selection[a], selection[b])) return false;
    }
    return load <= capacity_;
  }

 private:
  Weight capacity_ = 0;
  int n_original_ = 0;
  std::vector<std::vector<int>> members_;
  std::vector<Weight> weights_;
  std::vector<double> profits_;
  std::vector<int> original_to_super_;
  ConflictGraph graph_;
};

// Checks a solution over original items against every constraint of the
// pricing problem, including forbidden items and merged groups.
inline bool satisfies_pricing_constraints(const PricingProblem& p, const std::vector<int>& items) {
  Weight load = 0;
  std::vector<char> in(static_cast<std::size_t>(p.size()), 0);
  for (int i : items) {
    if (i < 0 || i >= p.size() || in[i]) return false;
    in[i] = 1;
    load += p.weights[i];
  }
  if (load > p.capacity) return false;
  for (int i : p.forbidden_items)
    if (in[i]) return false;
  for (const auto& g : p.merged_groups) {
    if (g.empty()) continue;
    const char first = in[g.front()];
    for (int i : g)
      if (in[i] != first) return false;
  }
  for (int i : items)
    for (int j : p.conflicts.neighbors(i))
      if (in[j]) return false;
  return true;
}

}  // namespace bppc
