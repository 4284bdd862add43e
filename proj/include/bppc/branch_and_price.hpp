#pragma once

// Branch-and-price for bin packing with conflicts: best-first search over
// Ryan-Foster (together / apart) branches, column generation at every node,
// rounding incumbents, and gap reporting.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "bppc/cg_engine.hpp"

namespace bppc {

inline constexpr double kIntegralityTol = 1e-6;
inline constexpr double kBoundTol = 1e-6;

enum class BranchKind { Together, Apart };

struct BranchDecision {
  int i = 0;
  int j = 0;
  BranchKind kind = BranchKind::Together;
};

enum class NodeStatus { Open, PrunedBound, PrunedInfeasible, Branched, Integral };

inline const char* to_string(NodeStatus s) {
  switch (s) {
    case NodeStatus::Open: return "Open";
    case NodeStatus::PrunedBound: return "PrunedBound";
    case NodeStatus::PrunedInfeasible: return "PrunedInfeasible";
    case NodeStatus::Branched: return "Branched";
    case NodeStatus::Integral: return "Integral";
  }
  return "?";
}

struct BnpNode {
  int id = 0;
  int depth = 0;
  std::vector<BranchDecision> decisions;
  double parent_bound = 0.0;
  double lp_bound = 0.0;  // CG bound of this node once solved
  NodeStatus status = NodeStatus::Open;
};

enum class BnpStatus { Optimal, TimeLimit };

inline const char* to_string(BnpStatus s) { return s == BnpStatus::Optimal ? "Optimal" : "TimeLimit"; }

struct BnpResult {
  BnpStatus status = BnpStatus::TimeLimit;
  std::optional<int> incumbent_value;
  std::vector<Column> incumbent_patterns;
  double global_lower_bound = 0.0;
  double gap_percent = 100.0;
  std::size_t nodes_explored = 0;
  double root_lp_bound = 0.0;
  bool root_solved = false;
  double wall_time = 0.0;
  std::vector<BnpNode> nodes;  // every created node, by id
};

class InconsistentBranchError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Together-groups (union-find closure) and apart pairs implied by a path of
// decisions. Throws InconsistentBranchError when some apart pair falls
// inside one together-group.
inline NodeRestrictions restrictions_of(int n_items, const std::vector<BranchDecision>& decisions) {
  std::vector<int> parent(static_cast<std::size_t>(n_items));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& d : decisions) {
    if (d.i == d.j || d.i < 0 || d.j < 0 || d.i >= n_items || d.j >= n_items)
      throw std::invalid_argument("branch decision needs two distinct items");
    if (d.kind == BranchKind::Together) parent[find(d.i)] = find(d.j);
  }
  NodeRestrictions r;
  std::map<int, std::vector<int>> groups;
  for (int i = 0; i < n_items; ++i) groups[find(i)].push_back(i);
  for (auto& [root, members] : groups)
    if (members.size() > 1) r.together.push_back(members);
  std::sort(r.together.begin(), r.together.end());
  for (const auto& d : decisions)
    if (d.kind == BranchKind::Apart) {
      if (find(d.i) == find(d.j))
        throw InconsistentBranchError("items " + std::to_string(d.i) + " and " + std::to_string(d.j) +
                                      " are both together and apart");
      r.apart.emplace_back(std::min(d.i, d.j), std::max(d.i, d.j));
    }
  return r;
}

// Whether a pattern respects the branching restrictions (Apart: not both
// items; Together: all of a group or none of it).
class RestrictionFilter {
 public:
  RestrictionFilter(int n_items, const NodeRestrictions& r) : group_(static_cast<std::size_t>(n_items), -1), apart_(r.apart) {
    for (std::size_t g = 0; g < r.together.size(); ++g) {
      sizes_.push_back(r.together[g].size());
      for (int i : r.together[g]) group_[i] = static_cast<int>(g);
    }
  }

  bool allows(const std::vector<int>& items) const {
    for (auto [a, b] : apart_)
      if (std::binary_search(items.begin(), items.end(), a) && std::binary_search(items.begin(), items.end(), b))
        return false;
    if (sizes_.empty()) return true;
    std::vector<std::size_t> count(sizes_.size(), 0);
    for (int i : items)
      if (group_[i] >= 0) ++count[group_[i]];
    for (std::size_t g = 0; g < sizes_.size(); ++g)
      if (count[g] != 0 && count[g] != sizes_[g]) return false;
    return true;
  }

 private:
  std::vector<int> group_;
  std::vector<std::size_t> sizes_;
  std::vector<std::pair<int, int>> apart_;
};

// Child decision list; throws InconsistentBranchError if `decision`
// contradicts the path.
inline std::vector<BranchDecision> apply_branch(int n_items, const std::vector<BranchDecision>& path,
                                                const BranchDecision& decision) {
  auto child = path;
  child.push_back(decision);
  (void)restrictions_of(n_items, child);
  return child;
}

inline bool is_integral(const std::vector<double>& primal) {
  for (double z : primal)
    if (std::abs(z - std::round(z)) > kIntegralityTol) return false;
  return true;
}

// Ryan-Foster pair: among pairs sharing a fractional column, the one whose
// psi_ij = sum of z_P over columns holding both is fractional and closest to
// 0.5; ties go to the lexicographically smallest pair.
inline std::pair<int, int> select_branching_pair(const std::vector<Column>& columns, const std::vector<double>& primal) {
  std::map<std::pair<int, int>, double> psi;
  std::set<std::pair<int, int>> candidates;
  bool fractional = false;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const double z = primal[c];
    if (z <= kIntegralityTol) continue;
    const bool frac = std::abs(z - std::round(z)) > kIntegralityTol;
    fractional = fractional || frac;
    const auto& it = columns[c].items;
    for (std::size_t a = 0; a < it.size(); ++a)
      for (std::size_t b = a + 1; b < it.size(); ++b) {
        psi[{it[a], it[b]}] += z;
        if (frac) candidates.insert({it[a], it[b]});
      }
  }
  if (!fractional) throw std::logic_error("select_branching_pair called on an integral solution");
  std::optional<std::pair<int, int>> best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const auto& pr : candidates) {
    const double v = psi[pr];
    if (std::abs(v - std::round(v)) <= kIntegralityTol) continue;
    const double d = std::abs(v - 0.5);
    if (d < best_dist - 1e-12) {
      best_dist = d;
      best = pr;
    }
  }
  if (!best) throw std::logic_error("no fractional item pair in a fractional covering solution");
  return *best;
}

// Turns a set of selected patterns into a partition of all items: each item
// stays in the first pattern that holds it; leftovers become singletons.
inline std::vector<Column> to_partition(const std::vector<std::vector<int>>& patterns, int n_items) {
  std::vector<char> covered(static_cast<std::size_t>(n_items), 0);
  std::vector<Column> out;
  for (const auto& p : patterns) {
    std::vector<int> kept;
    for (int i : p)
      if (!covered[i]) {
        covered[i] = 1;
        kept.push_back(i);
      }
    if (!kept.empty()) out.push_back(Column{std::move(kept), static_cast<std::int64_t>(out.size())});
  }
  for (int i = 0; i < n_items; ++i)
    if (!covered[i]) out.push_back(Column{{i}, static_cast<std::int64_t>(out.size())});
  return out;
}

// Rounding heuristic: take positive columns by decreasing value, dropping
// already-covered items, then singletons for what remains.
inline std::vector<Column> round_solution(const std::vector<Column>& columns, const std::vector<double>& primal,
                                          int n_items) {
  std::vector<std::size_t> idx;
  for (std::size_t c = 0; c < columns.size(); ++c)
    if (primal[c] > kIntegralityTol) idx.push_back(c);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return primal[a] > primal[b]; });
  std::vector<std::vector<int>> chosen;
  for (std::size_t c : idx) chosen.push_back(columns[c].items);
  return to_partition(chosen, n_items);
}

inline constexpr const char* kNodeLogHeader = "node_id,depth,lp_bound,status,incumbent,gap,elapsed";

struct BnpOptions {
  std::optional<std::size_t> node_limit;
  std::ostream* node_log = nullptr;
};

inline BnpResult run_bnp(const Instance& inst, const CgConfig& cfg, const BnpOptions& opt = {}) {
  cfg.validate();
  const auto start = Clock::now();
  const auto deadline = start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(cfg.time_limit));
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };
  const int n = inst.n_items();

  BnpResult res;
  if (n == 0) {
    res.status = BnpStatus::Optimal;
    res.incumbent_value = 0;
    res.gap_percent = 0.0;
    return res;
  }
  // Valid bound before any LP is solved.
  const double trivial_bound =
      std::max(1.0, std::ceil(static_cast<double>(inst.total_weight()) / static_cast<double>(inst.capacity)));

  detail::ColumnPool pool;
  auto consider_incumbent = [&](std::vector<Column> patterns) {
    const int value = static_cast<int>(patterns.size());
    if (!res.incumbent_value || value < *res.incumbent_value) {
      res.incumbent_value = value;
      res.incumbent_patterns = std::move(patterns);
    }
  };
  auto prunable = [&](double bound) {
    return res.incumbent_value && std::ceil(bound - kBoundTol) >= *res.incumbent_value;
  };

  struct QueueEntry {
    double bound;
    int id;
    bool operator<(const QueueEntry& o) const {
      if (bound != o.bound) return bound > o.bound;
      return id > o.id;
    }
  };
  std::priority_queue<QueueEntry> open;
  auto effective_bound = [](const BnpNode& nd) {
    return nd.status == NodeStatus::Open ? nd.parent_bound : std::max(nd.lp_bound, nd.parent_bound);
  };
  auto lower_bound = [&]() {
    double lb = std::numeric_limits<double>::infinity();
    auto copy = open;
    while (!copy.empty()) {
      lb = std::min(lb, effective_bound(res.nodes[copy.top().id]));
      copy.pop();
    }
    if (res.incumbent_value) lb = std::min(lb, static_cast<double>(*res.incumbent_value));
    if (!std::isfinite(lb)) lb = trivial_bound;
    return lb;
  };
  auto gap_of = [&](double lb) {
    if (!res.incumbent_value) return 100.0;
    const double inc = *res.incumbent_value;
    return std::max(0.0, 100.0 * (inc - lb) / inc);
  };
  if (opt.node_log) *opt.node_log << kNodeLogHeader << '\n';
  auto log_node = [&](const BnpNode& nd) {
    if (!opt.node_log) return;
    *opt.node_log << nd.id << ',' << nd.depth << ',' << format_double(nd.lp_bound) << ',' << to_string(nd.status) << ','
                  << (res.incumbent_value ? std::to_string(*res.incumbent_value) : std::string("")) << ','
                  << format_double(gap_of(lower_bound())) << ',' << format_double(elapsed()) << '\n';
  };

  res.nodes.push_back(BnpNode{0, 0, {}, trivial_bound, trivial_bound, NodeStatus::Open});
  open.push({trivial_bound, 0});
  bool interrupted = false;

  while (!open.empty()) {
    if (Clock::now() > deadline || (opt.node_limit && res.nodes_explored >= *opt.node_limit)) {
      interrupted = true;
      break;
    }
    const int id = open.top().id;
    open.pop();
    BnpNode& node = res.nodes[id];
    if (prunable(node.parent_bound)) {
      node.status = NodeStatus::PrunedBound;
      node.lp_bound = node.parent_bound;
      log_node(node);
      continue;
    }
    ++res.nodes_explored;

    NodeRestrictions restr;
    try {
      restr = restrictions_of(n, node.decisions);
    } catch (const InconsistentBranchError&) {
      node.status = NodeStatus::PrunedInfeasible;
      log_node(node);
      continue;
    }
    // Seed: surviving pool columns plus a (super-)singleton per group.
    const RestrictionFilter filter(n, restr);
    std::vector<Column> seed;
    for (const auto& c : pool.columns())
      if (filter.allows(c.items)) seed.push_back(c);
    std::vector<char> grouped(static_cast<std::size_t>(n), 0);
    std::vector<std::vector<int>> units = restr.together;
    for (const auto& g : restr.together)
      for (int i : g) grouped[i] = 1;
    for (int i = 0; i < n; ++i)
      if (!grouped[i]) units.push_back({i});
    bool unit_infeasible = false;
    std::int64_t next_id = pool.size() + 1'000'000'000LL;
    std::set<std::vector<int>> seeded;
    for (const auto& c : seed) seeded.insert(c.items);
    for (const auto& u : units) {
      if (!is_feasible_pattern(inst, u)) {
        unit_infeasible = true;
        break;
      }
      if (seeded.insert(u).second) seed.push_back(Column{u, next_id++});
    }
    if (unit_infeasible) {
      node.status = NodeStatus::PrunedInfeasible;
      log_node(node);
      continue;
    }

    CgConfig node_cfg = cfg;
    node_cfg.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(id));
    CgRunOptions cg_opt;
    cg_opt.restrictions = restr;
    cg_opt.initial_columns = std::move(seed);
    cg_opt.deadline = deadline;
    const CgResult cg = run_cg(inst, node_cfg, cg_opt);

    for (const auto& c : cg.final_columns) pool.add(c.items);
    if (cg.status == CgStatus::Infeasible) {
      node.status = NodeStatus::PrunedInfeasible;
      log_node(node);
      continue;
    }
    // Any RMP solution rounds to a feasible packing, converged or not.
    consider_incumbent(round_solution(cg.final_columns, cg.final_primal, n));
    if (cg.status == CgStatus::TimeLimit) {
      // Bound unknown: the node stays open with its parent's bound.
      open.push({node.parent_bound, id});
      interrupted = true;
      break;
    }
    node.lp_bound = cg.lp_objective;
    if (id == 0) {
      res.root_lp_bound = cg.lp_objective;
      res.root_solved = true;
    }

    if (is_integral(cg.final_primal)) {
      std::vector<std::vector<int>> chosen;
      for (std::size_t c = 0; c < cg.final_columns.size(); ++c)
        if (cg.final_primal[c] > 0.5) chosen.push_back(cg.final_columns[c].items);
      consider_incumbent(to_partition(chosen, n));
      node.status = NodeStatus::Integral;
      log_node(node);
      continue;
    }
    if (prunable(effective_bound(node))) {
      node.status = NodeStatus::PrunedBound;
      log_node(node);
      continue;
    }
    const auto [i, j] = select_branching_pair(cg.final_columns, cg.final_primal);
    node.status = NodeStatus::Branched;
    const double child_bound = effective_bound(node);
    const auto decisions = node.decisions;
    const int depth = node.depth;
    for (BranchKind kind : {BranchKind::Together, BranchKind::Apart}) {
      BnpNode child;
      child.id = static_cast<int>(res.nodes.size());
      child.depth = depth + 1;
      child.decisions = decisions;
      child.decisions.push_back({i, j, kind});
      child.parent_bound = child_bound;
      child.lp_bound = child_bound;
      res.nodes.push_back(child);
      open.push({child_bound, child.id});
    }
    // Logged once the children are open so the bound still covers the subtree.
    log_node(res.nodes[id]);
  }

  res.status = interrupted ? BnpStatus::TimeLimit : BnpStatus::Optimal;
  if (res.status == BnpStatus::Optimal && res.incumbent_value) {
    res.global_lower_bound = *res.incumbent_value;
    res.gap_percent = 0.0;
  } else {
    res.global_lower_bound = lower_bound();
    res.gap_percent = gap_of(res.global_lower_bound);
  }
  res.wall_time = elapsed();
  return res;
}

// Exhaustive item-to-bin assignment (item k may open at most one new bin).
// Test oracle for n <= 10.
inline int brute_force_ip(const Instance& inst) {
  const int n = inst.n_items();
  if (n > 10) throw std::invalid_argument("brute_force_ip refuses n > 10");
  if (n == 0) return 0;
  std::vector<Weight> load;
  std::vector<std::vector<int>> bins;
  int best = n;
  auto recurse = [&](auto&& self, int k) -> void {
    if (static_cast<int>(bins.size()) >= best) return;
    if (k == n) {
      best = static_cast<int>(bins.size());
      return;
    }
    for (std::size_t b = 0; b < bins.size(); ++b) {
      if (load[b] + inst.weights[k] > inst.capacity) continue;
      bool clash = false;
      for (int j : bins[b])
        if (inst.conflicts.adjacent(j, k)) {
          clash = true;
          break;
        }
      if (clash) continue;
      load[b] += inst.weights[k];
      bins[b].push_back(k);
      self(self, k + 1);
      bins[b].pop_back();
      load[b] -= inst.weights[k];
    }
    load.push_back(inst.weights[k]);
    bins.push_back({k});
    self(self, k + 1);
    bins.pop_back();
    load.pop_back();
  };
  recurse(recurse, 0);
  return best;
}

}  // namespace bppc
