#pragma once

// Revised primal simplex for the restricted master problem
//
//   min  sum_P z_P   s.t.  sum_{P contains i} z_P >= 1  for every item i,  z >= 0.
//
// Rows carry a surplus variable s_i (column -e_i, cost 0) and an artificial
// a_i (column +e_i, cost kArtificialCost). The artificials give a feasible
// cold-start basis; whenever item i is covered by some pattern the dual
// constraint pi_i <= 1 makes a_i strictly unattractive, so artificials are
// zero at every optimum of a coverable RMP. A positive artificial at the
// optimum therefore certifies an uncovered item.
//
// The basis inverse is dense (n x n) with product-form row updates and a
// Gauss-Jordan refactorization every kRefactorInterval pivots. Entering
// variables use Dantzig's rule; after kDegenerateBudget consecutive
// degenerate pivots the solver switches to Bland's rule until it makes
// progress again.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace bppc {

inline constexpr double kFeasTol = 1e-9;
inline constexpr double kGapTol = 1e-7;

struct Column {
  std::vector<int> items;  // sorted, non-empty
  std::int64_t id = 0;
};

// 1 - sum of duals over the pattern.
inline double reduced_cost(const std::vector<int>& items, const std::vector<double>& duals) {
  double s = 0.0;
  for (int i : items) s += duals[i];
  return 1.0 - s;
}
inline double reduced_cost(const Column& c, const std::vector<double>& duals) { return reduced_cost(c.items, duals); }

enum class LpStatus { Optimal, Infeasible };

// Self-check quantities of an optimal solve.
struct LpCertificate {
  double primal_infeasibility = 0.0;  // max_i max(0, 1 - coverage_i)
  double dual_infeasibility = 0.0;    // max_v max(0, -reduced_cost_v)
  double complementary_slackness = 0.0;  // max_v |x_v * reduced_cost_v|
  double duality_gap = 0.0;           // |primal objective - dual objective|
  double dual_objective = 0.0;

  bool ok(double objective) const {
    return primal_infeasibility <= kFeasTol * 10 && dual_infeasibility <= kFeasTol * 10 &&
           complementary_slackness <= kGapTol && duality_gap <= kGapTol * (1.0 + std::abs(objective));
  }
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> primal;  // one value per input column
  std::vector<double> duals;   // one value per item, >= 0
  LpCertificate certificate;
  std::vector<int> uncovered;  // items with no covering column (Infeasible)
  int pivots = 0;
  bool warm_started = false;
};

// Identifies the basic variables of an optimal basis so that a later solve
// over a superset of columns can start from it.
struct BasisToken {
  enum class Kind : std::uint8_t { Surplus, Artificial, Pattern };
  struct Entry {
    Kind kind;
    std::int64_t key;  // item index, or column id for patterns
  };
  std::vector<Entry> basic;
  bool empty() const { return basic.empty(); }
};

class LpCertificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

class RevisedSimplex {
 public:
  static constexpr double kArtificialCost = 10.0;
  static constexpr int kRefactorInterval = 64;
  static constexpr int kDegenerateBudget = 50;
  static constexpr double kPivotTol = 1e-9;

  RevisedSimplex(const std::vector<Column>& columns, int n) : cols_(columns), n_(n), m_(static_cast<int>(columns.size())) {}

  int num_vars() const { return 2 * n_ + m_; }

  double cost(int v) const {
    if (v < n_) return 0.0;
    if (v < 2 * n_) return kArtificialCost;
    return 1.0;
  }

  // Dot product of column v with a dense row vector.
  double dot(int v, const double* row) const {
    if (v < n_) return -row[v];
    if (v < 2 * n_) return row[v - n_];
    double s = 0.0;
    for (int i : cols_[v - 2 * n_].items) s += row[i];
    return s;
  }

  void cold_start() {
    basis_.resize(n_);
    for (int i = 0; i < n_; ++i) basis_[i] = n_ + i;
    binv_.assign(static_cast<std::size_t>(n_) * n_, 0.0);
    for (int i = 0; i < n_; ++i) at(i, i) = 1.0;
    x_.assign(n_, 1.0);
  }

  bool warm_start(const BasisToken& token) {
    if (static_cast<int>(token.basic.size()) != n_) return false;
    std::unordered_map<std::int64_t, int> by_id;
    by_id.reserve(cols_.size());
    for (int j = 0; j < m_; ++j) by_id.emplace(cols_[j].id, j);
    basis_.resize(n_);
    std::vector<char> seen(num_vars(), 0);
    for (int k = 0; k < n_; ++k) {
      const auto& e = token.basic[k];
      int v = -1;
      switch (e.kind) {
        case BasisToken::Kind::Surplus:
          if (e.key >= 0 && e.key < n_) v = static_cast<int>(e.key);
          break;
        case BasisToken::Kind::Artificial:
          if (e.key >= 0 && e.key < n_) v = n_ + static_cast<int>(e.key);
          break;
        case BasisToken::Kind::Pattern: {
          auto it = by_id.find(e.key);
          if (it != by_id.end()) v = 2 * n_ + it->second;
          break;
        }
      }
      if (v < 0 || seen[v]) return false;
      seen[v] = 1;
      basis_[k] = v;
    }
    if (!refactor()) return false;
    for (double xv : x_)
      if (xv < -kFeasTol) return false;
    return true;
  }

  // Rebuilds B^-1 from the basis and recomputes x_B = B^-1 * 1.
  bool refactor() {
    const int n = n_;
    std::vector<double> b(static_cast<std::size_t>(n) * n, 0.0);
    for (int k = 0; k < n; ++k) {
      const int v = basis_[k];
      if (v < n) {
        b[static_cast<std::size_t>(v) * n + k] = -1.0;
      } else if (v < 2 * n) {
        b[static_cast<std::size_t>(v - n) * n + k] = 1.0;
      } else {
        for (int i : cols_[v - 2 * n].items) b[static_cast<std::size_t>(i) * n + k] = 1.0;
      }
    }
    binv_.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) at(i, i) = 1.0;
    // Gauss-Jordan with partial pivoting on [B | I].
    std::vector<int> row_perm(n);
    for (int c = 0; c < n; ++c) {
      int piv = -1;
      double best = 1e-11;
      for (int r = c; r < n; ++r) {
        const double a = std::abs(b[static_cast<std::size_t>(r) * n + c]);
        if (a > best) {
          best = a;
          piv = r;
        }
      }
      if (piv < 0) return false;
      if (piv != c) {
        for (int j = 0; j < n; ++j) {
          std::swap(b[static_cast<std::size_t>(piv) * n + j], b[static_cast<std::size_t>(c) * n + j]);
          std::swap(at(piv, j), at(c, j));
        }
      }
      const double inv = 1.0 / b[static_cast<std::size_t>(c) * n + c];
      for (int j = 0; j < n; ++j) {
        b[static_cast<std::size_t>(c) * n + j] *= inv;
        at(c, j) *= inv;
      }
      for (int r = 0; r < n; ++r) {
        if (r == c) continue;
        const double f = b[static_cast<std::size_t>(r) * n + c];
        if (f == 0.0) continue;
        for (int j = 0; j < n; ++j) {
          b[static_cast<std::size_t>(r) * n + j] -= f * b[static_cast<std::size_t>(c) * n + j];
          at(r, j) -= f * at(c, j);
        }
      }
    }
    x_.assign(n, 0.0);
    for (int k = 0; k < n; ++k) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) s += at(k, j);
      x_[k] = std::abs(s) < 1e-13 ? 0.0 : s;
    }
    since_refactor_ = 0;
    return true;
  }

  std::vector<double> compute_duals() const {
    std::vector<double> pi(n_, 0.0);
    for (int k = 0; k < n_; ++k) {
      const double c = cost(basis_[k]);
      if (c == 0.0) continue;
      for (int j = 0; j < n_; ++j) pi[j] += c * at(k, j);
    }
    return pi;
  }

  void run() {
    std::vector<char> is_basic;
    const long max_pivots = 100L * (num_vars() + 10);
    int degenerate_run = 0;
    bool bland = false;
    bool fresh = true;  // true right after a refactorization
    std::vector<double> u(n_);
    while (true) {
      if (pivots_ > max_pivots) throw std::runtime_error("simplex pivot limit exceeded");
      const auto pi = compute_duals();
      is_basic.assign(num_vars(), 0);
      for (int v : basis_) is_basic[v] = 1;
      int enter = -1;
      double best = -kFeasTol;
      for (int v = 0; v < num_vars(); ++v) {
        if (is_basic[v]) continue;
        const double d = cost(v) - dot(v, pi.data());
        if (bland) {
          if (d < -kFeasTol) {
            enter = v;
            break;
          }
        } else if (d < best) {
          best = d;
          enter = v;
        }
      }
      if (enter < 0) {
        if (fresh) return;
        if (!refactor()) throw std::runtime_error("singular basis during refactorization");
        fresh = true;
        continue;
      }
      // u = B^-1 a_enter
      for (int k = 0; k < n_; ++k) u[k] = dot(enter, &binv_[static_cast<std::size_t>(k) * n_]);
      int leave = -1;
      double ratio = std::numeric_limits<double>::infinity();
      for (int k = 0; k < n_; ++k) {
        if (u[k] <= kPivotTol) continue;
        const double t = std::max(x_[k], 0.0) / u[k];
        if (leave < 0 || t < ratio - 1e-12) {
          ratio = t;
          leave = k;
        } else if (t <= ratio + 1e-12) {
          const bool better = bland ? basis_[k] < basis_[leave] : u[k] > u[leave];
          if (better) {
            ratio = std::min(ratio, t);
            leave = k;
          }
        }
      }
      if (leave < 0) throw std::logic_error("covering LP reported unbounded");
      pivot(leave, enter, u, ratio);
      fresh = false;
      if (ratio <= kFeasTol) {
        if (++degenerate_run > kDegenerateBudget) bland = true;
      } else {
        degenerate_run = 0;
        bland = false;
      }
      if (since_refactor_ >= kRefactorInterval) {
        if (!refactor()) throw std::runtime_error("singular basis during refactorization");
        fresh = true;
      }
    }
  }

  void pivot(int r, int q, const std::vector<double>& u, double t) {
    for (int k = 0; k < n_; ++k) x_[k] -= t * u[k];
    x_[r] = t;
    for (int k = 0; k < n_; ++k)
      if (std::abs(x_[k]) < 1e-13) x_[k] = 0.0;
    const double inv = 1.0 / u[r];
    double* row_r = &binv_[static_cast<std::size_t>(r) * n_];
    for (int j = 0; j < n_; ++j) row_r[j] *= inv;
    for (int k = 0; k < n_; ++k) {
      if (k == r || u[k] == 0.0) continue;
      double* row_k = &binv_[static_cast<std::size_t>(k) * n_];
      const double f = u[k];
      for (int j = 0; j < n_; ++j) row_k[j] -= f * row_r[j];
    }
    basis_[r] = q;
    ++pivots_;
    ++since_refactor_;
  }

  const std::vector<int>& basis() const { return basis_; }
  const std::vector<double>& x() const { return x_; }
  int pivots() const { return pivots_; }

 private:
  double& at(int r, int c) { return binv_[static_cast<std::size_t>(r) * n_ + c]; }
  double at(int r, int c) const { return binv_[static_cast<std::size_t>(r) * n_ + c]; }

  const std::vector<Column>& cols_;
  int n_;
  int m_;
  std::vector<int> basis_;
  std::vector<double> binv_;
  std::vector<double> x_;
  int pivots_ = 0;
  int since_refactor_ = 0;
};

}  // namespace detail

struct RmpResult {
  LpSolution solution;
  BasisToken basis;
};

// Solves the covering LP over `columns`. Uncovered items yield status
// Infeasible (listed in solution.uncovered). Throws LpCertificationError if
// an optimal solve fails its own primal/dual/slackness/gap checks.
inline RmpResult solve_rmp(const std::vector<Column>& columns, int n_items, const BasisToken* warm_basis = nullptr) {
  RmpResult out;
  LpSolution& sol = out.solution;
  std::vector<char> covered(static_cast<std::size_t>(n_items), 0);
  for (const auto& c : columns) {
    if (c.items.empty()) throw std::invalid_argument("empty column");
    for (int i : c.items) {
      if (i < 0 || i >= n_items) throw std::invalid_argument("column item out of range");
      covered[i] = 1;
    }
  }
  for (int i = 0; i < n_items; ++i)
    if (!covered[i]) sol.uncovered.push_back(i);
  sol.primal.assign(columns.size(), 0.0);
  if (!sol.uncovered.empty()) {
    sol.status = LpStatus::Infeasible;
    return out;
  }
  if (n_items == 0) {
    sol.status = LpStatus::Optimal;
    return out;
  }

  detail::RevisedSimplex lp(columns, n_items);
  if (warm_basis && !warm_basis->empty() && lp.warm_start(*warm_basis)) {
    sol.warm_started = true;
  } else {
    lp.cold_start();
  }
  lp.run();
  sol.pivots = lp.pivots();

  const int n = n_items;
  const auto& basis = lp.basis();
  const auto& x = lp.x();
  std::vector<double> value(static_cast<std::size_t>(lp.num_vars()), 0.0);
  for (int k = 0; k < n; ++k) value[basis[k]] = std::max(x[k], 0.0);

  const auto pi = lp.compute_duals();
  double artificial = 0.0;
  for (int i = 0; i < n; ++i) artificial += value[n + i];
  if (artificial > kFeasTol) {
    // Cannot happen when every item is covered; kept as a guard.
    sol.status = LpStatus::Infeasible;
    for (int i = 0; i < n; ++i)
      if (value[n + i] > kFeasTol) sol.uncovered.push_back(i);
    return out;
  }

  sol.status = LpStatus::Optimal;
  sol.duals.resize(n);
  for (int i = 0; i < n; ++i) sol.duals[i] = std::max(pi[i], 0.0);
  double obj = 0.0;
  for (std::size_t j = 0; j < columns.size(); ++j) {
    sol.primal[j] = value[2 * n + j];
    obj += sol.primal[j];
  }
  sol.objective = obj;

  LpCertificate& cert = sol.certificate;
  std::vector<double> coverage(n, 0.0);
  for (std::size_t j = 0; j < columns.size(); ++j)
    for (int i : columns[j].items) coverage[i] += sol.primal[j];
  for (int i = 0; i < n; ++i) cert.primal_infeasibility = std::max(cert.primal_infeasibility, 1.0 - coverage[i]);
  for (int v = 0; v < lp.num_vars(); ++v) {
    const double d = lp.cost(v) - lp.dot(v, pi.data());
    cert.dual_infeasibility = std::max(cert.dual_infeasibility, -d);
    cert.complementary_slackness = std::max(cert.complementary_slackness, std::abs(value[v] * d));
  }
  for (int i = 0; i < n; ++i) cert.dual_objective += pi[i];
  cert.duality_gap = std::abs(obj - cert.dual_objective);
  if (!cert.ok(obj))
    throw LpCertificationError("RMP certificate violated: primal " + std::to_string(cert.primal_infeasibility) +
                               ", dual " + std::to_string(cert.dual_infeasibility) + ", slackness " +
                               std::to_string(cert.complementary_slackness) + ", gap " +
                               std::to_string(cert.duality_gap));

  out.basis.basic.reserve(n);
  for (int k = 0; k < n; ++k) {
    const int v = basis[k];
    if (v < n)
      out.basis.basic.push_back({BasisToken::Kind::Surplus, v});
    else if (v < 2 * n)
      out.basis.basic.push_back({BasisToken::Kind::Artificial, v - n});
    else
      out.basis.basic.push_back({BasisToken::Kind::Pattern, columns[v - 2 * n].id});
  }
  return out;
}

// Plain-text dump of an RMP and its solution:
//   rmp <n_items> <n_columns> <status> <objective>
//   col <id> <value> <reduced_cost> : <item> <item> ...
//   dual <item> <value>
inline void write_lp_dump(std::ostream& out, const std::vector<Column>& columns, int n_items, const LpSolution& sol) {
  const auto prec = out.precision(17);
  out << "rmp " << n_items << ' ' << columns.size() << ' '
      << (sol.status == LpStatus::Optimal ? "optimal" : "infeasible") << ' ' << sol.objective << '\n';
  for (std::size_t j = 0; j < columns.size(); ++j) {
    out << "col " << columns[j].id << ' ' << (j < sol.primal.size() ? sol.primal[j] : 0.0) << ' '
        << (sol.duals.empty() ? 1.0 : reduced_cost(columns[j], sol.duals)) << " :";
    for (int i : columns[j].items) out << ' ' << i;
    out << '\n';
  }
  for (std::size_t i = 0; i < sol.duals.size(); ++i) out << "dual " << i << ' ' << sol.duals[i] << '\n';
  out.precision(prec);
}

}  // namespace bppc
