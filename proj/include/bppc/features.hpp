#pragma once

// Per-item features of a pricing problem: four problem features and two
// statistics over a set of sampled solutions.

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <vector>

#include "bppc/pricing_problem.hpp"

namespace bppc {

inline constexpr int kNumFeatures = 6;

struct FeatureVector {
  double f1 = 0.0;  // profit, min-max normalized
  double f2 = 0.0;  // profit per unit weight
  double f3 = 0.0;  // conflict degree, min-max normalized
  double f4 = 0.0;  // own profit plus profits of non-conflicting items
  double fc = 0.0;  // correlation of membership with sample objective
  double fr = 0.0;  // accumulated reciprocal rank of containing samples

  std::array<double, kNumFeatures> as_array() const { return {f1, f2, f3, f4, fc, fr}; }
  static FeatureVector from_array(const std::array<double, kNumFeatures>& a) {
    return {a[0], a[1], a[2], a[3], a[4], a[5]};
  }
};

inline const std::array<const char*, kNumFeatures> kFeatureNames = {"f1", "f2", "f3", "f4", "fc", "fr"};

// Which features get an instance-wise min-max rescale after computation.
// f1 and f3 are normalized by definition; fc already lies in [-1, 1].
struct NormalizationPolicy {
  std::array<bool, kNumFeatures> instance_minmax = {true, true, true, true, false, true};
  friend bool operator==(const NormalizationPolicy&, const NormalizationPolicy&) = default;
};

// A sampled solution as super-item indices of a ReducedProblem.
using Selection = std::vector<int>;

namespace detail {

// Maps values to [0, 1] by min-max; a constant vector maps to 0.
inline void minmax_normalize(std::vector<double>& v) {
  if (v.empty()) return;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const double a = *lo, b = *hi;
  if (!(b > a)) {
    std::fill(v.begin(), v.end(), 0.0);
    return;
  }
  for (double& x : v) x = (x - a) / (b - a);
}

// 1-based descending ranks; equal objectives share the smallest rank of
// their block (competition ranking).
inline std::vector<int> competition_ranks(const std::vector<double>& objectives) {
  const std::size_t n = objectives.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return objectives[a] > objectives[b]; });
  std::vector<int> rank(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0 && objectives[idx[k]] == objectives[idx[k - 1]])
      rank[idx[k]] = rank[idx[k - 1]];
    else
      rank[idx[k]] = static_cast<int>(k) + 1;
  }
  return rank;
}

}  // namespace detail

// Pearson correlation between each item's membership indicator and the
// sample objectives. Uses sum_n (s_i^n - mean_s)(o^n - mean_o)
// = sum_{n contains i} (o^n - mean_o) and var(s_i) * N = k - k^2 / N.
// Zero variance on either side gives 0.
inline std::vector<double> membership_correlation(int n_items, const std::vector<Selection>& samples,
                                                  const std::vector<double>& objectives) {
  std::vector<double> fc(static_cast<std::size_t>(n_items), 0.0);
  const std::size_t N = samples.size();
  if (N < 2) return fc;
  const double mean_o = std::accumulate(objectives.begin(), objectives.end(), 0.0) / static_cast<double>(N);
  double ss_o = 0.0;
  for (double o : objectives) ss_o += (o - mean_o) * (o - mean_o);
  if (!(ss_o > 0.0)) return fc;
  std::vector<double> cov(static_cast<std::size_t>(n_items), 0.0);
  std::vector<double> count(static_cast<std::size_t>(n_items), 0.0);
  for (std::size_t n = 0; n < N; ++n)
    for (int i : samples[n]) {
      cov[i] += objectives[n] - mean_o;
      count[i] += 1.0;
    }
  const double dn = static_cast<double>(N);
  for (int i = 0; i < n_items; ++i) {
    const double ss_s = count[i] - count[i] * count[i] / dn;
    if (!(ss_s > 1e-12)) continue;
    fc[i] = std::clamp(cov[i] / (std::sqrt(ss_s) * std::sqrt(ss_o)), -1.0, 1.0);
  }
  return fc;
}

// Features for every super-item of `problem`, computed from `samples`
// (typically n random samples) and then rescaled per `policy`.
inline std::vector<FeatureVector> extract_features(const ReducedProblem& problem, const std::vector<Selection>& samples,
                                                   const NormalizationPolicy& policy = {}) {
  const int n = problem.size();
  std::vector<FeatureVector> out(static_cast<std::size_t>(n));
  if (n == 0) return out;
  std::array<std::vector<double>, kNumFeatures> cols;
  for (auto& c : cols) c.assign(static_cast<std::size_t>(n), 0.0);

  const double total = std::accumulate(problem.profits().begin(), problem.profits().end(), 0.0);
  for (int i = 0; i < n; ++i) {
    const double pi = problem.profit(i);
    cols[0][i] = pi;
    cols[1][i] = pi / static_cast<double>(problem.weight(i));
    cols[2][i] = static_cast<double>(problem.graph().degree(i));
    double conflicting = 0.0;
    for (int j : problem.graph().neighbors(i)) conflicting += problem.profit(j);
    cols[3][i] = total - conflicting;
  }

  std::vector<double> objectives;
  objectives.reserve(samples.size());
  for (const auto& s : samples) objectives.push_back(problem.selection_profit(s));
  cols[4] = membership_correlation(n, samples, objectives);

  const auto rank = detail::competition_ranks(objectives);
  for (std::size_t k = 0; k < samples.size(); ++k)
    for (int i : samples[k]) cols[5][i] += 1.0 / static_cast<double>(rank[k]);

  for (int f = 0; f < kNumFeatures; ++f)
    if (policy.instance_minmax[f]) detail::minmax_normalize(cols[f]);
  for (int i = 0; i < n; ++i) out[i] = FeatureVector{cols[0][i], cols[1][i], cols[2][i], cols[3][i], cols[4][i], cols[5][i]};
  return out;
}

}  // namespace bppc
