#pragma once

// Sampling-based pricing: uniform random construction, per-item seeded
// ("diversity-aware") sweeps over the ant-colony selection rule, pheromone
// updates, and the ACO / fixed-distribution / ML-initialized strategies.

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "bppc/features.hpp"
#include "bppc/linear_model.hpp"
#include "bppc/pricing_exact.hpp"
#include "bppc/rng.hpp"

namespace bppc {

inline constexpr double kTauMin = 1e-6;
inline constexpr double kPredictionFloor = 1e-6;

struct AcoConfig {
  double alpha = 1.0;
  double beta = 1.0;
  // Evaporation: tau <- (1 - rho) tau + deposits. With rho_is_persistence
  // the update reads tau <- rho tau + deposits instead.
  double rho = 0.95;
  bool rho_is_persistence = false;
  double lambda = 1.0;
  int iterations = 10;
  std::optional<int> population;  // default: number of usable items
  double rc_threshold = -1e-6;
  bool diversity_sampling = true;

  void validate() const {
    if (alpha < 0 || beta < 0) throw std::invalid_argument("alpha and beta must be >= 0");
    if (!(rho > 0 && rho <= 1)) throw std::invalid_argument("rho must be in (0, 1]");
    if (!(lambda > 0)) throw std::invalid_argument("lambda must be > 0");
    if (iterations < 1) throw std::invalid_argument("ACO iterations must be >= 1");
    if (population && *population < 1) throw std::invalid_argument("population must be >= 1");
  }
};

struct AcoState {
  std::vector<double> tau;
  std::vector<double> eta;
  double c_best = 0.0;
  std::vector<int> best_solution;  // super-item indices

  static AcoState uniform(int n) { return {std::vector<double>(n, 1.0), std::vector<double>(n, 1.0), 0.0, {}}; }
};

enum class StrategyKind { PlainAco, Mlph, MlacoPredictedEta, MlacoPredHeuEta, MlacoPredictedTau };

inline bool needs_model(StrategyKind k) { return k != StrategyKind::PlainAco; }

inline const char* to_string(StrategyKind k) {
  switch (k) {
    case StrategyKind::PlainAco: return "aco";
    case StrategyKind::Mlph: return "mlph";
    case StrategyKind::MlacoPredictedEta: return "mlaco";
    case StrategyKind::MlacoPredHeuEta: return "mlaco-pred-heu-eta";
    case StrategyKind::MlacoPredictedTau: return "mlaco-pred-tau";
  }
  return "?";
}

namespace detail {

// Selection weight tau^alpha * eta^beta per item.
inline std::vector<double> selection_weights(const AcoState& s, const AcoConfig& cfg) {
  std::vector<double> w(s.tau.size());
  for (std::size_t j = 0; j < w.size(); ++j) w[j] = std::pow(s.tau[j], cfg.alpha) * std::pow(s.eta[j], cfg.beta);
  return w;
}

// Draws one candidate proportionally to its weight; uniform when every
// candidate weight is zero.
inline int draw(const std::vector<int>& candidates, const std::vector<double>* weights, Rng& rng) {
  if (weights) {
    double total = 0.0;
    for (int c : candidates) total += (*weights)[c];
    if (total > 0.0) {
      const double r = rng.uniform() * total;
      double cum = 0.0;
      int last_positive = -1;
      for (int c : candidates) {
        const double w = (*weights)[c];
        if (w <= 0.0) continue;
        cum += w;
        last_positive = c;
        if (cum > r) return c;
      }
      return last_positive;
    }
  }
  return candidates[rng.below(candidates.size())];
}

// Builds one maximal feasible selection. Starts from `seed` when given,
// then repeatedly draws from the candidates (items that fit the remaining
// capacity and conflict with nothing selected) until none remain.
inline Selection construct(const ReducedProblem& p, const std::vector<double>* weights, std::optional<int> seed,
                           Rng& rng) {
  const int n = p.size();
  std::vector<char> excluded(static_cast<std::size_t>(n), 0);
  Weight remaining = p.capacity();
  Selection sel;
  std::vector<int> candidates;
  candidates.reserve(n);
  auto take = [&](int s) {
    sel.push_back(s);
    remaining -= p.weight(s);
    excluded[s] = 1;
    for (int t : p.graph().neighbors(s)) excluded[t] = 1;
  };
  if (seed) take(*seed);
  for (int s = 0; s < n; ++s)
    if (!excluded[s] && p.weight(s) <= remaining) candidates.push_back(s);
  while (!candidates.empty()) {
    take(draw(candidates, weights, rng));
    std::erase_if(candidates, [&](int s) { return excluded[s] || p.weight(s) > remaining; });
  }
  std::sort(sel.begin(), sel.end());
  return sel;
}

}  // namespace detail

// Probability of each candidate under tau^alpha eta^beta / sum; zero for
// non-candidates.
inline std::vector<double> selection_probabilities(const std::vector<int>& candidates, const AcoState& state,
                                                   const AcoConfig& cfg) {
  if (candidates.empty()) throw std::invalid_argument("selection_probabilities: empty candidate set");
  std::vector<double> p(state.tau.size(), 0.0);
  double total = 0.0;
  for (int j : candidates) {
    p[j] = std::pow(state.tau[j], cfg.alpha) * std::pow(state.eta[j], cfg.beta);
    total += p[j];
  }
  if (!(total > 0.0)) {
    for (int j : candidates) p[j] = 1.0 / static_cast<double>(candidates.size());
    return p;
  }
  for (int j : candidates) p[j] /= total;
  return p;
}

// One uniformly random maximal feasible solution.
inline Selection random_selection(const ReducedProblem& p, Rng& rng) { return detail::construct(p, nullptr, std::nullopt, rng); }

inline PricingSolution random_sample(const ReducedProblem& p, Rng& rng) { return p.expand(random_selection(p, rng)); }

inline PricingSolution random_sample(const PricingProblem& problem, Rng& rng) {
  return random_sample(ReducedProblem(problem), rng);
}

inline std::vector<Selection> random_selections(const ReducedProblem& p, int count, Rng& rng) {
  std::vector<Selection> out;
  out.reserve(static_cast<std::size_t>(std::max(count, 0)));
  for (int k = 0; k < count; ++k) out.push_back(random_selection(p, rng));
  return out;
}

inline int population_size(const ReducedProblem& p, const AcoConfig& cfg) {
  return cfg.population ? *cfg.population : p.size();
}

// One population of selections under the current (tau, eta). With
// diversity sampling the k-th construction is seeded with item k mod n, so
// every usable item starts a solution at least once when population >= n;
// otherwise every construction starts empty.
inline std::vector<Selection> sample_population(const ReducedProblem& p, const AcoState& state, const AcoConfig& cfg,
                                                Rng& rng) {
  std::vector<Selection> out;
  if (p.size() == 0) return out;
  const auto weights = detail::selection_weights(state, cfg);
  const int N = population_size(p, cfg);
  out.reserve(static_cast<std::size_t>(N));
  for (int k = 0; k < N; ++k) {
    std::optional<int> seed;
    if (cfg.diversity_sampling) seed = k % p.size();
    out.push_back(detail::construct(p, &weights, seed, rng));
  }
  return out;
}

// Keeps selections with reduced cost < threshold whose item set is not in
// `seen`, adding them to `seen`.
inline std::vector<PricingSolution> improving_columns(const ReducedProblem& p, const std::vector<Selection>& samples,
                                                      double rc_threshold, std::set<std::vector<int>>& seen) {
  std::vector<PricingSolution> out;
  for (const auto& s : samples) {
    if (1.0 - p.selection_profit(s) >= rc_threshold) continue;
    auto sol = p.expand(s);
    if (sol.reduced_cost < rc_threshold && seen.insert(sol.items).second) out.push_back(std::move(sol));
  }
  return out;
}

// Seeded sweep over all usable items; returns the distinct improving
// solutions it produced.
inline std::vector<PricingSolution> diversity_sweep(const ReducedProblem& p, const AcoState& state,
                                                    const AcoConfig& cfg, Rng& rng) {
  AcoConfig c = cfg;
  c.diversity_sampling = true;
  std::set<std::vector<int>> seen;
  return improving_columns(p, sample_population(p, state, c, rng), cfg.rc_threshold, seen);
}

// Raises c_best (and best_solution) to the best objective among `samples`.
inline void observe_samples(AcoState& state, const ReducedProblem& p, const std::vector<Selection>& samples) {
  for (const auto& s : samples) {
    const double c = p.selection_profit(s);
    if (c > state.c_best) {
      state.c_best = c;
      state.best_solution = s;
    }
  }
}

// tau_i <- (1 - rho) tau_i + sum over samples containing i of c_n / c_best / lambda,
// floored at kTauMin. Expects c_best to already cover `samples`.
inline void update_pheromone(AcoState& state, const std::vector<double>& sample_objectives,
                             const std::vector<Selection>& samples, const AcoConfig& cfg) {
  const double keep = cfg.rho_is_persistence ? cfg.rho : 1.0 - cfg.rho;
  for (double& t : state.tau) t *= keep;
  if (state.c_best > 0.0) {
    for (std::size_t n = 0; n < samples.size(); ++n) {
      const double deposit = sample_objectives[n] / state.c_best / cfg.lambda;
      for (int i : samples[n]) state.tau[i] += deposit;
    }
  }
  for (double& t : state.tau) t = std::max(t, kTauMin);
}

inline void update_pheromone(AcoState& state, const ReducedProblem& p, const std::vector<Selection>& samples,
                             const AcoConfig& cfg) {
  std::vector<double> obj;
  obj.reserve(samples.size());
  for (const auto& s : samples) obj.push_back(p.selection_profit(s));
  update_pheromone(state, obj, samples, cfg);
}

// Membership probabilities predicted by `model` from features over n
// random samples, floored at kPredictionFloor.
inline std::vector<double> predict_membership(const ReducedProblem& p, const LinearModel& model, Rng& rng) {
  const auto samples = random_selections(p, p.size(), rng);
  const auto features = extract_features(p, samples, model.normalization);
  auto prob = predict_probability(model, features);
  for (double& v : prob) v = std::max(v, kPredictionFloor);
  return prob;
}

// Initial (tau, eta) for a strategy. `prediction` is required by every
// kind but PlainAco.
inline AcoState initial_state(const ReducedProblem& p, StrategyKind kind, const std::vector<double>* prediction) {
  const int n = p.size();
  AcoState s = AcoState::uniform(n);
  if (needs_model(kind) && (!prediction || static_cast<int>(prediction->size()) != n))
    throw std::invalid_argument(std::string("strategy '") + to_string(kind) + "' requires ML predictions");
  for (int i = 0; i < n; ++i) {
    const double ratio = p.profit(i) / static_cast<double>(p.weight(i));
    switch (kind) {
      case StrategyKind::PlainAco: s.eta[i] = ratio; break;
      case StrategyKind::Mlph:
      case StrategyKind::MlacoPredictedEta: s.eta[i] = (*prediction)[i]; break;
      case StrategyKind::MlacoPredHeuEta: s.eta[i] = (*prediction)[i] * ratio; break;
      case StrategyKind::MlacoPredictedTau: s.tau[i] = std::max((*prediction)[i], kTauMin); break;
    }
  }
  return s;
}

struct StrategyResult {
  std::vector<PricingSolution> columns;  // distinct, reduced cost < threshold
  int iterations = 0;
  std::size_t samples = 0;
  AcoState final_state;
};

// Runs `cfg.iterations` sampling rounds. Every kind except Mlph updates the
// pheromone after each round; Mlph samples from a fixed distribution.
inline StrategyResult run_strategy(const ReducedProblem& p, StrategyKind kind, const AcoConfig& cfg,
                                   const LinearModel* model, Rng& rng,
                                   std::optional<Clock::time_point> deadline = std::nullopt) {
  cfg.validate();
  StrategyResult r;
  std::vector<double> prediction;
  if (needs_model(kind)) {
    if (!model) throw std::invalid_argument(std::string("strategy '") + to_string(kind) + "' requires a trained model");
    prediction = predict_membership(p, *model, rng);
  }
  AcoState state = initial_state(p, kind, needs_model(kind) ? &prediction : nullptr);
  std::set<std::vector<int>> seen;
  for (int t = 0; t < cfg.iterations; ++t) {
    if (deadline && Clock::now() > *deadline) break;
    const auto samples = sample_population(p, state, cfg, rng);
    r.samples += samples.size();
    ++r.iterations;
    auto cols = improving_columns(p, samples, cfg.rc_threshold, seen);
    r.columns.insert(r.columns.end(), std::make_move_iterator(cols.begin()), std::make_move_iterator(cols.end()));
    observe_samples(state, p, samples);
    if (kind != StrategyKind::Mlph) update_pheromone(state, p, samples, cfg);
  }
  r.final_state = std::move(state);
  return r;
}

}  // namespace bppc
