#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "bppc/pricing_exact.hpp"
#include "bppc/sampling_aco.hpp"

using namespace bppc;

namespace {

PricingProblem make(std::vector<double> profits, std::vector<Weight> weights, Weight cap,
                    std::vector<std::pair<int, int>> edges = {}) {
  PricingProblem p;
  const int n = static_cast<int>(weights.size());
  p.profits = std::move(profits);
  p.weights = std::move(weights);
  p.capacity = cap;
  p.conflicts = ConflictGraph::from_edges(n, edges);
  return p;
}

std::vector<std::pair<int, int>> complete_edges(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return e;
}

PricingProblem fuzz_problem(Rng& rng, int n) {
  PricingProblem p;
  p.capacity = 50 + static_cast<Weight>(rng.below(200));
  for (int i = 0; i < n; ++i) {
    p.weights.push_back(rng.between(1, p.capacity));
    p.profits.push_back(rng.uniform() * 0.6);
  }
  std::vector<std::pair<int, int>> edges;
  const double d = rng.uniform();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.uniform() < d) edges.emplace_back(i, j);
  p.conflicts = ConflictGraph::from_edges(n, edges);
  return p;
}

LinearModel constant_model(double p) {
  LinearModel m;
  m.platt_a = 0.0;
  m.platt_b = std::log(1.0 / p - 1.0);
  return m;
}

}  // namespace

TEST(SelectionProbabilities, Symmetric) {
  AcoConfig cfg;
  const auto pr = selection_probabilities({0, 1, 2, 3}, AcoState::uniform(4), cfg);
  for (double v : pr) EXPECT_DOUBLE_EQ(v, 0.25);
}

TEST(SelectionProbabilities, ProportionalToEta) {
  AcoConfig cfg;
  AcoState s = AcoState::uniform(2);
  s.eta = {3.0, 1.0};
  const auto pr = selection_probabilities({0, 1}, s, cfg);
  EXPECT_DOUBLE_EQ(pr[0], 0.75);
  EXPECT_DOUBLE_EQ(pr[1], 0.25);
}

TEST(SelectionProbabilities, ZeroExponentsGiveUniform) {
  AcoConfig cfg;
  cfg.alpha = cfg.beta = 0.0;
  AcoState s = AcoState::uniform(3);
  s.tau = {5.0, 0.1, 2.0};
  s.eta = {0.3, 9.0, 1.0};
  const auto pr = selection_probabilities({0, 1, 2}, s, cfg);
  for (double v : pr) EXPECT_NEAR(v, 1.0 / 3.0, 1e-12);
}

TEST(SelectionProbabilities, ZeroWeightsFallBackToUniform) {
  AcoConfig cfg;
  AcoState s = AcoState::uniform(3);
  s.eta = {0.0, 0.0, 0.0};
  const auto pr = selection_probabilities({0, 2}, s, cfg);
  EXPECT_DOUBLE_EQ(pr[0], 0.5);
  EXPECT_DOUBLE_EQ(pr[1], 0.0);
  EXPECT_DOUBLE_EQ(pr[2], 0.5);
  EXPECT_THROW(selection_probabilities({}, s, cfg), std::invalid_argument);
}

TEST(SelectionProbabilities, SumToOneAndScaleInvariant) {
  Rng rng(1);
  for (int t = 0; t < 1000; ++t) {
    const int n = 1 + static_cast<int>(rng.below(30));
    AcoConfig cfg;
    cfg.alpha = rng.uniform() * 3;
    cfg.beta = rng.uniform() * 3;
    AcoState s = AcoState::uniform(n);
    std::vector<int> cand;
    for (int i = 0; i < n; ++i) {
      s.tau[i] = 1e-3 + rng.uniform() * 10;
      s.eta[i] = 1e-3 + rng.uniform();
      cand.push_back(i);
    }
    const auto p1 = selection_probabilities(cand, s, cfg);
    double sum = 0;
    for (double v : p1) {
      EXPECT_GE(v, 0.0);
      sum += v;
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
    AcoState scaled = s;
    const double c = 0.01 + rng.uniform() * 100;
    for (double& e : scaled.eta) e *= c;
    const auto p2 = selection_probabilities(cand, scaled, cfg);
    for (int i = 0; i < n; ++i) EXPECT_NEAR(p1[i], p2[i], 1e-12);
  }
}

TEST(RandomSample, CompleteGraphGivesSingletons) {
  Rng rng(2);
  const auto p = make({1, 1, 1, 1}, {1, 1, 1, 1}, 10, complete_edges(4));
  for (int t = 0; t < 50; ++t) EXPECT_EQ(random_sample(p, rng).items.size(), 1u);
}

TEST(RandomSample, NothingExcludedTakesAll) {
  Rng rng(3);
  const auto p = make({1, 1, 1, 1, 1}, {1, 1, 1, 1, 1}, 5);
  for (int t = 0; t < 50; ++t) EXPECT_EQ(random_sample(p, rng).items.size(), 5u);
}

TEST(RandomSample, CapacityExcludesSecondPick) {
  Rng rng(4);
  const auto p = make({1, 1}, {6, 6}, 10);
  std::set<std::vector<int>> seen;
  for (int t = 0; t < 100; ++t) {
    const auto s = random_sample(p, rng);
    ASSERT_EQ(s.items.size(), 1u);
    seen.insert(s.items);
  }
  EXPECT_EQ(seen.size(), 2u);
}

TEST(RandomSample, FeasibleAndMaximal) {
  Rng rng(5);
  for (int t = 0; t < 200; ++t) {
    const auto p = fuzz_problem(rng, 25);
    const auto s = random_sample(p, rng);
    ASSERT_TRUE(satisfies_pricing_constraints(p, s.items));
    Weight load = 0;
    for (int i : s.items) load += p.weights[i];
    for (int i = 0; i < p.size(); ++i) {
      if (std::binary_search(s.items.begin(), s.items.end(), i)) continue;
      bool blocked = load + p.weights[i] > p.capacity;
      for (int j : s.items) blocked = blocked || p.conflicts.adjacent(i, j);
      EXPECT_TRUE(blocked) << "item " << i << " could still be added";
    }
  }
}

TEST(DiversitySweep, ForcedCompletionDeduplicates) {
  Rng rng(6);
  const ReducedProblem p(make({0.5, 0.5, 0.5}, {1, 1, 1}, 3));
  const auto cols = diversity_sweep(p, AcoState::uniform(3), AcoConfig{}, rng);
  ASSERT_EQ(cols.size(), 1u);
  EXPECT_EQ(cols[0].items, (std::vector<int>{0, 1, 2}));
}

TEST(DiversitySweep, NoImprovingColumn) {
  Rng rng(7);
  const ReducedProblem p(make({0.4, 0.4, 0.4}, {1, 1, 1}, 3, complete_edges(3)));
  EXPECT_TRUE(diversity_sweep(p, AcoState::uniform(3), AcoConfig{}, rng).empty());
}

TEST(DiversitySweep, BothSeedsGiveSamePair) {
  Rng rng(8);
  const ReducedProblem p(make({0.9, 0.9}, {1, 1}, 2));
  const auto cols = diversity_sweep(p, AcoState::uniform(2), AcoConfig{}, rng);
  ASSERT_EQ(cols.size(), 1u);
  EXPECT_EQ(cols[0].items, (std::vector<int>{0, 1}));
  EXPECT_NEAR(cols[0].reduced_cost, -0.8, 1e-12);
}

TEST(DiversitySweep, EverySampleStartsFromItsSeed) {
  Rng rng(9);
  for (int t = 0; t < 100; ++t) {
    const ReducedProblem p(fuzz_problem(rng, 20));
    AcoConfig cfg;
    const auto samples = sample_population(p, AcoState::uniform(p.size()), cfg, rng);
    ASSERT_EQ(static_cast<int>(samples.size()), p.size());
    for (int k = 0; k < p.size(); ++k)
      EXPECT_TRUE(std::binary_search(samples[k].begin(), samples[k].end(), k));
  }
}

TEST(PheromoneUpdate, HandComputedValues) {
  AcoConfig cfg;  // rho 0.95, lambda 1
  AcoState s = AcoState::uniform(1);
  s.c_best = 2.0;
  update_pheromone(s, std::vector<double>{}, std::vector<Selection>{}, cfg);
  EXPECT_NEAR(s.tau[0], 0.05, 1e-12);

  s = AcoState::uniform(1);
  s.c_best = 2.0;
  update_pheromone(s, {2.0}, {{0}}, cfg);
  EXPECT_NEAR(s.tau[0], 1.05, 1e-12);

  s = AcoState::uniform(1);
  s.c_best = 2.0;
  update_pheromone(s, {1.0, 2.0}, {{0}, {0}}, cfg);
  EXPECT_NEAR(s.tau[0], 1.55, 1e-12);
}

TEST(PheromoneUpdate, FloorAndZeroBest) {
  AcoConfig cfg;
  cfg.rho = 1.0;
  AcoState s = AcoState::uniform(2);
  update_pheromone(s, {0.0}, {{0}}, cfg);  // c_best = 0: no deposits
  EXPECT_EQ(s.tau[0], kTauMin);
  EXPECT_EQ(s.tau[1], kTauMin);
}

TEST(PheromoneUpdate, PersistenceFlag) {
  AcoConfig cfg;
  cfg.rho_is_persistence = true;
  AcoState s = AcoState::uniform(1);
  s.c_best = 1.0;
  update_pheromone(s, std::vector<double>{}, std::vector<Selection>{}, cfg);
  EXPECT_NEAR(s.tau[0], 0.95, 1e-12);
}

TEST(PheromoneUpdate, LongRunStaysFiniteAndBounded) {
  Rng rng(10);
  const ReducedProblem p(fuzz_problem(rng, 30));
  AcoConfig cfg;
  cfg.population = 8;
  AcoState s = AcoState::uniform(p.size());
  for (int it = 0; it < 10000; ++it) {
    const auto samples = sample_population(p, s, cfg, rng);
    observe_samples(s, p, samples);
    update_pheromone(s, p, samples, cfg);
  }
  const double bound = 8.0 / cfg.lambda / cfg.rho + 1.0;
  for (double t : s.tau) {
    EXPECT_TRUE(std::isfinite(t));
    EXPECT_GE(t, kTauMin);
    EXPECT_LE(t, bound);
  }
}

TEST(RunStrategy, ZeroProfitsFindNothing) {
  Rng rng(11);
  const ReducedProblem p(make({0, 0, 0}, {1, 2, 3}, 6));
  const auto r = run_strategy(p, StrategyKind::PlainAco, AcoConfig{}, nullptr, rng);
  EXPECT_TRUE(r.columns.empty());
  EXPECT_EQ(r.iterations, 10);
}

TEST(RunStrategy, ColumnsFeasibleImprovingDistinct) {
  Rng rng(12);
  const auto model = constant_model(0.3);
  for (int t = 0; t < 30; ++t) {
    auto pp = fuzz_problem(rng, 20);
    const ReducedProblem p(pp);
    for (auto kind : {StrategyKind::PlainAco, StrategyKind::Mlph, StrategyKind::MlacoPredictedEta,
                      StrategyKind::MlacoPredHeuEta, StrategyKind::MlacoPredictedTau}) {
      AcoConfig cfg;
      cfg.iterations = 3;
      const auto r = run_strategy(p, kind, cfg, &model, rng);
      std::set<std::vector<int>> seen;
      for (const auto& c : r.columns) {
        EXPECT_TRUE(satisfies_pricing_constraints(pp, c.items));
        EXPECT_LT(c.reduced_cost, cfg.rc_threshold);
        EXPECT_TRUE(seen.insert(c.items).second);
      }
    }
  }
}

TEST(RunStrategy, DeterministicPerSeed) {
  Rng gen(13);
  const ReducedProblem p(fuzz_problem(gen, 25));
  Rng a(99), b(99);
  const auto ra = run_strategy(p, StrategyKind::PlainAco, AcoConfig{}, nullptr, a);
  const auto rb = run_strategy(p, StrategyKind::PlainAco, AcoConfig{}, nullptr, b);
  ASSERT_EQ(ra.columns.size(), rb.columns.size());
  for (std::size_t k = 0; k < ra.columns.size(); ++k) EXPECT_EQ(ra.columns[k], rb.columns[k]);
}

TEST(RunStrategy, MissingModelIsAnError) {
  Rng rng(14);
  const ReducedProblem p(make({0.5}, {1}, 1));
  EXPECT_THROW(run_strategy(p, StrategyKind::Mlph, AcoConfig{}, nullptr, rng), std::invalid_argument);
}

TEST(InitialState, PerStrategy) {
  const ReducedProblem p(make({0.5, 0.2}, {2, 4}, 10));
  const std::vector<double> pred{0.8, 0.0};
  auto s = initial_state(p, StrategyKind::PlainAco, nullptr);
  EXPECT_DOUBLE_EQ(s.eta[0], 0.25);
  EXPECT_DOUBLE_EQ(s.eta[1], 0.05);
  s = initial_state(p, StrategyKind::MlacoPredictedEta, &pred);
  EXPECT_DOUBLE_EQ(s.eta[0], 0.8);
  EXPECT_DOUBLE_EQ(s.tau[0], 1.0);
  s = initial_state(p, StrategyKind::MlacoPredHeuEta, &pred);
  EXPECT_DOUBLE_EQ(s.eta[0], 0.8 * 0.25);
  s = initial_state(p, StrategyKind::MlacoPredictedTau, &pred);
  EXPECT_DOUBLE_EQ(s.tau[0], 0.8);
  EXPECT_DOUBLE_EQ(s.tau[1], kTauMin);
  EXPECT_DOUBLE_EQ(s.eta[1], 1.0);
}

// A model that is confident exactly on the optimal items leads the
// fixed-distribution sampler to the optimum in one round.
TEST(RunStrategy, ConfidentPredictionFindsOptimum) {
  const auto pp = make({0.6, 0.5, 0.45, 0.3, 0.2}, {4, 3, 3, 2, 2}, 7, {{0, 1}, {2, 4}});
  const auto opt = brute_force_pricing(pp);
  const ReducedProblem p(pp);
  std::vector<double> pred(5, 1e-9);
  for (int i : opt.items) pred[i] = 1.0;
  AcoConfig cfg;
  cfg.iterations = 1;
  const AcoState s = initial_state(p, StrategyKind::Mlph, &pred);
  Rng rng(15);
  const auto cols = diversity_sweep(p, s, cfg, rng);
  bool found = false;
  for (const auto& c : cols) found = found || c.items == opt.items;
  EXPECT_TRUE(found);
}

TEST(AcoConfig, Validation) {
  AcoConfig c;
  c.rho = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.lambda = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.iterations = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.alpha = -1;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}
