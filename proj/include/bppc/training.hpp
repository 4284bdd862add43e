#pragma once

// Training data from column generation runs with exact pricing: at chosen
// iterations, every item of the pricing problem becomes one example
// labelled by membership in the optimal pricing solution.

#include <iostream>
#include <string>
#include <vector>

#include "bppc/cg_engine.hpp"
#include "bppc/features.hpp"
#include "bppc/linear_model.hpp"
#include "bppc/sampling_aco.hpp"

namespace bppc {

struct CollectConfig {
  int first_iteration = 10;
  int last_iteration = 30;
  int every = 5;
  double time_limit = 600.0;  // per training instance
  std::uint64_t seed = 1;
  NormalizationPolicy normalization;
  std::ostream* warnings = &std::cerr;
};

inline bool is_recorded_iteration(int it, const CollectConfig& cfg) {
  return it >= cfg.first_iteration && it <= cfg.last_iteration && (it - cfg.first_iteration) % cfg.every == 0;
}

// Examples for one pricing problem: features from n fresh random samples,
// labels from an exact solve.
inline std::vector<TrainingExample> label_pricing_problem(const ReducedProblem& p, Rng& rng,
                                                          const NormalizationPolicy& policy, const std::string& tag) {
  const auto samples = random_selections(p, p.size(), rng);
  const auto features = extract_features(p, samples, policy);
  const auto opt = solve_exact(p);
  std::vector<char> in(static_cast<std::size_t>(p.original_size()), 0);
  for (int i : opt.solution.items) in[i] = 1;
  std::vector<TrainingExample> out;
  out.reserve(features.size());
  for (int s = 0; s < p.size(); ++s) out.push_back({features[s], in[p.members(s).front()] ? 1 : 0, tag});
  return out;
}

inline std::vector<TrainingExample> collect_training_data(const std::vector<Instance>& instances,
                                                          const CollectConfig& cfg = {}) {
  std::vector<TrainingExample> all;
  for (std::size_t k = 0; k < instances.size(); ++k) {
    const Instance& inst = instances[k];
    const std::string tag = inst.name.empty() ? "train" + std::to_string(k) : inst.name;
    CgConfig cg;
    cg.pricing = PricingKind::ExactSingle;
    cg.time_limit = cfg.time_limit;
    cg.seed = derive_seed(cfg.seed, k);
    Rng feature_rng(derive_seed(cfg.seed, 1000003 + k));
    std::vector<TrainingExample> mine;
    CgRunOptions opt;
    opt.observer = [&](const PricingSnapshot& snap) {
      if (is_recorded_iteration(snap.iteration, cfg)) {
        auto ex = label_pricing_problem(snap.problem, feature_rng, cfg.normalization, tag);
        mine.insert(mine.end(), ex.begin(), ex.end());
      }
    };
    const CgResult r = run_cg(inst, cg, opt);
    if (r.status == CgStatus::TimeLimit) {
      if (cfg.warnings) *cfg.warnings << "warning: training instance " << tag << " hit the CG budget; skipped\n";
      continue;
    }
    all.insert(all.end(), mine.begin(), mine.end());
  }
  return all;
}

}  // namespace bppc
