#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "bppc/rng.hpp"
#include "bppc/simplex.hpp"
#include "oracles.hpp"

using namespace bppc;

namespace {

using oracle::cols;
using oracle::random_covering;
using oracle::vertex_enumeration_optimum;

void expect_certified(const LpSolution& s) {
  ASSERT_EQ(s.status, LpStatus::Optimal);
  EXPECT_TRUE(s.certificate.ok(s.objective));
  EXPECT_LE(s.certificate.duality_gap, 1e-7 * (1 + std::abs(s.objective)));
}

}  // namespace

TEST(SolveRmp, SingletonCovering) {
  const auto r = solve_rmp(cols({{0}, {1}, {2}}), 3).solution;
  expect_certified(r);
  EXPECT_NEAR(r.objective, 3.0, 1e-9);
  for (double z : r.primal) EXPECT_NEAR(z, 1.0, 1e-9);
  for (double p : r.duals) EXPECT_NEAR(p, 1.0, 1e-9);
}

TEST(SolveRmp, PairColumnDominates) {
  const auto r = solve_rmp(cols({{0, 1}, {0}, {1}}), 2).solution;
  expect_certified(r);
  EXPECT_NEAR(r.objective, 1.0, 1e-9);
  EXPECT_NEAR(r.primal[0], 1.0, 1e-9);
  EXPECT_NEAR(r.duals[0] + r.duals[1], 1.0, 1e-9);
}

TEST(SolveRmp, OddCycleIsFractional) {
  const auto r = solve_rmp(cols({{0, 1}, {1, 2}, {0, 2}}), 3).solution;
  expect_certified(r);
  EXPECT_NEAR(r.objective, 1.5, 1e-9);
  for (double z : r.primal) EXPECT_NEAR(z, 0.5, 1e-9);
  for (double p : r.duals) EXPECT_NEAR(p, 0.5, 1e-9);
  EXPECT_NEAR(r.certificate.dual_objective, 1.5, 1e-9);
}

TEST(SolveRmp, UncoveredItemIsInfeasibleNotAnError) {
  const auto r = solve_rmp(cols({{0}, {2}}), 3).solution;
  EXPECT_EQ(r.status, LpStatus::Infeasible);
  EXPECT_EQ(r.uncovered, std::vector<int>{1});
}

TEST(ReducedCost, Examples) {
  EXPECT_DOUBLE_EQ(reduced_cost(std::vector<int>{0, 1}, {0.5, 0.5, 0.5}), 0.0);
  EXPECT_NEAR(reduced_cost(std::vector<int>{0, 1}, {0.9, 0.9}), -0.8, 1e-15);
  EXPECT_DOUBLE_EQ(reduced_cost(std::vector<int>{0, 2}, {0.0, 0.0, 0.0}), 1.0);
}

TEST(SolveRmp, MatchesVertexEnumerationOnRandomTinyLps) {
  Rng rng(2024);
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + static_cast<int>(rng.below(6));
    const int m = 1 + static_cast<int>(rng.below(12));
    const auto c = random_covering(n, m, rng);
    const auto r = solve_rmp(c, n).solution;
    expect_certified(r);
    EXPECT_NEAR(r.objective, vertex_enumeration_optimum(c, n), 1e-7) << "trial " << t;
    for (double p : r.duals) EXPECT_GE(p, 0.0);
  }
}

TEST(SolveRmp, WarmStartAgreesWithColdStart) {
  Rng rng(77);
  for (int t = 0; t < 40; ++t) {
    const int n = 4 + static_cast<int>(rng.below(10));
    auto c = random_covering(n, 2 * n, rng);
    const auto first = solve_rmp(c, n);
    expect_certified(first.solution);
    auto more = random_covering(n, n, rng);
    for (auto& col : more) {
      col.id += 1000;
      c.push_back(col);
    }
    const auto warm = solve_rmp(c, n, &first.basis).solution;
    const auto cold = solve_rmp(c, n).solution;
    expect_certified(warm);
    EXPECT_TRUE(warm.warm_started);
    EXPECT_NEAR(warm.objective, cold.objective, 1e-9);
    EXPECT_LE(warm.objective, first.solution.objective + 1e-9);
  }
}

TEST(SolveRmp, AddingColumnsRespectsReducedCostSign) {
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    const int n = 3 + static_cast<int>(rng.below(6));
    auto c = random_covering(n, n + 2, rng);
    const auto base = solve_rmp(c, n).solution;
    auto extra = random_covering(n, 1, rng)[0];
    extra.id = 999;
    const double rc = reduced_cost(extra, base.duals);
    c.push_back(extra);
    const auto after = solve_rmp(c, n).solution;
    EXPECT_LE(after.objective, base.objective + 1e-9);
    if (rc >= 0) {
      EXPECT_NEAR(after.objective, base.objective, 1e-9);
    }
  }
}

TEST(SolveRmp, LargerRandomInstancesStayCertified) {
  Rng rng(99);
  for (int t = 0; t < 10; ++t) {
    const int n = 60;
    const auto c = random_covering(n, 300, rng);
    expect_certified(solve_rmp(c, n).solution);
  }
}

TEST(LpDump, Format) {
  const auto c = cols({{0, 1}, {1, 2}, {0, 2}});
  const auto r = solve_rmp(c, 3).solution;
  std::ostringstream os;
  write_lp_dump(os, c, 3, r);
  const std::string s = os.str();
  EXPECT_EQ(s.rfind("rmp 3 3 optimal 1.5", 0), 0u);
  EXPECT_NE(s.find("col 0 0.5 0 : 0 1"), std::string::npos);
  EXPECT_NE(s.find("dual 2 0.5"), std::string::npos);
}
