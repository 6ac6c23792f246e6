#include <gtest/gtest.h>

#include <random>

#include "rrcpsp/rrcpsp.hpp"
#include "support/oracles.hpp"

using namespace rrcpsp;

namespace {

ProjectInstance small(std::mt19937_64& rng, std::size_t real, std::size_t resources) {
  GeneratorOptions opt;
  opt.real_activities = real;
  opt.resources = resources;
  opt.max_duration = 9;
  opt.max_deviation = -1;
  opt.arc_probability = 0.2;
  opt.max_requirement = 4;
  opt.capacity = 5;
  return random_instance(rng, opt);
}

// Minimum over every minimal sufficient order of the enumerated worst case.
Time oracle_optimum(const ProjectInstance& inst, int gamma) {
  std::optional<Time> best;
  for (const auto& m : oracle::minimal_sufficient_orders(inst)) {
    std::vector<Arc> arcs;
    for (std::size_t i = 0; i < m.size(); ++i)
      for (std::size_t j = 0; j < m.size(); ++j)
        if (m[i][j]) arcs.push_back({i, j});
    const Time v = oracle::worst_case(inst, arcs, gamma);
    if (!best || v < *best) best = v;
  }
  return *best;
}

}  // namespace

TEST(Bnb, EmptyCatalogReturnsRootValue) {
  const auto inst = counterexample::instance();
  const auto r = solve_exact(inst, 1);
  EXPECT_TRUE(r.optimal());
  EXPECT_EQ(r.value, 3);
  EXPECT_EQ(r.bound, 3);
  EXPECT_EQ(worst_case_makespan_dp(inst, r.best, 1).value, 3);
}

TEST(Bnb, PairConflict) {
  const auto inst = make_instance({0, 1, 1, 0}, {0, 0, 0, 0}, {{0}, {1}, {1}, {0}}, {1}, {{0, 1}, {0, 2}, {1, 3}, {2, 3}});
  const auto r = solve_exact(inst, 0);
  EXPECT_EQ(r.value, 2);
  EXPECT_TRUE(verify_selection(inst, r.best, minimal_forbidden_sets(inst)).sufficient());
}

TEST(Bnb, MatchesExhaustiveOracle) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = small(rng, 3 + trial % 4, 1 + trial % 2);
    const int gamma = trial % 3;
    const auto r = solve_exact(inst, gamma);
    ASSERT_TRUE(r.optimal());
    const Time expected = exhaustive_optimum(inst, gamma);
    EXPECT_EQ(r.value, expected) << "trial " << trial;
    // the pair-subset oracle is only affordable on up to four activities
    if (inst.size() <= 6) {
      EXPECT_EQ(oracle_optimum(inst, gamma), expected) << "trial " << trial;
    }
    EXPECT_EQ(worst_case_makespan_dp(inst, r.best, gamma).value, r.value);
    EXPECT_TRUE(verify_selection(inst, r.best, minimal_forbidden_sets(inst)).sufficient());
    EXPECT_LE(r.value, warm_start(inst, gamma).ub);
  }
}

TEST(Bnb, NominalBudgetMatchesDeterministicOptimum) {
  std::mt19937_64 rng(78);
  for (int trial = 0; trial < 25; ++trial) {
    const auto inst = small(rng, 3 + trial % 4, 1 + trial % 2);
    EXPECT_EQ(solve_exact(inst, 0).value, oracle::deterministic_optimum(inst)) << "trial " << trial;
  }
}

TEST(Bnb, IncumbentTraceDecreases) {
  std::mt19937_64 rng(79);
  for (int trial = 0; trial < 10; ++trial) {
    const auto inst = small(rng, 8, 2);
    const auto r = solve_exact(inst, 2);
    ASSERT_FALSE(r.incumbent_trace.empty());
    for (std::size_t i = 1; i < r.incumbent_trace.size(); ++i)
      EXPECT_LT(r.incumbent_trace[i], r.incumbent_trace[i - 1]);
    EXPECT_EQ(r.incumbent_trace.back(), r.value);
  }
}

TEST(Bnb, NodeCapGivesIncumbentOnly) {
  std::mt19937_64 rng(80);
  GeneratorOptions opt;
  opt.real_activities = 12;
  opt.resources = 1;
  opt.arc_probability = 0.0;
  opt.max_requirement = 3;
  opt.capacity = 4;
  const auto inst = random_instance(rng, opt);
  const auto r = solve_exact(inst, 2, SearchLimits{60.0, 3});
  EXPECT_FALSE(r.optimal());
  EXPECT_LE(r.bound, r.value);
  EXPECT_LE(r.value, warm_start(inst, 2).ub);
  ASSERT_TRUE(optimality_gap(r, r.bound));
}

TEST(Bnb, UpperBoundHintPrunes) {
  std::mt19937_64 rng(81);
  const auto inst = small(rng, 6, 1);
  const auto free = solve_exact(inst, 1);
  const auto hinted = solve_exact(inst, 1, SearchLimits{}, free.value);
  EXPECT_EQ(hinted.value, free.value);
  EXPECT_LE(hinted.nodes, free.nodes);
}

TEST(Gap, Examples) {
  EXPECT_DOUBLE_EQ(*optimality_gap(100.0, 80.0), 20.0);
  EXPECT_DOUBLE_EQ(*optimality_gap(50.0, 50.0), 0.0);
  EXPECT_FALSE(optimality_gap(std::nullopt, 10.0));
  EXPECT_FALSE(optimality_gap(0.0, 0.0));
  OptResult r;
  r.value = 10;
  r.status = OptResult::Status::kIncumbentOnly;
  EXPECT_DOUBLE_EQ(*optimality_gap(r, 7), 30.0);
  r.status = OptResult::Status::kOptimal;
  EXPECT_DOUBLE_EQ(*optimality_gap(r, 7), 0.0);
}
