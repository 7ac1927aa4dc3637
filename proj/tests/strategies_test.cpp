// Copyright 2026 The sparsify Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "oracles.hpp"
#include "sparsify/errors.hpp"
#include "sparsify/generators.hpp"
#include "sparsify/harness.hpp"
#include "sparsify/strategies.hpp"

namespace sparsify {
namespace {

FractionalSolution concentrated(const StochasticInstance& inst) {
  const int n = inst.type_count();
  std::vector<std::vector<double>> v(n, std::vector<double>(inst.type(0).compatible.size(), 0.0));
  for (int j = 0; j < n; ++j) v[j][j] = 1.0;
  return FractionalSolution(inst, v);
}

EfficiencySummary summary_for(const StochasticInstance& inst, StrategyConfig s, int trials = 100) {
  ExperimentConfig cfg;
  cfg.strategies = {s};
  cfg.trials = trials;
  cfg.seed = 1;
  return run_experiment(inst, cfg).summaries.at(0);
}

TEST(VarOptSparsify, SmallNeighborhoodsKeptWhole) {
  const auto inst = generators::kvv_triangular(10);
  const auto x = solve_expected_lp(inst);
  const auto g = realize(inst, RngStream(1, 0));
  const auto reports = varopt_sparsify(g, x, 10, RngStream(2, 0));
  for (int i = 0; i < g.arrival_count(); ++i) {
    const auto nb = g.neighbors(i);
    std::set<int> positive;
    for (std::size_t a = 0; a < nb.size(); ++a) {
      if (x.row(g.arrival_type(i))[a] > 0.0) positive.insert(nb[a]);
    }
    if (positive.empty()) positive.insert(nb.begin(), nb.end());
    EXPECT_EQ(std::set<int>(reports[i].selected.begin(), reports[i].selected.end()), positive);
  }
}

TEST(VarOptSparsify, ReportsAreConsistent) {
  const auto inst = generators::bahmani(30);
  const auto x = monte_carlo_weights(inst, 20, RngStream(3, 0));
  const auto g = realize(inst, RngStream(4, 0));
  for (int k : {1, 3, 7}) {
    for (const auto& r : varopt_sparsify(g, x, k, RngStream(5, k))) {
      const int j = g.arrival_type(r.arrival_index);
      EXPECT_LE(static_cast<int>(r.selected.size()), k);
      ASSERT_EQ(r.selected.size(), r.inclusion_probs.size());
      ASSERT_EQ(r.selected.size(), r.ipw_weights.size());
      double w = 0.0, row = 0.0;
      for (double v : r.ipw_weights) w += v;
      for (double v : x.row(j)) row += v;
      if (row > 0.0) {
        EXPECT_NEAR(w, row, 1e-9);
      }
    }
  }
}

// Each arrival's draw depends only on its own substream: dropping later
// arrivals leaves earlier selections untouched.
TEST(VarOptSparsify, PerArrivalIndependence) {
  const auto inst = generators::complete_uniform(20);
  const auto x = spread_equivalence_classes(inst, solve_expected_lp(inst));
  const auto full = realize(inst, RngStream(6, 0));
  std::vector<int> prefix_types;
  for (int i = 0; i < 10; ++i) prefix_types.push_back(full.arrival_type(i));
  const RealizedGraph prefix(inst, prefix_types);
  const auto a = varopt_sparsify(full, x, 4, RngStream(7, 0));
  const auto b = varopt_sparsify(prefix, x, 4, RngStream(7, 0));
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a[i].selected, b[i].selected);
}

TEST(VarOptSparsify, ConcentratedSolutionIsForced) {
  const int n = 50;
  const auto inst = generators::complete_uniform(n);
  const auto x = concentrated(inst);
  double total = 0.0;
  std::vector<double> sizes;
  for (std::uint64_t t = 0; t < 400; ++t) {
    const auto g = realize(inst, RngStream(8, t));
    const auto reports = varopt_sparsify(g, x, 5, RngStream(9, t));
    for (const auto& r : reports) {
      ASSERT_EQ(r.selected.size(), 1u);
      EXPECT_EQ(r.selected[0], g.arrival_type(r.arrival_index));
    }
    sizes.push_back(max_matching(sparsified_graph(g, reports)).size);
    total += sizes.back();
  }
  EXPECT_NEAR(total / 400, oracle::distinct_types_expected(n), 4 * standard_error(sizes));
}

TEST(VarOptSparsify, SpreadSolutionPreservesMatching) {
  const int n = 50;
  const auto inst = generators::complete_uniform(n);
  const auto x = spread_equivalence_classes(inst, solve_expected_lp(inst));
  ExperimentConfig cfg;
  cfg.strategies = {{StrategyKind::kVarOpt, 5}};
  cfg.trials = 500;
  cfg.seed = 1;
  EXPECT_GE(run_experiment(inst, cfg, &x).summaries[0].mean, 0.95);
}

TEST(RandomSubgraph, SmallNeighborhoodsKeptWhole) {
  const auto inst = generators::kvv_triangular(8);
  const auto g = realize(inst, RngStream(1, 1));
  const auto reports = random_subgraph(g, 8, RngStream(2, 2));
  for (int i = 0; i < g.arrival_count(); ++i) {
    const auto nb = g.neighbors(i);
    EXPECT_EQ(reports[i].selected, std::vector<int>(nb.begin(), nb.end()));
  }
}

TEST(RandomSubgraph, ResourceCoverageOnCompleteUniform) {
  const int n = 30, k = 3;
  const auto inst = generators::complete_uniform(n);
  double covered = 0.0;
  const int trials = 400;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const auto g = realize(inst, RngStream(3, t));
    std::vector<char> hit(n, 0);
    for (const auto& r : random_subgraph(g, k, RngStream(4, t)))
      for (int v : r.selected) hit[v] = 1;
    covered += std::accumulate(hit.begin(), hit.end(), 0);
  }
  const double p = 1.0 - std::pow(1.0 - static_cast<double>(k) / n, n);
  // 4 sigma, treating the n resources of a trial as independent Bernoulli(p)
  EXPECT_NEAR(covered / (trials * n), p, 4 * std::sqrt(p * (1 - p) / (trials * n)));
}

TEST(RandomSubgraph, BahmaniEfficiency) {
  EXPECT_NEAR(summary_for(generators::bahmani(100), {StrategyKind::kRandom, 3}).mean, 0.6177, 0.025);
}

TEST(RandomSubgraph, TriangularEfficiency) {
  EXPECT_NEAR(summary_for(generators::kvv_triangular(100), {StrategyKind::kRandom, 10}).mean, 0.9333, 0.015);
}

TEST(KvvRanking, DisjointPairsAreFullyMatched) {
  const int n = 25;
  const auto inst = generators::exclusive_pairs(n);
  std::vector<int> types(n);
  std::iota(types.begin(), types.end(), 0);
  const RealizedGraph g(inst, types);
  EXPECT_EQ(kvv_ranking(g, RngStream(1, 0)).matched, n);
}

TEST(KvvRanking, GreedyOutcomeIsAMatching) {
  const auto inst = generators::partitioned_block(30);
  const auto g = realize(inst, RngStream(2, 0));
  const auto out = kvv_ranking(g, RngStream(3, 0));
  EXPECT_LE(out.matched, max_matching_size(g));
  EXPECT_EQ(std::count(out.arrival_matched.begin(), out.arrival_matched.end(), true), out.matched);
}

TEST(KvvRanking, TriangularEfficiency) {
  EXPECT_NEAR(summary_for(generators::kvv_triangular(100), {StrategyKind::kKvv, 0}).mean, 0.9128, 0.015);
}

TEST(KvvRanking, BlockEfficiency) {
  EXPECT_NEAR(summary_for(generators::partitioned_block(100), {StrategyKind::kKvv, 0}).mean, 0.8282, 0.015);
}

TEST(Mgs, SingleResource) {
  const StochasticInstance inst({"a"}, {{0, 1.0, {0}}}, 6);
  const FractionalSolution full(inst, {{1.0}});
  const auto learned = solve_expected_lp(inst);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto g = realize(inst, RngStream(s, 0));
    EXPECT_EQ(mgs(g, full, RngStream(s, 1)).matched, 1);
    EXPECT_LE(mgs(g, learned, RngStream(s, 2)).matched, 1);
  }
}

TEST(Mgs, GuidanceFollowsMarginals) {
  const StochasticInstance inst({"a", "b", "c"}, {{0, 1.0, {0, 1, 2}}}, 1);
  const FractionalSolution x(inst, {{0.5, 0.3, 0.1}});
  RngStream rng(4, 4);
  std::vector<int> counts(4, 0);
  const int draws = 40000;
  for (int d = 0; d < draws; ++d) {
    const auto g = sample_guidance(x, rng);
    ++counts[g.first[0] < 0 ? 3 : g.first[0]];
  }
  const std::vector<double> expected = {0.5, 0.3, 0.1, 0.1};
  for (int a = 0; a < 4; ++a) EXPECT_NEAR(counts[a] / static_cast<double>(draws), expected[a], 0.01);
}

// The MGS guidance reading differs from the original procedure, so the
// efficiency bands here use the wider 4 point tolerance.
TEST(Mgs, TsmEfficiency) {
  const auto inst = generators::tsm_tight(100);
  EXPECT_NEAR(summary_for(inst, {StrategyKind::kMgs, 0}).mean, 0.7493, 0.04);
}

TEST(Mgs, BlockEfficiency) {
  EXPECT_NEAR(summary_for(generators::partitioned_block(100), {StrategyKind::kMgs, 0}).mean, 0.7007, 0.025);
}

TEST(RunStrategy, OfflineEqualsMaxMatching) {
  const auto inst = generators::bahmani(20);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto g = realize(inst, RngStream(s, 5));
    EXPECT_EQ(run_strategy(g, {StrategyKind::kOffline, 0}, nullptr, RngStream(s, 6)).matched, max_matching_size(g));
  }
}

TEST(RunStrategy, FullBudgetVarOptMatchesOffline) {
  const auto inst = generators::partitioned_block(20);
  const auto x = monte_carlo_weights(inst, 30, RngStream(7, 0));
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto g = realize(inst, RngStream(s, 7));
    // with k = |V| every positive edge is kept; lift x to full support first
    std::vector<std::vector<double>> v = x.values();
    for (auto& row : v)
      for (auto& e : row) e = 0.5 * e + 0.5 / static_cast<double>(row.size());
    const FractionalSolution full(inst, v);
    EXPECT_EQ(run_strategy(g, {StrategyKind::kVarOpt, inst.resource_count()}, &full, RngStream(s, 8)).matched,
              max_matching_size(g));
  }
}

TEST(RunStrategy, BahmaniVarOptTen) {
  EXPECT_NEAR(summary_for(generators::bahmani(100), {StrategyKind::kVarOpt, 10}).mean, 0.9926, 0.01);
}

TEST(RunStrategy, ConfigErrors) {
  const auto inst = generators::kvv_triangular(5);
  const auto g = realize(inst, RngStream(1, 0));
  EXPECT_THROW(run_strategy(g, {StrategyKind::kVarOpt, 3}, nullptr, RngStream(1, 1)), ConfigError);
  EXPECT_THROW(run_strategy(g, {StrategyKind::kMgs, 0}, nullptr, RngStream(1, 1)), ConfigError);
  EXPECT_THROW(run_strategy(g, {StrategyKind::kRandom, 0}, nullptr, RngStream(1, 1)), ConfigError);
  EXPECT_THROW(parse_strategy_kind("greedy"), UnknownStrategy);
  EXPECT_THROW(parse_weight_source("oracle"), ConfigError);
}

TEST(StrategyNames, RoundTrip) {
  for (auto k : {StrategyKind::kOffline, StrategyKind::kKvv, StrategyKind::kRandom, StrategyKind::kMgs,
                 StrategyKind::kVarOpt})
    EXPECT_EQ(parse_strategy_kind(to_string(k)), k);
  for (auto w : {WeightSource::kLp, WeightSource::kMonteCarlo, WeightSource::kFile})
    EXPECT_EQ(parse_weight_source(to_string(w)), w);
}

}  // namespace
}  // namespace sparsify
