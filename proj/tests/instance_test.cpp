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

#include "sparsify/errors.hpp"
#include "sparsify/generators.hpp"
#include "sparsify/instance.hpp"

namespace sparsify {
namespace {

StochasticInstance single_type(int n) {
  return StochasticInstance({"a"}, {{0, 1.0, {0}}}, n);
}

TEST(Realize, DegenerateDistribution) {
  const auto inst = single_type(3);
  const RealizedGraph g = realize(inst, RngStream(1, 0));
  ASSERT_EQ(g.arrival_count(), 3);
  EXPECT_EQ(g.edge_count(), 3u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(g.arrival_type(i), 0);
    ASSERT_EQ(g.neighbors(i).size(), 1u);
    EXPECT_EQ(g.neighbors(i)[0], 0);
  }
}

TEST(Realize, BinomialTypeCounts) {
  const StochasticInstance inst({"a", "b"}, {{0, 0.5, {0}}, {1, 0.5, {1}}}, 10000);
  const auto counts = micro_type_count(realize(inst, RngStream(2024, 0)));
  EXPECT_NEAR(counts.at(0), 5000, 150);
  EXPECT_EQ(counts.at(0) + counts.at(1), 10000);
}

TEST(Realize, CompleteUniformDegrees) {
  const auto inst = generators::complete_uniform(12);
  const RealizedGraph g = realize(inst, RngStream(1, 1));
  for (int i = 0; i < g.arrival_count(); ++i) EXPECT_EQ(g.neighbors(i).size(), 12u);
}

TEST(Realize, ReproducibleFromStream) {
  const auto inst = generators::kvv_triangular(30);
  const RealizedGraph a = realize(inst, RngStream(8, 3));
  const RealizedGraph b = realize(inst, RngStream(8, 3));
  const RealizedGraph c = realize(inst, RngStream(8, 4));
  bool differs = false;
  for (int i = 0; i < a.arrival_count(); ++i) {
    EXPECT_EQ(a.arrival_type(i), b.arrival_type(i));
    differs = differs || a.arrival_type(i) != c.arrival_type(i);
  }
  EXPECT_TRUE(differs);
}

TEST(Realize, EdgesFollowCompatibility) {
  const auto inst = generators::bahmani(20);
  const RealizedGraph g = realize(inst, RngStream(4, 4));
  std::size_t edges = 0;
  for (int i = 0; i < g.arrival_count(); ++i) {
    const auto& compat = inst.type(g.arrival_type(i)).compatible;
    ASSERT_TRUE(std::equal(compat.begin(), compat.end(), g.neighbors(i).begin(), g.neighbors(i).end()));
    edges += compat.size();
  }
  EXPECT_EQ(edges, g.edge_count());
}

TEST(MicroTypeCount, Examples) {
  const auto three = single_type(3), none = single_type(0);
  EXPECT_EQ(micro_type_count(realize(three, RngStream(1, 0))), (std::map<int, int>{{0, 3}}));
  EXPECT_TRUE(micro_type_count(realize(none, RngStream(1, 0))).empty());
}

TEST(MicroTypeCount, ConservesArrivals) {
  const auto inst = generators::partitioned_block(50);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto counts = micro_type_count(realize(inst, RngStream(s, 0)));
    int total = 0;
    for (const auto& [type, c] : counts) total += c;
    EXPECT_EQ(total, 50);
  }
}

TEST(StochasticInstance, Validation) {
  EXPECT_THROW(StochasticInstance({"a", "a"}, {{0, 1.0, {0}}}, 1), InvalidInput);
  EXPECT_THROW(StochasticInstance({"a"}, {{0, 0.6, {0}}}, 1), InvalidInput);
  EXPECT_THROW(StochasticInstance({"a"}, {{0, 1.0, {}}}, 1), InvalidInput);
  EXPECT_THROW(StochasticInstance({"a"}, {{0, 1.0, {1}}}, 1), InvalidInput);
  EXPECT_THROW(StochasticInstance({"a", "b"}, {{0, 1.0, {1, 0}}}, 1), InvalidInput);
  EXPECT_THROW(StochasticInstance({"a"}, {{0, 1.0, {0}}}, -1), InvalidInput);
  EXPECT_THROW(StochasticInstance({"a"}, {{0, -0.5, {0}}, {1, 1.5, {0}}}, 1), InvalidInput);
  EXPECT_NO_THROW(StochasticInstance({"a"}, {{0, 1.0, {}}}, 1, InstanceOptions{true}));
}

TEST(StochasticInstance, ExpectedArrivals) {
  const auto inst = generators::kvv_triangular(10);
  double total = 0.0;
  for (int j = 0; j < inst.type_count(); ++j) total += inst.expected_arrivals(j);
  EXPECT_NEAR(total, 10.0, 1e-12);
  EXPECT_EQ(inst.edge_count(), 55u);
}

TEST(InstanceJson, RoundTrip) {
  const auto inst = generators::tsm_tight(8);
  const auto back = instance_from_json(instance_to_json(inst));
  EXPECT_EQ(back.resources(), inst.resources());
  EXPECT_EQ(back.arrivals(), inst.arrivals());
  ASSERT_EQ(back.type_count(), inst.type_count());
  for (int j = 0; j < inst.type_count(); ++j) {
    EXPECT_DOUBLE_EQ(back.type(j).probability, inst.type(j).probability);
    EXPECT_EQ(back.type(j).compatible, inst.type(j).compatible);
  }
}

TEST(InstanceJson, MalformedDocuments) {
  EXPECT_THROW(instance_from_json(nlohmann::json::parse(R"({"resources":["a"]})")), FormatError);
  EXPECT_THROW(instance_from_json(nlohmann::json::parse(R"({"resources":["a"],"types":[{"p":"x","compatible":[0]}],"n":1})")),
               FormatError);
  EXPECT_THROW(instance_from_json(nlohmann::json::parse(R"({"resources":["a"],"types":[{"p":0.5,"compatible":[0]}],"n":1})")),
               InvalidInput);
}

}  // namespace
}  // namespace sparsify
