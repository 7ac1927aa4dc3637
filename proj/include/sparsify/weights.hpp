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

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sparsify/errors.hpp"
#include "sparsify/instance.hpp"
#include "sparsify/matching.hpp"
#include "sparsify/maxflow.hpp"
#include "sparsify/rng.hpp"

namespace sparsify {

inline constexpr double kCapacityTolerance = 1e-7;
inline constexpr double kTypeLimitTolerance = 1e-9;

// Feasible point of the expected-instance LP. values[j][a] is x_ij for the
// a-th compatible resource of type j. The type masses n * p_j and the
// compatibility lists are copied from the instance so the solution can be
// inspected on its own.
class FractionalSolution {
 public:
  FractionalSolution(const StochasticInstance& instance, std::vector<std::vector<double>> values)
      : arrivals_(instance.arrivals()), resource_count_(instance.resource_count()),
        values_(std::move(values)) {
    if (static_cast<int>(values_.size()) != instance.type_count()) {
      throw InvalidInput("fractional solution must have one row per type");
    }
    type_mass_.reserve(values_.size());
    support_.reserve(values_.size());
    for (int j = 0; j < instance.type_count(); ++j) {
      const auto& t = instance.type(j);
      if (values_[j].size() != t.compatible.size()) {
        throw InvalidInput("fractional row size must match the compatibility list");
      }
      for (double v : values_[j]) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidInput("x_ij must be finite and >= 0");
      }
      type_mass_.push_back(instance.expected_arrivals(j));
      support_.push_back(t.compatible);
    }
  }

  int arrivals() const { return arrivals_; }
  int type_count() const { return static_cast<int>(values_.size()); }
  int resource_count() const { return resource_count_; }
  double type_mass(int j) const { return type_mass_[j]; }
  const std::vector<int>& compatible(int j) const { return support_[j]; }
  const std::vector<double>& row(int j) const { return values_[j]; }
  const std::vector<std::vector<double>>& values() const { return values_; }

  // x_ij, or 0 when resource i is not compatible with type j.
  double value(int j, int resource) const {
    const auto& c = support_[j];
    auto it = std::lower_bound(c.begin(), c.end(), resource);
    if (it == c.end() || *it != resource) return 0.0;
    return values_[j][static_cast<std::size_t>(it - c.begin())];
  }

  // Z(x) = sum_j n p_j sum_i x_ij.
  double objective() const {
    double z = 0.0;
    for (std::size_t j = 0; j < values_.size(); ++j) {
      double row_sum = 0.0;
      for (double v : values_[j]) row_sum += v;
      z += type_mass_[j] * row_sum;
    }
    return z;
  }

  std::vector<double> resource_loads() const {
    std::vector<double> loads(static_cast<std::size_t>(resource_count_), 0.0);
    for (std::size_t j = 0; j < values_.size(); ++j) {
      for (std::size_t a = 0; a < values_[j].size(); ++a) {
        loads[support_[j][a]] += type_mass_[j] * values_[j][a];
      }
    }
    return loads;
  }

  double max_type_sum() const {
    double best = 0.0;
    for (const auto& row : values_) {
      double s = 0.0;
      for (double v : row) s += v;
      best = std::max(best, s);
    }
    return best;
  }

  bool feasible() const {
    for (double load : resource_loads()) {
      if (load > 1.0 + kCapacityTolerance) return false;
    }
    return max_type_sum() <= 1.0 + kTypeLimitTolerance;
  }

 private:
  int arrivals_;
  int resource_count_;
  std::vector<std::vector<double>> values_;
  std::vector<double> type_mass_;
  std::vector<std::vector<int>> support_;
};

// Optimal expected-instance LP solution.
//
// With y_ij = n p_j x_ij the LP becomes
//   max sum y_ij  s.t.  sum_j y_ij <= 1 (resource),  sum_i y_ij <= n p_j (type),
// which is exactly a max-flow on source -> type (capacity n p_j),
// type -> resource (uncapacitated), resource -> sink (capacity 1).
inline FractionalSolution solve_expected_lp(const StochasticInstance& instance) {
  const int m = instance.type_count();
  const int v = instance.resource_count();
  for (int j = 0; j < m; ++j) {
    if (instance.type(j).probability <= 0.0) {
      throw DegenerateType("type " + std::to_string(j) + " has zero probability");
    }
  }
  const int source = 0;
  const int sink = 1 + m + v;
  detail::RealMaxFlow flow(sink + 1);
  const double unbounded = static_cast<double>(v) + 1.0;
  std::vector<std::vector<int>> arc_ids(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    flow.add_arc(source, 1 + j, instance.expected_arrivals(j));
    for (int r : instance.type(j).compatible) {
      arc_ids[j].push_back(flow.add_arc(1 + j, 1 + m + r, unbounded));
    }
  }
  for (int r = 0; r < v; ++r) flow.add_arc(1 + m + r, sink, 1.0);
  flow.solve(source, sink);

  std::vector<std::vector<double>> values(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    const double mass = instance.expected_arrivals(j);
    for (int id : arc_ids[j]) {
      const double y = std::max(0.0, flow.flow(id));
      values[j].push_back(mass > 0.0 ? y / mass : 0.0);
    }
  }
  return FractionalSolution(instance, std::move(values));
}

inline constexpr int kDefaultMonteCarloSimulations = 100;

// Empirical match probabilities x_ij = C_ij / A_j from M realizations, each
// matched by Hopcroft-Karp under a random vertex relabeling. Types never
// matched in any simulation fall back to uniform 1/|Gamma(t_j)|. Resources
// whose empirical load exceeds 1 have their column scaled down to load 1.
inline FractionalSolution monte_carlo_weights(const StochasticInstance& instance, int simulations,
                                              RngStream rng) {
  if (simulations < 1) throw InvalidInput("Monte Carlo simulation count must be >= 1");
  const int m = instance.type_count();
  std::vector<std::vector<double>> matched(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) matched[j].assign(instance.type(j).compatible.size(), 0.0);
  std::vector<double> seen(static_cast<std::size_t>(m), 0.0);

  for (int s = 0; s < simulations; ++s) {
    const RngStream sim = rng.child(static_cast<std::uint64_t>(s));
    const RealizedGraph graph = realize(instance, sim.child("realize"));
    const MatchingResult result = max_matching_shuffled(to_edge_list(graph), sim.child("shuffle"));
    for (int j : graph.arrival_types()) seen[j] += 1.0;
    for (const auto& [arrival, resource] : result.pairs) {
      const int j = graph.arrival_type(arrival);
      const auto& c = instance.type(j).compatible;
      const auto pos = std::lower_bound(c.begin(), c.end(), resource) - c.begin();
      matched[j][static_cast<std::size_t>(pos)] += 1.0;
    }
  }

  std::vector<std::vector<double>> values(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    const auto degree = matched[j].size();
    double total = 0.0;
    for (double c : matched[j]) total += c;
    values[j].resize(degree);
    for (std::size_t a = 0; a < degree; ++a) {
      values[j][a] = total > 0.0 ? matched[j][a] / seen[j] : 1.0 / static_cast<double>(degree);
    }
  }

  FractionalSolution raw(instance, values);
  const std::vector<double> loads = raw.resource_loads();
  for (int j = 0; j < m; ++j) {
    const auto& c = instance.type(j).compatible;
    for (std::size_t a = 0; a < c.size(); ++a) {
      const double load = loads[c[a]];
      if (load > 1.0) values[j][a] /= load;
    }
  }
  return FractionalSolution(instance, std::move(values));
}

struct SolutionEdge {
  int type = 0;
  int resource = 0;
  double x = 0.0;
};

struct HeavyLightSplit {
  int k = 1;
  std::vector<SolutionEdge> heavy_edges;  // x_ij > 1/k
  std::vector<SolutionEdge> light_edges;  // 0 < x_ij <= 1/k
  double heavy_mass = 0.0;                // Z_H
  double light_mass = 0.0;                // Z_L
};

inline HeavyLightSplit heavy_light(const FractionalSolution& x, int k) {
  if (k < 1) throw InvalidInput("k must be >= 1");
  HeavyLightSplit out;
  out.k = k;
  const double cut = 1.0 / static_cast<double>(k);
  for (int j = 0; j < x.type_count(); ++j) {
    const auto& row = x.row(j);
    for (std::size_t a = 0; a < row.size(); ++a) {
      if (row[a] <= 0.0) continue;
      const SolutionEdge e{j, x.compatible(j)[a], row[a]};
      if (row[a] > cut) {
        out.heavy_edges.push_back(e);
        out.heavy_mass += x.type_mass(j) * row[a];
      } else {
        out.light_edges.push_back(e);
        out.light_mass += x.type_mass(j) * row[a];
      }
    }
  }
  return out;
}

// Averages x over classes of interchangeable resources (identical sets of
// compatible types). Objective and feasibility are preserved, and every
// edge into a class of size l ends up at most 1/l.
inline FractionalSolution spread_equivalence_classes(const StochasticInstance& instance,
                                                     const FractionalSolution& x) {
  const int v = instance.resource_count();
  std::vector<std::vector<int>> membership(static_cast<std::size_t>(v));
  for (int j = 0; j < instance.type_count(); ++j) {
    for (int r : instance.type(j).compatible) membership[r].push_back(j);
  }
  std::map<std::vector<int>, std::vector<int>> classes;
  for (int r = 0; r < v; ++r) {
    if (!membership[r].empty()) classes[membership[r]].push_back(r);
  }

  std::vector<std::vector<double>> values = x.values();
  auto position = [&](int j, int r) {
    const auto& c = instance.type(j).compatible;
    return static_cast<std::size_t>(std::lower_bound(c.begin(), c.end(), r) - c.begin());
  };
  for (const auto& [types, members] : classes) {
    if (members.size() < 2) continue;
    const double size = static_cast<double>(members.size());
    for (int j : types) {
      double total = 0.0;
      for (int r : members) total += values[j][position(j, r)];
      for (int r : members) values[j][position(j, r)] = total / size;
    }
  }
  return FractionalSolution(instance, std::move(values));
}

// JSON: {"entries": [{"type": j, "resource": i, "x": float}], "n": int}
inline nlohmann::json solution_to_json(const FractionalSolution& x) {
  nlohmann::json entries = nlohmann::json::array();
  for (int j = 0; j < x.type_count(); ++j) {
    const auto& row = x.row(j);
    for (std::size_t a = 0; a < row.size(); ++a) {
      entries.push_back({{"type", j}, {"resource", x.compatible(j)[a]}, {"x", row[a]}});
    }
  }
  return {{"entries", std::move(entries)}, {"n", x.arrivals()}};
}

inline FractionalSolution solution_from_json(const StochasticInstance& instance,
                                             const nlohmann::json& doc) {
  std::vector<std::vector<double>> values(static_cast<std::size_t>(instance.type_count()));
  for (int j = 0; j < instance.type_count(); ++j) {
    values[j].assign(instance.type(j).compatible.size(), 0.0);
  }
  try {
    if (doc.at("n").get<int>() != instance.arrivals()) {
      throw FormatError("weights were learned for a different arrival count");
    }
    for (const auto& e : doc.at("entries")) {
      const int j = e.at("type").get<int>();
      const int r = e.at("resource").get<int>();
      if (j < 0 || j >= instance.type_count()) throw FormatError("entry type out of range");
      const auto& c = instance.type(j).compatible;
      auto it = std::lower_bound(c.begin(), c.end(), r);
      if (it == c.end() || *it != r) throw FormatError("entry on an incompatible (type, resource) pair");
      values[j][static_cast<std::size_t>(it - c.begin())] = e.at("x").get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed weights document: ") + e.what());
  }
  return FractionalSolution(instance, std::move(values));
}

}  // namespace sparsify
