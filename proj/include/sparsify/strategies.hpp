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
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sparsify/errors.hpp"
#include "sparsify/instance.hpp"
#include "sparsify/matching.hpp"
#include "sparsify/rng.hpp"
#include "sparsify/varopt.hpp"
#include "sparsify/weights.hpp"

namespace sparsify {

enum class StrategyKind { kOffline, kKvv, kRandom, kMgs, kVarOpt };
enum class WeightSource { kLp, kMonteCarlo, kFile };

inline std::string_view to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::kOffline: return "offline";
    case StrategyKind::kKvv: return "kvv";
    case StrategyKind::kRandom: return "random";
    case StrategyKind::kMgs: return "mgs";
    case StrategyKind::kVarOpt: return "varopt";
  }
  return "?";
}

inline StrategyKind parse_strategy_kind(std::string_view name) {
  for (auto kind : {StrategyKind::kOffline, StrategyKind::kKvv, StrategyKind::kRandom,
                    StrategyKind::kMgs, StrategyKind::kVarOpt}) {
    if (to_string(kind) == name) return kind;
  }
  throw UnknownStrategy("unknown strategy '" + std::string(name) + "'");
}

inline std::string_view to_string(WeightSource source) {
  switch (source) {
    case WeightSource::kLp: return "lp";
    case WeightSource::kMonteCarlo: return "montecarlo";
    case WeightSource::kFile: return "file";
  }
  return "?";
}

inline WeightSource parse_weight_source(std::string_view name) {
  for (auto s : {WeightSource::kLp, WeightSource::kMonteCarlo, WeightSource::kFile}) {
    if (to_string(s) == name) return s;
  }
  throw ConfigError("unknown weight source '" + std::string(name) + "'");
}

struct StrategyConfig {
  StrategyKind kind = StrategyKind::kOffline;
  int k = 0;  // only meaningful for the sparsifiers
  WeightSource weights = WeightSource::kMonteCarlo;

  bool uses_budget() const { return kind == StrategyKind::kRandom || kind == StrategyKind::kVarOpt; }
  bool uses_weights() const { return kind == StrategyKind::kMgs || kind == StrategyKind::kVarOpt; }

  void validate() const {
    if (uses_budget() && k < 1) throw ConfigError(std::string(to_string(kind)) + " needs k >= 1");
  }
};

// The edges S_i one arrival keeps, aligned with their inclusion
// probabilities and inverse-probability weights.
struct SparsifierReport {
  int arrival_index = 0;
  std::vector<int> selected;
  std::vector<double> inclusion_probs;
  std::vector<double> ipw_weights;
};

struct StrategyOutcome {
  int matched = 0;
  int sparsified_edges = 0;
  std::vector<bool> arrival_matched;
};

// Phi_{k,x}: every arrival runs a VarOpt_k draw over its compatible edges
// weighted by x_ij. The draw for arrival i uses only its type, x, k and the
// substream rng.child(i). Types with no positive weight fall back to uniform.
inline std::vector<SparsifierReport> varopt_sparsify(const RealizedGraph& graph,
                                                     const FractionalSolution& x, int k,
                                                     const RngStream& rng) {
  if (k < 1) throw InvalidInput("k must be >= 1");
  std::vector<SparsifierReport> reports;
  reports.reserve(static_cast<std::size_t>(graph.arrival_count()));
  std::vector<WeightedItem> items;
  for (int i = 0; i < graph.arrival_count(); ++i) {
    SparsifierReport report;
    report.arrival_index = i;
    const int j = graph.arrival_type(i);
    const auto compatible = graph.neighbors(i);
    if (!compatible.empty()) {
      const auto& row = x.row(j);
      items.clear();
      bool any_positive = false;
      for (std::size_t a = 0; a < compatible.size(); ++a) {
        items.push_back({compatible[a], row[a]});
        any_positive = any_positive || row[a] > 0.0;
      }
      if (!any_positive) {
        for (auto& it : items) it.weight = 1.0 / static_cast<double>(items.size());
      }
      RngStream arrival_rng = rng.child(static_cast<std::uint64_t>(i));
      VarOptSample sample = draw(items, k, arrival_rng);
      report.ipw_weights = std::move(sample.ipw_weight);
      for (auto id : sample.included) {
        report.selected.push_back(static_cast<int>(id));
        report.inclusion_probs.push_back(sample.inclusion_probability(id));
      }
    }
    reports.push_back(std::move(report));
  }
  return reports;
}

// Uniform k-subset of R_i per arrival, drawn from rng.child(i).
inline std::vector<SparsifierReport> random_subgraph(const RealizedGraph& graph, int k,
                                                     const RngStream& rng) {
  if (k < 1) throw InvalidInput("k must be >= 1");
  std::vector<SparsifierReport> reports;
  reports.reserve(static_cast<std::size_t>(graph.arrival_count()));
  for (int i = 0; i < graph.arrival_count(); ++i) {
    SparsifierReport report;
    report.arrival_index = i;
    const auto compatible = graph.neighbors(i);
    std::vector<int> pool(compatible.begin(), compatible.end());
    const std::size_t keep = std::min(pool.size(), static_cast<std::size_t>(k));
    RngStream arrival_rng = rng.child(static_cast<std::uint64_t>(i));
    for (std::size_t a = 0; a < keep; ++a) {
      const std::size_t b = a + arrival_rng.below(pool.size() - a);
      std::swap(pool[a], pool[b]);
    }
    pool.resize(keep);
    std::sort(pool.begin(), pool.end());
    if (!pool.empty()) {
      const double pi = static_cast<double>(keep) / static_cast<double>(compatible.size());
      report.inclusion_probs.assign(keep, pi);
      report.ipw_weights.assign(keep, 1.0 / static_cast<double>(keep));
    }
    report.selected = std::move(pool);
    reports.push_back(std::move(report));
  }
  return reports;
}

// G_S as an edge list; `weights`, when given, receives the aligned
// inverse-probability weights.
inline BipartiteEdgeList sparsified_graph(const RealizedGraph& graph,
                                          const std::vector<SparsifierReport>& reports,
                                          std::vector<double>* weights = nullptr) {
  BipartiteEdgeList out{graph.arrival_count(), graph.resource_count(), {}};
  if (weights) weights->clear();
  for (const auto& r : reports) {
    for (std::size_t a = 0; a < r.selected.size(); ++a) {
      out.edges.emplace_back(r.arrival_index, r.selected[a]);
      if (weights) weights->push_back(r.ipw_weights[a]);
    }
  }
  return out;
}

// KVV Ranking: one random permanent rank over resources; each arrival, in
// order, takes its best-ranked free neighbor.
inline StrategyOutcome kvv_ranking(const RealizedGraph& graph, RngStream rng) {
  const int v = graph.resource_count();
  std::vector<int> order(static_cast<std::size_t>(v));
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(std::span<int>(order));
  std::vector<int> rank(static_cast<std::size_t>(v));
  for (int pos = 0; pos < v; ++pos) rank[order[pos]] = pos;

  StrategyOutcome out;
  out.arrival_matched.assign(static_cast<std::size_t>(graph.arrival_count()), false);
  std::vector<bool> taken(static_cast<std::size_t>(v), false);
  for (int i = 0; i < graph.arrival_count(); ++i) {
    int best = -1;
    for (int r : graph.neighbors(i)) {
      if (!taken[r] && (best < 0 || rank[r] < rank[best])) best = r;
    }
    if (best >= 0) {
      taken[best] = true;
      out.arrival_matched[i] = true;
      ++out.matched;
    }
  }
  return out;
}

// Two guidance functions over types, sampled independently from the
// marginals x: in each, type j is pointed at resource r with probability
// x_jr and at nothing with the leftover mass 1 - sum_r x_jr.
struct GuidanceMatchings {
  std::vector<int> first;   // -1 when absent
  std::vector<int> second;  // -1 when absent
};

namespace detail {

inline int sample_from_row(const std::vector<double>& row, const std::vector<int>& resources, double u) {
  for (std::size_t a = 0; a < row.size(); ++a) {
    if (u < row[a]) return resources[a];
    u -= row[a];
  }
  return -1;
}

}  // namespace detail

inline GuidanceMatchings sample_guidance(const FractionalSolution& x, RngStream& rng) {
  GuidanceMatchings g;
  g.first.assign(static_cast<std::size_t>(x.type_count()), -1);
  g.second.assign(static_cast<std::size_t>(x.type_count()), -1);
  for (int j = 0; j < x.type_count(); ++j) {
    g.first[j] = detail::sample_from_row(x.row(j), x.compatible(j), rng.uniform());
    g.second[j] = detail::sample_from_row(x.row(j), x.compatible(j), rng.uniform());
  }
  return g;
}

// MGS: each arrival tries its type's first suggestion, then its second, and
// commits irrevocably to the first free one.
inline StrategyOutcome mgs(const RealizedGraph& graph, const FractionalSolution& x, RngStream rng) {
  const GuidanceMatchings guide = sample_guidance(x, rng);
  StrategyOutcome out;
  out.arrival_matched.assign(static_cast<std::size_t>(graph.arrival_count()), false);
  std::vector<bool> taken(static_cast<std::size_t>(graph.resource_count()), false);
  for (int i = 0; i < graph.arrival_count(); ++i) {
    const int j = graph.arrival_type(i);
    for (int r : {guide.first[j], guide.second[j]}) {
      if (r >= 0 && !taken[r]) {
        taken[r] = true;
        out.arrival_matched[i] = true;
        ++out.matched;
        break;
      }
    }
  }
  return out;
}

namespace detail {

inline StrategyOutcome outcome_from_matching(const BipartiteEdgeList& g, int sparsified_edges) {
  const MatchingResult m = max_matching(g);
  StrategyOutcome out;
  out.matched = m.size;
  out.sparsified_edges = sparsified_edges;
  out.arrival_matched.assign(static_cast<std::size_t>(g.left_count), false);
  for (const auto& [l, r] : m.pairs) out.arrival_matched[l] = true;
  return out;
}

}  // namespace detail

// Runs one strategy on one realization. Sparsifiers report the maximum
// matching of G_S; online baselines report their own greedy count.
// `x` is required for varopt and mgs.
inline StrategyOutcome run_strategy(const RealizedGraph& graph, const StrategyConfig& config,
                                    const FractionalSolution* x, const RngStream& rng) {
  config.validate();
  if (config.uses_weights() && x == nullptr) {
    throw ConfigError(std::string(to_string(config.kind)) + " needs a fractional solution");
  }
  switch (config.kind) {
    case StrategyKind::kOffline: {
      const auto g = to_edge_list(graph);
      return detail::outcome_from_matching(g, static_cast<int>(g.edges.size()));
    }
    case StrategyKind::kKvv:
      return kvv_ranking(graph, rng);
    case StrategyKind::kMgs:
      return mgs(graph, *x, rng);
    case StrategyKind::kRandom: {
      const auto g = sparsified_graph(graph, random_subgraph(graph, config.k, rng));
      return detail::outcome_from_matching(g, static_cast<int>(g.edges.size()));
    }
    case StrategyKind::kVarOpt: {
      const auto g = sparsified_graph(graph, varopt_sparsify(graph, *x, config.k, rng));
      return detail::outcome_from_matching(g, static_cast<int>(g.edges.size()));
    }
  }
  throw UnknownStrategy("unhandled strategy");
}

}  // namespace sparsify
