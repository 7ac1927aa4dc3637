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
#include <queue>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "sparsify/errors.hpp"
#include "sparsify/instance.hpp"
#include "sparsify/rng.hpp"

namespace sparsify {

// Left vertices are arrivals, right vertices are resources.
struct BipartiteEdgeList {
  int left_count = 0;
  int right_count = 0;
  std::vector<std::pair<int, int>> edges;

  void validate() const {
    if (left_count < 0 || right_count < 0) throw InvalidInput("negative vertex count");
    std::set<std::pair<int, int>> seen;
    for (const auto& e : edges) {
      if (e.first < 0 || e.first >= left_count || e.second < 0 || e.second >= right_count) {
        throw InvalidInput("edge endpoint out of range");
      }
      if (!seen.insert(e).second) throw InvalidInput("duplicate edge");
    }
  }
};

inline BipartiteEdgeList to_edge_list(const RealizedGraph& graph) {
  BipartiteEdgeList out{graph.arrival_count(), graph.resource_count(), {}};
  out.edges.reserve(graph.edge_count());
  for (int i = 0; i < graph.arrival_count(); ++i) {
    for (int r : graph.neighbors(i)) out.edges.emplace_back(i, r);
  }
  return out;
}

struct MatchingResult {
  int size = 0;
  std::vector<std::pair<int, int>> pairs;  // (left, right), ascending by left
  std::vector<int> unmatched_left;
};

namespace detail {

// Hopcroft-Karp over a CSR adjacency. Neighbors are explored in adjacency
// order, so the result is a deterministic function of the edge order.
class HopcroftKarp {
 public:
  HopcroftKarp(int left_count, int right_count, std::span<const std::pair<int, int>> edges)
      : left_(left_count), right_(right_count), offsets_(static_cast<std::size_t>(left_count) + 1, 0) {
    for (const auto& e : edges) ++offsets_[static_cast<std::size_t>(e.first) + 1];
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
    targets_.resize(edges.size());
    std::vector<int> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& e : edges) targets_[static_cast<std::size_t>(fill[e.first]++)] = e.second;
    match_left_.assign(static_cast<std::size_t>(left_), -1);
    match_right_.assign(static_cast<std::size_t>(right_), -1);
    dist_.assign(static_cast<std::size_t>(left_), 0);
    iter_.assign(static_cast<std::size_t>(left_), 0);
  }

  int run() {
    int size = 0;
    while (bfs()) {
      for (int u = 0; u < left_; ++u) iter_[u] = offsets_[u];
      for (int u = 0; u < left_; ++u) {
        if (match_left_[u] == -1 && dfs(u)) ++size;
      }
    }
    return size;
  }

  const std::vector<int>& match_left() const { return match_left_; }

 private:
  static constexpr int kInf = std::numeric_limits<int>::max();

  bool bfs() {
    std::queue<int> q;
    bool found = false;
    for (int u = 0; u < left_; ++u) {
      if (match_left_[u] == -1) {
        dist_[u] = 0;
        q.push(u);
      } else {
        dist_[u] = kInf;
      }
    }
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int a = offsets_[u]; a < offsets_[u + 1]; ++a) {
        const int w = match_right_[targets_[a]];
        if (w == -1) {
          found = true;
        } else if (dist_[w] == kInf) {
          dist_[w] = dist_[u] + 1;
          q.push(w);
        }
      }
    }
    return found;
  }

  // Iterative DFS along the layered graph.
  bool dfs(int root) {
    std::vector<int> stack{root};
    while (!stack.empty()) {
      const int u = stack.back();
      bool advanced = false;
      for (int& a = iter_[u]; a < offsets_[u + 1]; ++a) {
        const int v = targets_[a];
        const int w = match_right_[v];
        if (w == -1) {
          // Augment along the stack.
          for (std::size_t s = stack.size(); s-- > 0;) {
            const int x = stack[s];
            const int y = targets_[iter_[x]];
            match_right_[y] = x;
            match_left_[x] = y;
          }
          return true;
        }
        if (dist_[w] == dist_[u] + 1) {
          stack.push_back(w);
          advanced = true;
          break;
        }
      }
      if (!advanced) {
        dist_[u] = kInf;
        stack.pop_back();
        if (!stack.empty()) ++iter_[stack.back()];
      }
    }
    return false;
  }

  int left_;
  int right_;
  std::vector<int> offsets_;
  std::vector<int> targets_;
  std::vector<int> match_left_;
  std::vector<int> match_right_;
  std::vector<int> dist_;
  std::vector<int> iter_;
};

inline MatchingResult to_result(const std::vector<int>& match_left) {
  MatchingResult out;
  for (int u = 0; u < static_cast<int>(match_left.size()); ++u) {
    if (match_left[u] >= 0) {
      out.pairs.emplace_back(u, match_left[u]);
    } else {
      out.unmatched_left.push_back(u);
    }
  }
  out.size = static_cast<int>(out.pairs.size());
  return out;
}

}  // namespace detail

// Exact maximum-cardinality matching (Hopcroft-Karp, O(E sqrt(V))).
inline MatchingResult max_matching(const BipartiteEdgeList& graph) {
  graph.validate();
  detail::HopcroftKarp hk(graph.left_count, graph.right_count, graph.edges);
  hk.run();
  return detail::to_result(hk.match_left());
}

// Cardinality only; skips validation and result assembly.
inline int max_matching_size(int left_count, int right_count,
                             std::span<const std::pair<int, int>> edges) {
  detail::HopcroftKarp hk(left_count, right_count, edges);
  return hk.run();
}

inline int max_matching_size(const RealizedGraph& graph) {
  const auto edges = to_edge_list(graph);
  return max_matching_size(edges.left_count, edges.right_count, edges.edges);
}

// Maximum matching computed under a uniformly random relabeling of both
// sides and mapped back; randomizes which of several optimal matchings is
// returned.
inline MatchingResult max_matching_shuffled(const BipartiteEdgeList& graph, RngStream& rng) {
  graph.validate();
  std::vector<int> left_perm(static_cast<std::size_t>(graph.left_count));
  std::vector<int> right_perm(static_cast<std::size_t>(graph.right_count));
  std::iota(left_perm.begin(), left_perm.end(), 0);
  std::iota(right_perm.begin(), right_perm.end(), 0);
  rng.shuffle(std::span<int>(left_perm));
  rng.shuffle(std::span<int>(right_perm));

  std::vector<std::pair<int, int>> relabeled;
  relabeled.reserve(graph.edges.size());
  for (const auto& [l, r] : graph.edges) relabeled.emplace_back(left_perm[l], right_perm[r]);
  std::sort(relabeled.begin(), relabeled.end());

  detail::HopcroftKarp hk(graph.left_count, graph.right_count, relabeled);
  hk.run();

  std::vector<int> left_inv(left_perm.size()), right_inv(right_perm.size());
  for (std::size_t a = 0; a < left_perm.size(); ++a) left_inv[left_perm[a]] = static_cast<int>(a);
  for (std::size_t a = 0; a < right_perm.size(); ++a) right_inv[right_perm[a]] = static_cast<int>(a);
  std::vector<int> match_left(left_perm.size(), -1);
  const auto& relabeled_match = hk.match_left();
  for (std::size_t u = 0; u < relabeled_match.size(); ++u) {
    if (relabeled_match[u] >= 0) match_left[left_inv[u]] = right_inv[relabeled_match[u]];
  }
  return detail::to_result(match_left);
}

inline MatchingResult max_matching_shuffled(const BipartiteEdgeList& graph, RngStream&& rng) {
  return max_matching_shuffled(graph, rng);
}

// Loads Y_i of inverse-probability weights at each resource and the value
// of the fractional matching f_e = w_e / max(1, Y_i).
struct FractionalLoadReport {
  std::vector<double> per_resource_load;
  double excess = 0.0;        // sum_i max(0, Y_i - 1)
  double scaled_value = 0.0;  // ||f||_1
};

// `weights` is aligned with `graph.edges`.
inline FractionalLoadReport fractional_scaled_matching(const BipartiteEdgeList& graph,
                                                       std::span<const double> weights) {
  constexpr double kArrivalTolerance = 1e-9;
  if (weights.size() != graph.edges.size()) throw InvalidInput("one weight per edge is required");
  std::vector<double> arrival_sum(static_cast<std::size_t>(graph.left_count), 0.0);
  FractionalLoadReport out;
  out.per_resource_load.assign(static_cast<std::size_t>(graph.right_count), 0.0);
  for (std::size_t a = 0; a < weights.size(); ++a) {
    const auto [l, r] = graph.edges[a];
    if (weights[a] < 0.0) throw InvalidInput("negative edge weight");
    arrival_sum[l] += weights[a];
    out.per_resource_load[r] += weights[a];
  }
  for (std::size_t l = 0; l < arrival_sum.size(); ++l) {
    if (arrival_sum[l] > 1.0 + kArrivalTolerance) {
      throw ArrivalOverflow("arrival " + std::to_string(l) + " sends weight " +
                            std::to_string(arrival_sum[l]));
    }
  }
  for (double y : out.per_resource_load) {
    out.excess += std::max(0.0, y - 1.0);
    out.scaled_value += std::min(1.0, y);
  }
  return out;
}

}  // namespace sparsify
