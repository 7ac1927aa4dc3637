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
#include <limits>
#include <queue>
#include <vector>

namespace sparsify::detail {

// Dinic max-flow over real capacities. Residuals below `eps` are treated as
// saturated.
class RealMaxFlow {
 public:
  explicit RealMaxFlow(int nodes, double eps = 1e-12)
      : adjacency_(static_cast<std::size_t>(nodes)), level_(static_cast<std::size_t>(nodes)),
        iter_(static_cast<std::size_t>(nodes)), eps_(eps) {}

  // Returns the arc index for later flow queries.
  int add_arc(int from, int to, double capacity) {
    const int id = static_cast<int>(arcs_.size());
    arcs_.push_back({to, capacity, 0.0});
    arcs_.push_back({from, 0.0, 0.0});
    adjacency_[from].push_back(id);
    adjacency_[to].push_back(id + 1);
    return id;
  }

  double flow(int arc) const { return arcs_[static_cast<std::size_t>(arc)].flow; }

  double solve(int source, int sink) {
    double total = 0.0;
    while (bfs(source, sink)) {
      std::fill(iter_.begin(), iter_.end(), 0);
      for (;;) {
        const double pushed = dfs(source, sink, std::numeric_limits<double>::infinity());
        if (pushed <= eps_) break;
        total += pushed;
      }
    }
    return total;
  }

 private:
  struct Arc {
    int to;
    double capacity;
    double flow;
  };

  double residual(int id) const {
    const auto& a = arcs_[static_cast<std::size_t>(id)];
    return a.capacity - a.flow;
  }

  bool bfs(int source, int sink) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<int> q;
    level_[source] = 0;
    q.push(source);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int id : adjacency_[u]) {
        const int v = arcs_[id].to;
        if (level_[v] < 0 && residual(id) > eps_) {
          level_[v] = level_[u] + 1;
          q.push(v);
        }
      }
    }
    return level_[sink] >= 0;
  }

  double dfs(int u, int sink, double limit) {
    if (u == sink) return limit;
    for (auto& a = iter_[u]; a < adjacency_[u].size(); ++a) {
      const int id = adjacency_[u][a];
      const int v = arcs_[id].to;
      if (level_[v] != level_[u] + 1 || residual(id) <= eps_) continue;
      const double pushed = dfs(v, sink, std::min(limit, residual(id)));
      if (pushed > eps_) {
        arcs_[id].flow += pushed;
        arcs_[id ^ 1].flow -= pushed;
        return pushed;
      }
    }
    return 0.0;
  }

  std::vector<Arc> arcs_;
  std::vector<std::vector<int>> adjacency_;
  std::vector<int> level_;
  std::vector<std::size_t> iter_;
  double eps_;
};

}  // namespace sparsify::detail
