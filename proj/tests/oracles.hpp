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

// Independent reference implementations shared by the unit tests and the
// acceptance runner. None of them reuse library code paths.

#ifndef SPARSIFY_TESTS_ORACLES_HPP_
#define SPARSIFY_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "sparsify/instance.hpp"

namespace oracle {

// Exhaustive maximum matching: each left vertex either stays unmatched or
// takes a free neighbor. Exponential; intended for at most ~8 + 8 vertices.
inline int brute_force_matching(int left, int right, const std::vector<std::pair<int, int>>& edges) {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(left));
  for (auto [l, r] : edges) adj[l].push_back(r);
  int best = 0;
  auto rec = [&](auto&& self, int i, std::uint32_t used, int size) -> void {
    if (size + (left - i) <= best) return;
    if (i == left) {
      best = std::max(best, size);
      return;
    }
    for (int r : adj[i]) {
      if (!(used & (1u << r))) self(self, i + 1, used | (1u << r), size + 1);
    }
    self(self, i + 1, used, size);
  };
  (void)right;
  rec(rec, 0, 0u, 0);
  return best;
}

// Optimum of the expected-instance LP through its dual: a minimum weighted
// vertex cover where resources cost 1 and type j costs n * p_j. The dual
// constraint matrix is an edge-vertex incidence matrix of a bipartite graph,
// so an integral cover is optimal. Enumerates the covered type sets.
inline double lp_dual_optimum(const sparsify::StochasticInstance& inst) {
  const int m = inst.type_count();
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    double cost = 0.0;
    std::vector<char> covered(static_cast<std::size_t>(inst.resource_count()), 0);
    for (int j = 0; j < m; ++j) {
      if (mask & (1u << j)) {
        cost += inst.arrivals() * inst.type(j).probability;
      } else {
        for (int r : inst.type(j).compatible) covered[r] = 1;
      }
    }
    for (char c : covered) cost += c;
    best = std::min(best, cost);
  }
  return best;
}

// Expected number of distinct types seen in n uniform draws from n types.
inline double distinct_types_expected(int n) {
  return n * (1.0 - std::pow(1.0 - 1.0 / n, n));
}

// Probabilities solving sum_e min(1, tau x_e) = k by bisection on tau.
inline std::vector<double> bisection_threshold(const std::vector<double>& x, int k, double* tau_out = nullptr) {
  int positive = 0;
  for (double v : x) positive += v > 0.0;
  const double target = std::min(k, positive);
  auto mass = [&](double tau) {
    double s = 0.0;
    for (double v : x) s += std::min(1.0, tau * v);
    return s;
  };
  double lo = 0.0, hi = 1.0;
  while (mass(hi) < target - 1e-13) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mass(mid) < target ? lo : hi) = mid;
  }
  if (tau_out) *tau_out = hi;
  std::vector<double> p;
  for (double v : x) p.push_back(std::min(1.0, hi * v));
  return p;
}

}  // namespace oracle

#endif  // SPARSIFY_TESTS_ORACLES_HPP_
