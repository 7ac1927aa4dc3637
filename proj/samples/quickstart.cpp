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

// Builds the partitioned block family, learns edge marginals by Monte Carlo,
// sparsifies one realization with VarOpt and compares the matching it keeps
// against the offline maximum.

#include <iostream>

#include "sparsify/sparsify.hpp"

int main() {
  using namespace sparsify;

  const StochasticInstance instance = generators::partitioned_block(100);
  const FractionalSolution x = monte_carlo_weights(instance, 100, RngStream(1, 0));

  const RealizedGraph graph = realize(instance, RngStream(1, 1));
  const int offline = max_matching_size(graph);

  for (int k : {1, 3, 5, 10}) {
    const auto reports = varopt_sparsify(graph, x, k, RngStream(1, 2));
    const BipartiteEdgeList kept = sparsified_graph(graph, reports);
    const int matched = max_matching(kept).size;
    const auto split = heavy_light(x, k);
    const double guarantee = bounds::theorem_bound({x.objective(), split.heavy_mass, split.light_mass, k});
    std::cout << "k=" << k << "  edges kept " << kept.edges.size() << "/" << graph.edge_count() << "  matched "
              << matched << "/" << offline << "  guarantee on the mean " << guarantee << "\n";
  }
}
