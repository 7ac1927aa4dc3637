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
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "sparsify/errors.hpp"
#include "sparsify/instance.hpp"

// Adversarial synthetic families. All constructions are deterministic and
// use uniform type probabilities; randomness lives in realization.
namespace sparsify::generators {

// Three row blocks and three column blocks of sizes 0.3n, 0.4n, 0.3n.
// Resources are rows, types are columns. Edges: the diagonal, R1 x C2 and
// R2 x C3.
inline StochasticInstance partitioned_block(int n) {
  if (n < 10 || n % 10 != 0) throw BadSize("partitioned block needs n divisible by 10");
  const int b1 = 3 * n / 10;
  const int b2 = 4 * n / 10;
  std::vector<std::vector<int>> compatible(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    auto& c = compatible[j];
    if (j >= b1 && j < b1 + b2) {
      for (int r = 0; r < b1; ++r) c.push_back(r);
    } else if (j >= b1 + b2) {
      for (int r = b1; r < b1 + b2; ++r) c.push_back(r);
    }
    c.push_back(j);
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }
  return StochasticInstance::uniform(n, std::move(compatible), n);
}

// Type i is compatible with resources i..n-1.
inline StochasticInstance kvv_triangular(int n) {
  if (n < 1) throw BadSize("triangular family needs n >= 1");
  std::vector<std::vector<int>> compatible(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    for (int r = j; r < n; ++r) compatible[j].push_back(r);
  }
  return StochasticInstance::uniform(n, std::move(compatible), n);
}

// round(n / e), halves rounded up.
inline int bahmani_small_side(int n) {
  return static_cast<int>(std::floor(static_cast<double>(n) / std::numbers::e + 0.5));
}

// Offline side A2 (n resources, indices 0..n-1) and A1 (round(n/e), after A2).
// Types I1 (n) each see their private A2 partner and all of A1; types I2
// (round(n/e)) see all of A2. One arrival per type in expectation.
inline StochasticInstance bahmani(int n) {
  if (n < 3) throw BadSize("bahmani family needs n >= 3");
  const int small = bahmani_small_side(n);
  std::vector<std::vector<int>> compatible;
  compatible.reserve(static_cast<std::size_t>(n + small));
  for (int j = 0; j < n; ++j) {
    std::vector<int> c{j};
    for (int r = 0; r < small; ++r) c.push_back(n + r);
    compatible.push_back(std::move(c));
  }
  for (int j = 0; j < small; ++j) {
    std::vector<int> c(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) c[r] = r;
    compatible.push_back(std::move(c));
  }
  return StochasticInstance::uniform(n + small, std::move(compatible), n + small);
}

// n/4 disjoint 6-cycles u-x-v-y-w-z-u. Around each cycle the roles
// alternate starting from u, so u, v, w are types and x, y, z resources
// (cycle c owns resources 3c, 3c+1, 3c+2). Two dense blocks sit on top: n/4
// types K complete to X = {x_c}, and n/4 resources L (indices 3n/4..n-1)
// complete to the types W = {w_c}. Both sides have n vertices. Types are
// ordered u, v, w per cycle, then K. n arrivals.
inline StochasticInstance tsm_tight(int n) {
  if (n < 4 || n % 4 != 0) throw BadSize("TSM family needs n divisible by 4");
  const int q = n / 4;
  std::vector<int> xs, ls;
  for (int c = 0; c < q; ++c) xs.push_back(3 * c);
  for (int a = 0; a < q; ++a) ls.push_back(3 * q + a);
  std::vector<std::vector<int>> compatible;
  compatible.reserve(static_cast<std::size_t>(n));
  for (int c = 0; c < q; ++c) {
    const int x = 3 * c, y = 3 * c + 1, z = 3 * c + 2;
    compatible.push_back({x, z});  // u
    compatible.push_back({x, y});  // v
    std::vector<int> w{y, z};
    w.insert(w.end(), ls.begin(), ls.end());
    compatible.push_back(std::move(w));
  }
  for (int a = 0; a < q; ++a) compatible.push_back(xs);
  return StochasticInstance::uniform(n, std::move(compatible), n);
}

// Fully connected instance: n resources, n uniform types, every type sees
// every resource.
inline StochasticInstance complete_uniform(int n) {
  if (n < 1) throw BadSize("n must be >= 1");
  std::vector<int> all(static_cast<std::size_t>(n));
  for (int r = 0; r < n; ++r) all[r] = r;
  return StochasticInstance::uniform(n, std::vector<std::vector<int>>(static_cast<std::size_t>(n), all), n);
}

inline StochasticInstance exclusive_pairs(int n) {
  if (n < 1) throw BadSize("n must be >= 1");
  std::vector<std::vector<int>> compatible(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) compatible[j] = {j};
  return StochasticInstance::uniform(n, std::move(compatible), n);
}

enum class Family { kBlock, kTriangular, kBahmani, kTsm };

inline constexpr Family kAllFamilies[] = {Family::kBlock, Family::kTriangular, Family::kBahmani,
                                          Family::kTsm};

inline std::string_view to_string(Family f) {
  switch (f) {
    case Family::kBlock: return "block";
    case Family::kTriangular: return "triangular";
    case Family::kBahmani: return "bahmani";
    case Family::kTsm: return "tsm";
  }
  return "?";
}

inline Family parse_family(std::string_view name) {
  for (auto f : kAllFamilies) {
    if (to_string(f) == name) return f;
  }
  throw ConfigError("unknown family '" + std::string(name) + "'");
}

// Largest n whose Bahmani instance has at most `side` vertices per side.
inline int bahmani_n_for_side(int side) {
  int n = 0;
  for (int c = 3; c + bahmani_small_side(c) <= side; ++c) n = c;
  if (n == 0) throw BadSize("bahmani family needs at least 4 vertices per side");
  return n;
}

// How the size parameter of make() is read: as the family's own n, or as
// the number of vertices per side. The two agree except for bahmani.
enum class Sizing { kParameter, kPerSide };

inline StochasticInstance make(Family f, int n, Sizing sizing = Sizing::kParameter) {
  if (f == Family::kBahmani && sizing == Sizing::kPerSide) n = bahmani_n_for_side(n);
  switch (f) {
    case Family::kBlock: return partitioned_block(n);
    case Family::kTriangular: return kvv_triangular(n);
    case Family::kBahmani: return bahmani(n);
    case Family::kTsm: return tsm_tight(n);
  }
  throw ConfigError("unknown family");
}

}  // namespace sparsify::generators
