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
#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sparsify/errors.hpp"
#include "sparsify/rng.hpp"

namespace sparsify {

// A request type t_j: single-draw probability and the sorted list of
// compatible resource indices.
struct DemandType {
  int type_id = 0;
  double probability = 0.0;
  std::vector<int> compatible;
};

struct InstanceOptions {
  // Rider zones in trip-replay instances may have no compatible car.
  bool allow_empty_compatibility = false;
};

// The (V, D, n) triple: resources, a finite demand distribution over types,
// and the number of i.i.d. arrivals. Immutable after construction.
class StochasticInstance {
 public:
  using Options = InstanceOptions;

  static constexpr double kProbabilityTolerance = 1e-9;

  StochasticInstance(std::vector<std::string> resources, std::vector<DemandType> types,
                     int arrivals, Options options = {})
      : resources_(std::move(resources)), types_(std::move(types)), arrivals_(arrivals) {
    validate(options);
    cdf_.reserve(types_.size());
    double acc = 0.0;
    for (const auto& t : types_) {
      acc += t.probability;
      cdf_.push_back(acc);
    }
    // Pin the last positive entry to 1 so inverse-CDF never runs off the end.
    for (std::size_t j = cdf_.size(); j-- > 0;) {
      if (types_[j].probability > 0.0) {
        for (std::size_t r = j; r < cdf_.size(); ++r) cdf_[r] = 1.0;
        break;
      }
    }
  }

  // Uniform distribution over the given compatibility lists; resources are
  // named "v0", "v1", ...
  static StochasticInstance uniform(int resource_count, std::vector<std::vector<int>> compatible,
                                    int arrivals, Options options = {}) {
    std::vector<std::string> resources;
    resources.reserve(resource_count);
    for (int i = 0; i < resource_count; ++i) resources.push_back("v" + std::to_string(i));
    std::vector<DemandType> types;
    types.reserve(compatible.size());
    const double p = compatible.empty() ? 0.0 : 1.0 / static_cast<double>(compatible.size());
    for (std::size_t j = 0; j < compatible.size(); ++j) {
      types.push_back({static_cast<int>(j), p, std::move(compatible[j])});
    }
    return StochasticInstance(std::move(resources), std::move(types), arrivals, options);
  }

  const std::vector<std::string>& resources() const { return resources_; }
  const std::vector<DemandType>& types() const { return types_; }
  const DemandType& type(int j) const { return types_[static_cast<std::size_t>(j)]; }
  int arrivals() const { return arrivals_; }
  int resource_count() const { return static_cast<int>(resources_.size()); }
  int type_count() const { return static_cast<int>(types_.size()); }

  // Expected number of arrivals of type j, n * p_j.
  double expected_arrivals(int j) const { return arrivals_ * type(j).probability; }

  // Total number of (type, resource) compatibility pairs.
  std::size_t edge_count() const {
    std::size_t total = 0;
    for (const auto& t : types_) total += t.compatible.size();
    return total;
  }

  int sample_type(RngStream& rng) const {
    const double u = rng.uniform();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<int>(std::min<std::ptrdiff_t>(it - cdf_.begin(),
                                                     static_cast<std::ptrdiff_t>(cdf_.size()) - 1));
  }

 private:
  void validate(Options options) const {
    if (arrivals_ < 0) throw InvalidInput("arrival count must be nonnegative");
    if (types_.empty()) throw InvalidInput("instance has no demand types");
    std::unordered_set<std::string> seen;
    for (const auto& r : resources_) {
      if (!seen.insert(r).second) throw InvalidInput("duplicate resource id: " + r);
    }
    double total = 0.0;
    const int v = resource_count();
    for (std::size_t j = 0; j < types_.size(); ++j) {
      const auto& t = types_[j];
      if (t.type_id != static_cast<int>(j)) throw InvalidInput("type ids must equal their index");
      if (!(t.probability >= 0.0) || t.probability > 1.0 + kProbabilityTolerance) {
        throw InvalidInput("type probability outside [0, 1]");
      }
      total += t.probability;
      if (t.compatible.empty() && !options.allow_empty_compatibility) {
        throw InvalidInput("type " + std::to_string(j) + " has an empty compatibility list");
      }
      for (std::size_t a = 0; a < t.compatible.size(); ++a) {
        if (t.compatible[a] < 0 || t.compatible[a] >= v) {
          throw InvalidInput("compatible resource index out of range");
        }
        if (a > 0 && t.compatible[a] <= t.compatible[a - 1]) {
          throw InvalidInput("compatibility list must be strictly ascending");
        }
      }
    }
    if (std::abs(total - 1.0) > kProbabilityTolerance) {
      throw InvalidInput("type probabilities must sum to 1");
    }
  }

  std::vector<std::string> resources_;
  std::vector<DemandType> types_;
  int arrivals_;
  std::vector<double> cdf_;
};

// Arrivals of one realization, in draw order. Each arrival's edge set is
// exactly the compatibility list of its type. The instance must outlive
// the graph.
class RealizedGraph {
 public:
  RealizedGraph(const StochasticInstance& instance, std::vector<int> arrival_types)
      : instance_(&instance), arrival_types_(std::move(arrival_types)) {
    for (int j : arrival_types_) {
      if (j < 0 || j >= instance.type_count()) throw InvalidInput("arrival type out of range");
    }
  }
  RealizedGraph(StochasticInstance&&, std::vector<int>) = delete;

  const StochasticInstance& instance() const { return *instance_; }
  const std::vector<int>& arrival_types() const { return arrival_types_; }
  int arrival_count() const { return static_cast<int>(arrival_types_.size()); }
  int resource_count() const { return instance_->resource_count(); }
  int arrival_type(int i) const { return arrival_types_[static_cast<std::size_t>(i)]; }

  // R_i, the resources adjacent to arrival i.
  std::span<const int> neighbors(int i) const { return instance_->type(arrival_type(i)).compatible; }

  std::size_t edge_count() const {
    std::size_t total = 0;
    for (int i = 0; i < arrival_count(); ++i) total += neighbors(i).size();
    return total;
  }

 private:
  const StochasticInstance* instance_;
  std::vector<int> arrival_types_;
};

// n i.i.d. draws from the type distribution by inverse CDF.
inline RealizedGraph realize(const StochasticInstance& instance, RngStream rng) {
  std::vector<int> arrivals;
  arrivals.reserve(static_cast<std::size_t>(instance.arrivals()));
  for (int i = 0; i < instance.arrivals(); ++i) arrivals.push_back(instance.sample_type(rng));
  return RealizedGraph(instance, std::move(arrivals));
}
RealizedGraph realize(StochasticInstance&&, RngStream) = delete;

inline std::map<int, int> micro_type_count(const RealizedGraph& graph) {
  std::map<int, int> counts;
  for (int j : graph.arrival_types()) ++counts[j];
  return counts;
}

// JSON: {"resources": [string], "types": [{"p": float, "compatible": [int]}], "n": int}
inline nlohmann::json instance_to_json(const StochasticInstance& instance) {
  nlohmann::json types = nlohmann::json::array();
  for (const auto& t : instance.types()) {
    types.push_back({{"p", t.probability}, {"compatible", t.compatible}});
  }
  return {{"resources", instance.resources()}, {"types", std::move(types)}, {"n", instance.arrivals()}};
}

inline StochasticInstance instance_from_json(const nlohmann::json& doc,
                                             StochasticInstance::Options options = {}) {
  try {
    std::vector<std::string> resources = doc.at("resources").get<std::vector<std::string>>();
    std::vector<DemandType> types;
    int j = 0;
    for (const auto& t : doc.at("types")) {
      types.push_back({j++, t.at("p").get<double>(), t.at("compatible").get<std::vector<int>>()});
    }
    return StochasticInstance(std::move(resources), std::move(types), doc.at("n").get<int>(), options);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed instance document: ") + e.what());
  }
}

}  // namespace sparsify
