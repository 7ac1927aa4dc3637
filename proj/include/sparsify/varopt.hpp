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
#include <cstdint>
#include <numeric>
#include <span>
#include <unordered_set>
#include <vector>

#include "sparsify/errors.hpp"
#include "sparsify/rng.hpp"

namespace sparsify {

struct WeightedItem {
  std::int64_t item_id = 0;
  double weight = 0.0;
};

// Threshold tau and inclusion probabilities pi_e = min(1, tau * x_e), aligned
// with the input items. Zero-weight items get pi = 0.
struct VarOptThreshold {
  double tau = 0.0;
  std::vector<double> probs;
  int sample_size = 0;  // min(k, |E+|)
};

struct VarOptSample {
  std::vector<std::int64_t> included;
  std::vector<double> ipw_weight;  // aligned with `included`, x_e / pi_e
  std::vector<std::int64_t> item_ids;
  std::vector<double> inclusion_prob;  // aligned with `item_ids`
  double threshold = 0.0;

  double inclusion_probability(std::int64_t id) const {
    for (std::size_t a = 0; a < item_ids.size(); ++a) {
      if (item_ids[a] == id) return inclusion_prob[a];
    }
    return 0.0;
  }
};

// Solves sum_e min(1, tau * x_e) = min(k, |E+|) exactly. Items are scanned in
// decreasing weight order; the largest h become deterministic and
// tau = (k - h) / (weight of the rest), with h the first index whose item
// satisfies tau * x <= 1.
inline VarOptThreshold compute_threshold(std::span<const WeightedItem> items, int k) {
  if (k < 1) throw InvalidInput("sample budget k must be at least 1");
  std::vector<std::size_t> positive;
  positive.reserve(items.size());
  for (std::size_t a = 0; a < items.size(); ++a) {
    const double w = items[a].weight;
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidInput("item weights must be finite and >= 0");
    if (w > 0.0) positive.push_back(a);
  }
  if (positive.empty()) throw AllZeroWeights();

  VarOptThreshold out;
  out.probs.assign(items.size(), 0.0);
  const auto m = positive.size();
  const auto budget = static_cast<std::size_t>(k);

  if (m <= budget) {
    double min_weight = items[positive.front()].weight;
    for (auto a : positive) {
      out.probs[a] = 1.0;
      min_weight = std::min(min_weight, items[a].weight);
    }
    out.tau = 1.0 / min_weight;
    out.sample_size = static_cast<int>(m);
    return out;
  }

  std::stable_sort(positive.begin(), positive.end(), [&](std::size_t a, std::size_t b) {
    return items[a].weight > items[b].weight;
  });
  // suffix[h] = weight of positive[h..]; accumulated small-to-large.
  std::vector<double> suffix(m + 1, 0.0);
  for (std::size_t h = m; h-- > 0;) suffix[h] = suffix[h + 1] + items[positive[h]].weight;

  std::size_t heavy = 0;
  double tau = static_cast<double>(budget) / suffix[0];
  while (heavy < budget && tau * items[positive[heavy]].weight > 1.0) {
    ++heavy;
    tau = static_cast<double>(budget - heavy) / suffix[heavy];
  }
  out.tau = tau;
  for (std::size_t h = 0; h < m; ++h) {
    const auto a = positive[h];
    out.probs[a] = h < heavy ? 1.0 : std::min(1.0, tau * items[a].weight);
  }
  out.sample_size = k;
  return out;
}

namespace detail {

inline constexpr double kPivotalEps = 1e-12;

// Pivotal (dependent) rounding of fractional probabilities whose sum is an
// integer: each step settles at least one item while preserving both
// marginals and the running total, and pairwise inclusion indicators are
// negatively correlated.
inline std::vector<bool> pivotal_round(std::span<const double> probs, RngStream& rng) {
  std::vector<bool> chosen(probs.size(), false);
  std::ptrdiff_t cur = -1;
  double cur_p = 0.0;
  auto settle = [&](std::ptrdiff_t idx, double p) -> bool {
    if (p >= 1.0 - kPivotalEps) {
      chosen[static_cast<std::size_t>(idx)] = true;
      return true;
    }
    return p <= kPivotalEps;
  };
  for (std::size_t a = 0; a < probs.size(); ++a) {
    double p = probs[a];
    if (p <= kPivotalEps) continue;
    if (p >= 1.0 - kPivotalEps) {
      chosen[a] = true;
      continue;
    }
    const auto idx = static_cast<std::ptrdiff_t>(a);
    if (cur < 0) {
      cur = idx;
      cur_p = p;
      continue;
    }
    const double s = cur_p + p;
    const double u = rng.uniform();
    if (s <= 1.0) {
      // One of the pair absorbs the whole mass, the other drops to 0.
      if (u * s < cur_p) {
        cur_p = s;
      } else {
        cur = idx;
        cur_p = s;
      }
    } else {
      // One of the pair is selected, the other keeps s - 1.
      if (u * (2.0 - s) < 1.0 - p) {
        chosen[static_cast<std::size_t>(cur)] = true;
        cur = idx;
      } else {
        chosen[a] = true;
      }
      cur_p = s - 1.0;
    }
    if (settle(cur, cur_p)) cur = -1;
  }
  // Only rounding residue can remain here.
  if (cur >= 0 && cur_p > 0.5) chosen[static_cast<std::size_t>(cur)] = true;
  return chosen;
}

}  // namespace detail

// Fixed-size sample of exactly min(k, |E+|) items with inclusion
// probabilities pi_e = min(1, tau * x_e). Heavy items are always kept; the
// remainder is drawn by pivotal rounding of the light probabilities.
inline VarOptSample draw(std::span<const WeightedItem> items, int k, RngStream& rng) {
  VarOptThreshold threshold = compute_threshold(items, k);
  const std::vector<bool> chosen = detail::pivotal_round(threshold.probs, rng);

  VarOptSample sample;
  sample.threshold = threshold.tau;
  sample.item_ids.reserve(items.size());
  for (const auto& it : items) sample.item_ids.push_back(it.item_id);
  sample.inclusion_prob = std::move(threshold.probs);
  sample.included.reserve(static_cast<std::size_t>(threshold.sample_size));
  sample.ipw_weight.reserve(static_cast<std::size_t>(threshold.sample_size));
  for (std::size_t a = 0; a < items.size(); ++a) {
    if (!chosen[a]) continue;
    sample.included.push_back(items[a].item_id);
    sample.ipw_weight.push_back(items[a].weight / sample.inclusion_prob[a]);
  }
  return sample;
}

inline VarOptSample draw(std::span<const WeightedItem> items, int k, RngStream&& rng) {
  return draw(items, k, rng);
}

// Horvitz-Thompson estimate of sum_{e in subset} x_e.
inline double estimate_subset_sum(const VarOptSample& sample,
                                  const std::unordered_set<std::int64_t>& subset) {
  double total = 0.0;
  for (std::size_t a = 0; a < sample.included.size(); ++a) {
    if (subset.contains(sample.included[a])) total += sample.ipw_weight[a];
  }
  return total;
}

}  // namespace sparsify
