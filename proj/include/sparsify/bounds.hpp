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

#include "sparsify/errors.hpp"

namespace sparsify::bounds {

// Per-bin excess bound for bins holding unit-size load eta and size-tau
// load 1 - eta:
//   U_tau(eta) = min{ sqrt(eta + tau (1 - eta)) / 2,
//                     e^{-eta} (eta + sqrt(tau (1 - eta)) / 2) }.
inline double per_bin_bound(double eta, double tau) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw DomainError("eta must lie in [0, 1]");
  if (!(tau > 0.0 && tau <= 1.0)) throw DomainError("tau must lie in (0, 1]");
  const double spread = 0.5 * std::sqrt(eta + tau * (1.0 - eta));
  const double collide = std::exp(-eta) * (eta + 0.5 * std::sqrt(tau * (1.0 - eta)));
  return std::min(spread, collide);
}

struct BoundInputs {
  double z = 0.0;        // Z(x)
  double z_heavy = 0.0;  // Z_H(x)
  double z_light = 0.0;  // Z_L(x)
  int k = 1;

  void validate() const {
    if (!(z > 0.0)) throw DomainError("Z must be positive");
    if (z_heavy < 0.0 || z_light < 0.0) throw DomainError("Z_H and Z_L must be nonnegative");
    if (std::abs(z_heavy + z_light - z) > 1e-9 * std::max(1.0, z)) {
      throw DomainError("Z_H + Z_L must equal Z");
    }
    if (k < 1) throw DomainError("k must be >= 1");
  }
};

// Lower bound on E|M(G_S)| for the VarOpt sparsifier:
//   Z (1 - U_{1/k}(Z_H / Z)) - 1.
// May be negative when Z is small; see is_vacuous().
inline double theorem_bound(const BoundInputs& b) {
  b.validate();
  const double eta = std::clamp(b.z_heavy / b.z, 0.0, 1.0);
  return b.z * (1.0 - per_bin_bound(eta, 1.0 / static_cast<double>(b.k))) - 1.0;
}

inline bool is_vacuous(double bound) { return bound <= 0.0; }

// Smallest budget with k >= eps^-2.
inline int corollary_budget(double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw DomainError("epsilon must lie in (0, 1]");
  const double k = 1.0 / (epsilon * epsilon);
  return static_cast<int>(std::ceil(k - 1e-9 * k));
}

struct SandwichVerdict {
  bool pass = false;
  double lower = 0.0;
  double upper = 0.0;
};

// (1 - 1/e) OPT_LP - 4 se <= mean <= OPT_LP + 4 se.
inline SandwichVerdict sandwich_check(double opt_lp, double empirical_mean, double stderr_) {
  if (stderr_ < 0.0) throw DomainError("standard error must be nonnegative");
  SandwichVerdict v;
  v.lower = (1.0 - 1.0 / std::numbers::e) * opt_lp - 4.0 * stderr_;
  v.upper = opt_lp + 4.0 * stderr_;
  v.pass = v.lower <= empirical_mean && empirical_mean <= v.upper;
  return v;
}

}  // namespace sparsify::bounds
