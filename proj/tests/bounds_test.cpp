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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "sparsify/bounds.hpp"
#include "sparsify/errors.hpp"

namespace sparsify::bounds {
namespace {

constexpr double kInvE = 1.0 / std::numbers::e;

TEST(PerBinBound, Examples) {
  for (double tau : {0.01, 0.2, 0.5, 1.0}) EXPECT_NEAR(per_bin_bound(1.0, tau), kInvE, 1e-12);
  EXPECT_NEAR(per_bin_bound(0.0, 1.0), 0.5, 1e-12);
  EXPECT_NEAR(per_bin_bound(0.0, 1e-12), 0.0, 1e-6);
  EXPECT_NEAR(per_bin_bound(0.0, 0.25), 0.25, 1e-12);
}

TEST(PerBinBound, DomainErrors) {
  EXPECT_THROW(per_bin_bound(-0.1, 0.5), DomainError);
  EXPECT_THROW(per_bin_bound(1.1, 0.5), DomainError);
  EXPECT_THROW(per_bin_bound(0.5, 0.0), DomainError);
  EXPECT_THROW(per_bin_bound(0.5, 1.5), DomainError);
  EXPECT_THROW(per_bin_bound(std::nan(""), 0.5), DomainError);
}

TEST(PerBinBound, RangeAndMonotoneInTau) {
  for (int a = 0; a <= 100; ++a) {
    const double eta = a / 100.0;
    double previous = 0.0;
    for (int k = 1000; k >= 1; --k) {
      const double u = per_bin_bound(eta, 1.0 / k);
      EXPECT_GE(u, 0.0);
      EXPECT_LE(u, 0.5 + 1e-15);
      EXPECT_GE(u, previous - 1e-15) << eta << " " << k;
      previous = u;
    }
  }
}

TEST(LowerBound, AllHeavy) {
  EXPECT_NEAR(theorem_bound({100.0, 100.0, 0.0, 5}), 100.0 * (1.0 - kInvE) - 1.0, 1e-9);
}

TEST(LowerBound, AllLightK4) {
  EXPECT_NEAR(theorem_bound({100.0, 0.0, 100.0, 4}), 100.0 * 0.75 - 1.0, 1e-9);
}

TEST(LowerBound, SmallHeavyShare) {
  const double eps = 0.2;
  const int k = corollary_budget(eps);
  EXPECT_GE(theorem_bound({100.0, 100.0 * eps / 2, 100.0 * (1 - eps / 2), k}), 79.0);
}

TEST(LowerBound, ApproachesZAsKGrows) {
  const double z = 50.0;
  double previous = -1e300;
  for (int k : {1, 4, 16, 100, 10000, 1000000}) {
    const double b = theorem_bound({z, 0.0, z, k});
    EXPECT_GE(b, previous);
    previous = b;
  }
  EXPECT_NEAR(previous, z * (1.0 - 0.5 / 1000.0) - 1.0, 1e-9);
}

TEST(LowerBound, Vacuous) {
  const double b = theorem_bound({1.0, 1.0, 0.0, 2});
  EXPECT_LT(b, 0.0);
  EXPECT_TRUE(is_vacuous(b));
  EXPECT_FALSE(is_vacuous(theorem_bound({50.0, 0.0, 50.0, 10})));
}

TEST(LowerBound, InputValidation) {
  EXPECT_THROW(theorem_bound({10.0, 4.0, 4.0, 3}), DomainError);
  EXPECT_THROW(theorem_bound({10.0, 5.0, 5.0, 0}), DomainError);
  EXPECT_THROW(theorem_bound({-1.0, 0.0, -1.0, 3}), DomainError);
}

TEST(BudgetForEpsilon, Examples) {
  EXPECT_EQ(corollary_budget(0.1), 100);
  EXPECT_EQ(corollary_budget(1.0), 1);
  EXPECT_EQ(corollary_budget(0.2), 25);
  EXPECT_EQ(corollary_budget(0.25), 16);
  EXPECT_EQ(corollary_budget(0.3), 12);
  EXPECT_THROW(corollary_budget(0.0), DomainError);
  EXPECT_THROW(corollary_budget(1.5), DomainError);
}

TEST(SandwichCheck, Examples) {
  const auto pass = sandwich_check(10.0, 8.5, 0.05);
  EXPECT_TRUE(pass.pass);
  EXPECT_NEAR(pass.lower, 10.0 * (1.0 - kInvE) - 0.2, 1e-12);
  EXPECT_NEAR(pass.upper, 10.2, 1e-12);
  EXPECT_FALSE(sandwich_check(10.0, 10.9, 0.05).pass);
  EXPECT_FALSE(sandwich_check(10.0, 5.0, 0.05).pass);
  EXPECT_THROW(sandwich_check(10.0, 5.0, -1.0), DomainError);
}

TEST(SandwichCheck, ConcentratedOccupancy) {
  const int n = 50;
  const double mean = n * (1.0 - std::pow(1.0 - 1.0 / n, n));
  EXPECT_NEAR(mean, 31.8, 0.05);
  EXPECT_TRUE(sandwich_check(n, mean, 0.1).pass);
}

}  // namespace
}  // namespace sparsify::bounds
