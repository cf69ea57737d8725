// Copyright 2026 The CacheVeil Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cacheveil/baselines.hpp"

#include <gtest/gtest.h>

namespace cacheveil {
namespace {

TEST(RdaTest, Privacy) {
  auto s = default_scenario(1);
  EXPECT_NEAR(rda_privacy(s, {0.0}), 0.566, 1e-12);
  EXPECT_NEAR(rda_privacy(s, {1.0}), 0.65, 1e-12);
  EXPECT_NEAR(rda_privacy(s, {0.24}), 0.65, 1e-12);
  EXPECT_THROW(rda_privacy(s, {1.5}), ValidationError);
}

TEST(RdaTest, Cost) {
  auto s = default_scenario(1);
  EXPECT_NEAR(rda_cost(s, {0.0}), 0.32, 1e-12);
  EXPECT_NEAR(rda_cost(s, {1.0}), 1.0, 1e-12);
  EXPECT_NEAR(rda_cost(s, {0.5}), 0.66, 1e-12);
}

TEST(RdaTest, ForTarget) {
  auto s = default_scenario(1);
  EXPECT_NEAR(rda_for_target(s, 0.566).s, 0.0, 1e-12);
  EXPECT_NEAR(rda_for_target(s, 0.65).s, 0.24, 1e-12);
  EXPECT_NEAR(rda_for_target(s, 0.60).s, (0.62 - 0.4 / 0.7) / 0.5, 1e-12);
  EXPECT_NEAR(rda_for_target(s, 0.60).s, 0.0971, 1e-4);
  EXPECT_THROW(rda_for_target(s, 0.5), ValidationError);
  EXPECT_THROW(rda_for_target(s, 0.7), ValidationError);
}

TEST(RdaTest, MonotoneAndFlatBeyondThreshold) {
  auto s = default_scenario(1);
  double prev = -1.0;
  for (int j = 0; j <= 100; ++j) {
    double v = rda_privacy(s, {j / 100.0});
    EXPECT_GE(v, prev - 1e-15);
    if (j >= 24) {
      EXPECT_NEAR(v, 0.65, 1e-12);
    }
    prev = v;
  }
}

TEST(RdaTest, RoundTrip) {
  auto s = default_scenario(1);
  for (int j = 0; j <= 50; ++j) {
    double zeta = 0.566 + (0.65 - 0.566) * j / 50.0;
    EXPECT_NEAR(rda_privacy(s, rda_for_target(s, zeta)), zeta, 1e-9);
  }
}

TEST(RdaTest, EvaluateAgreesWithClosedForms) {
  for (int c : {1, 3}) {
    auto s = default_scenario(c);
    for (double sv : {0.0, 0.1, 0.24, 0.5, 1.0}) {
      auto rep = rda_evaluate(s, {sv});
      EXPECT_NEAR(rep.psi, rda_privacy(s, {sv}), 1e-12);
      EXPECT_NEAR(rep.omega, rda_cost(s, {sv}), 1e-12);
      EXPECT_NEAR(rep.average_hit_ratio, 0.68, 1e-12);
      ASSERT_EQ(rep.decision.max_y(), c);
      // Intermediate counts never occur: score 0, smallest indices.
      for (int y = 1; y < c; ++y) {
        EXPECT_EQ(rep.decision.at(y).score, 0.0);
        EXPECT_EQ(rep.decision.at(y).cache, 0);
        EXPECT_EQ(rep.decision.at(y).file, 0);
      }
    }
  }
}

TEST(RdaTest, OtherScenario) {
  Scenario s(6, 3, 2, 1, {0.3, 0.25, 0.2, 0.1, 0.1, 0.05}, {0.2, 0.5, 0.3});
  auto b = privacy_bounds(s);
  EXPECT_NEAR(rda_privacy(s, {0.0}), b.psi_min, 1e-12);
  EXPECT_NEAR(rda_privacy(s, {1.0}), b.psi_max, 1e-12);
  EXPECT_NEAR(rda_for_target(s, b.psi_max).s, 0.2 / 0.3, 1e-12);
}

}  // namespace
}  // namespace cacheveil
