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

#include "cacheveil/simplex.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"

namespace cacheveil::lp {
namespace {

TEST(SimplexTest, SimpleMaximization) {
  LinearProgram lp(2);
  lp.objective = {-1.0, -2.0};
  lp.add_constraint({{0, 1.0}, {1, 1.0}}, Relation::less_equal, 1.0);
  auto sol = solve(lp);
  ASSERT_EQ(sol.status, Status::optimal);
  EXPECT_NEAR(sol.objective, -2.0, 1e-12);
  EXPECT_NEAR(sol.x[0], 0.0, 1e-12);
  EXPECT_NEAR(sol.x[1], 1.0, 1e-12);
}

TEST(SimplexTest, Infeasible) {
  LinearProgram lp(1);
  lp.objective = {1.0};
  lp.add_constraint({{0, 1.0}}, Relation::less_equal, -1.0);
  EXPECT_EQ(solve(lp).status, Status::infeasible);
}

TEST(SimplexTest, Unbounded) {
  LinearProgram lp(1);
  lp.objective = {-1.0};
  EXPECT_EQ(solve(lp).status, Status::unbounded);
}

TEST(SimplexTest, EqualityAndUpperBounds) {
  // min x0 + 2 x1 + 3 x2, x0 + x1 + x2 = 2, x <= 1 => (1, 1, 0).
  LinearProgram lp(3);
  lp.objective = {1.0, 2.0, 3.0};
  lp.upper = {1.0, 1.0, 1.0};
  lp.add_constraint({{0, 1.0}, {1, 1.0}, {2, 1.0}}, Relation::equal, 2.0);
  auto sol = solve(lp);
  ASSERT_EQ(sol.status, Status::optimal);
  EXPECT_NEAR(sol.objective, 3.0, 1e-12);
  EXPECT_NEAR(sol.x[0], 1.0, 1e-12);
  EXPECT_NEAR(sol.x[1], 1.0, 1e-12);
}

TEST(SimplexTest, ImpliedUpperBoundStillHonoured) {
  // Normalization row implies x <= 1; the explicit bound is redundant.
  LinearProgram lp(2);
  lp.objective = {-1.0, 0.0};
  lp.upper = {1.0, 1.0};
  lp.add_constraint({{0, 1.0}, {1, 1.0}}, Relation::equal, 1.0);
  auto sol = solve(lp);
  ASSERT_EQ(sol.status, Status::optimal);
  EXPECT_NEAR(sol.x[0], 1.0, 1e-12);
}

TEST(SimplexTest, NonzeroLowerBoundsAndOffset) {
  LinearProgram lp(2);
  lp.objective = {1.0, 1.0};
  lp.objective_offset = 5.0;
  lp.lower = {1.0, 2.0};
  lp.add_constraint({{0, 1.0}, {1, 1.0}}, Relation::greater_equal, 4.0);
  auto sol = solve(lp);
  ASSERT_EQ(sol.status, Status::optimal);
  EXPECT_NEAR(sol.objective, 9.0, 1e-12);
}

TEST(SimplexTest, RedundantEqualityRows) {
  LinearProgram lp(2);
  lp.objective = {1.0, -1.0};
  lp.add_constraint({{0, 1.0}, {1, 1.0}}, Relation::equal, 1.0);
  lp.add_constraint({{0, 2.0}, {1, 2.0}}, Relation::equal, 2.0);
  auto sol = solve(lp);
  ASSERT_EQ(sol.status, Status::optimal);
  EXPECT_NEAR(sol.objective, -1.0, 1e-12);
}

TEST(SimplexTest, IterationCapIsDistinctStatus) {
  LinearProgram lp(2);
  lp.objective = {-1.0, -1.0};
  lp.add_constraint({{0, 1.0}}, Relation::less_equal, 1.0);
  lp.add_constraint({{1, 1.0}}, Relation::less_equal, 1.0);
  SolveOptions opt;
  opt.max_iterations = 1;
  EXPECT_EQ(solve(lp, opt).status, Status::iteration_limit);
}

TEST(SimplexTest, DegenerateCyclingExampleTerminates) {
  // Beale's classic cycling example under Dantzig's rule.
  LinearProgram lp(4);
  lp.objective = {-0.75, 150.0, -0.02, 6.0};
  lp.add_constraint({{0, 0.25}, {1, -60.0}, {2, -0.04}, {3, 9.0}}, Relation::less_equal, 0.0);
  lp.add_constraint({{0, 0.5}, {1, -90.0}, {2, -0.02}, {3, 3.0}}, Relation::less_equal, 0.0);
  lp.add_constraint({{2, 1.0}}, Relation::less_equal, 1.0);
  auto sol = solve(lp);
  ASSERT_EQ(sol.status, Status::optimal);
  EXPECT_NEAR(sol.objective, -0.05, 1e-9);
}

TEST(SimplexTest, DeterministicOutput) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> coef(-3, 3);
  LinearProgram lp(6);
  for (auto& c : lp.objective) c = coef(rng);
  for (int r = 0; r < 5; ++r) {
    std::vector<Term> t;
    for (int j = 0; j < 6; ++j) t.push_back({j, static_cast<double>(coef(rng))});
    lp.add_constraint(t, Relation::less_equal, 3.0);
  }
  auto a = solve(lp);
  auto b = solve(lp);
  EXPECT_EQ(a.status, b.status);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(SimplexTest, AgreesWithVertexEnumerationOnRandomLps) {
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<int> coef(-3, 3);
  std::uniform_int_distribution<int> dims(1, 6);
  std::uniform_int_distribution<int> relpick(0, 5);
  int counts[3] = {0, 0, 0};
  for (int trial = 0; trial < 150; ++trial) {
    int n = dims(rng);
    int m = dims(rng);
    oracle::SmallLp small;
    LinearProgram lp(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      small.c.push_back(coef(rng));
      lp.objective[static_cast<std::size_t>(j)] = small.c.back();
    }
    for (int r = 0; r < m; ++r) {
      std::vector<double> row;
      std::vector<Term> terms;
      for (int j = 0; j < n; ++j) {
        row.push_back(coef(rng));
        terms.push_back({j, row.back()});
      }
      int pick = relpick(rng);
      int rel = pick < 3 ? -1 : (pick < 5 ? 1 : 0);
      double b = coef(rng);
      small.a.push_back(row);
      small.rel.push_back(rel);
      small.b.push_back(b);
      lp.add_constraint(terms, rel < 0 ? Relation::less_equal : rel > 0 ? Relation::greater_equal : Relation::equal, b);
    }
    auto expected = oracle::brute_force_lp(small);
    auto got = solve(lp);
    SCOPED_TRACE("trial " + std::to_string(trial));
    switch (expected.status) {
      case oracle::SmallStatus::optimal:
        ++counts[0];
        ASSERT_EQ(got.status, Status::optimal);
        EXPECT_NEAR(got.objective, expected.objective, 1e-7);
        EXPECT_LE(max_violation(lp, got.x), 1e-9);
        break;
      case oracle::SmallStatus::infeasible:
        ++counts[1];
        EXPECT_EQ(got.status, Status::infeasible);
        break;
      case oracle::SmallStatus::unbounded:
        ++counts[2];
        EXPECT_EQ(got.status, Status::unbounded);
        break;
    }
  }
  // The generator must exercise every outcome.
  EXPECT_GT(counts[0], 20);
  EXPECT_GT(counts[1], 5);
  EXPECT_GT(counts[2], 5);
}

TEST(SimplexTest, TextDump) {
  LinearProgram lp(2);
  lp.objective = {1.0, -2.0};
  lp.names = {"a", "b"};
  lp.upper[1] = 4.0;
  lp.add_constraint({{0, 1.0}, {1, 1.0}}, Relation::equal, 1.0, "norm");
  std::ostringstream os;
  write_lp_text(lp, os);
  const std::string text = os.str();
  EXPECT_NE(text.find("minimize"), std::string::npos);
  EXPECT_NE(text.find("norm: 1 a + 1 b = 1"), std::string::npos);
  EXPECT_NE(text.find("0 <= b <= 4"), std::string::npos);
}

}  // namespace
}  // namespace cacheveil::lp
