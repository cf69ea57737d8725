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

#include "cacheveil/enumeration.hpp"

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

namespace cacheveil {
namespace {

Scenario make(int n, int m, int c) {
  return Scenario(n, 1, m, c, zipf_popularity({1.0, n}), {1.0});
}

std::vector<std::vector<int>> as_vectors(const PlacementSet& ps) {
  std::vector<std::vector<int>> out;
  for (std::size_t j = 0; j < ps.size(); ++j) out.emplace_back(ps[j].begin(), ps[j].end());
  return out;
}

TEST(EnumerationTest, TinyChunkFamily) {
  auto ps = enumerate_chunk_placements(make(2, 1, 2));
  EXPECT_EQ(as_vectors(ps), (std::vector<std::vector<int>>{{0, 2}, {1, 1}, {2, 0}}));
}

TEST(EnumerationTest, DefaultChunkFamilySize) {
  auto s = default_scenario(10);
  EXPECT_EQ(count_placements(s, Family::chunk), 7051);
  auto ps = enumerate_chunk_placements(s);
  EXPECT_EQ(ps.size(), 7051u);
  EXPECT_EQ(as_vectors(ps), oracle::brute_force_vectors(std::vector<int>(5, 10), 20));
}

TEST(EnumerationTest, ChunkFamilyWithOneChunkEqualsFileFamily) {
  auto s = default_scenario(1);
  auto chunk = enumerate_chunk_placements(s);
  auto file = enumerate_file_placements(s);
  EXPECT_EQ(chunk.size(), 10u);
  EXPECT_EQ(as_vectors(chunk), as_vectors(file));
}

TEST(EnumerationTest, FileFamily) {
  EXPECT_EQ(enumerate_file_placements(default_scenario(3)).size(), 10u);
  auto ps = enumerate_file_placements(make(4, 2, 3));
  EXPECT_EQ(as_vectors(ps), (std::vector<std::vector<int>>{
                                {0, 0, 3, 3}, {0, 3, 0, 3}, {0, 3, 3, 0}, {3, 0, 0, 3}, {3, 0, 3, 0}, {3, 3, 0, 0}}));
  EXPECT_EQ(enumerate_file_placements(make(12, 3, 1)).size(), 220u);
}

TEST(EnumerationTest, SubsetFamily) {
  auto s = make(12, 3, 1);
  EXPECT_EQ(enumerate_subset_placements(s, Partition::equal(12, 3)).size(), 10u);
  EXPECT_EQ(enumerate_subset_placements(s, Partition::singletons(12)).size(), 220u);
  EXPECT_EQ(count_placements(s, Family::subset, Partition::equal(12, 6)), 50);
  EXPECT_EQ(enumerate_subset_placements(s, Partition::equal(12, 6)).size(), 50u);
  auto one = enumerate_subset_placements(make(6, 2, 4), Partition({6}));
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0][0], 8);
}

TEST(EnumerationTest, UnequalPartition) {
  auto s = make(6, 2, 2);
  Partition part({1, 2, 3});
  EXPECT_EQ(part.begin(2), 3);
  auto ps = enumerate_subset_placements(s, part);
  EXPECT_EQ(as_vectors(ps), oracle::brute_force_vectors({2, 4, 6}, 4));
  EXPECT_THROW(Partition::equal(6, 4), ValidationError);
  EXPECT_THROW(enumerate_subset_placements(s, Partition({2, 2})), ValidationError);
  EXPECT_THROW(Partition({2, 0, 4}), ValidationError);
}

TEST(EnumerationTest, CapExceededReportsCount) {
  auto s = make(12, 3, 6);
  try {
    enumerate_chunk_placements(s);
    FAIL() << "expected cap error";
  } catch (const CapExceededError& e) {
    EXPECT_EQ(BigCount(e.count()), count_placements(s, Family::chunk));
    EXPECT_NE(std::string(e.what()).find("SPC"), std::string::npos) << e.what();
  }
  EXPECT_THROW(enumerate_file_placements(default_scenario(), 9), CapExceededError);
  EXPECT_NO_THROW(enumerate_file_placements(default_scenario(), 10));
}

TEST(EnumerationTest, CountsAreExactBeyondMachineWords) {
  auto s = make(200, 100, 40);
  BigCount c = count_placements(s, Family::chunk);
  EXPECT_GT(c, BigCount(std::numeric_limits<std::uint64_t>::max()));
  EXPECT_EQ(count_placements(s, Family::file), detail::big_binomial(200, 100));
}

TEST(EnumerationTest, IndexOfIsInverse) {
  auto ps = enumerate_chunk_placements(default_scenario(4));
  for (std::size_t j = 0; j < ps.size(); ++j) {
    auto idx = ps.index_of(ps[j]);
    ASSERT_TRUE(idx);
    EXPECT_EQ(*idx, j);
  }
  std::vector<int> bad = {9, 0, 0, 0, 0};
  EXPECT_FALSE(ps.index_of(bad));
}

TEST(EnumerationTest, RandomizedCountMatchesEnumeration) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    int n = std::uniform_int_distribution<int>(2, 7)(rng);
    int m = std::uniform_int_distribution<int>(1, n - 1)(rng);
    int c = std::uniform_int_distribution<int>(1, 4)(rng);
    auto s = make(n, m, c);
    for (Family f : {Family::chunk, Family::file}) {
      auto ps = enumerate_placements(s, f);
      EXPECT_EQ(count_placements(s, f), BigCount(ps.size()));
      auto v = as_vectors(ps);
      EXPECT_TRUE(std::is_sorted(v.begin(), v.end()));
      EXPECT_EQ(std::adjacent_find(v.begin(), v.end()), v.end());
      if (v.size() < 20000) {
        EXPECT_EQ(v, oracle::brute_force_vectors(std::vector<int>(static_cast<std::size_t>(n), c), m * c,
                                                 f == Family::file ? c : 1));
      }
    }
    std::vector<int> sizes;
    for (int left = n; left > 0;) {
      int sz = std::uniform_int_distribution<int>(1, left)(rng);
      sizes.push_back(sz);
      left -= sz;
    }
    Partition part(sizes);
    auto ps = enumerate_subset_placements(s, part);
    EXPECT_EQ(count_placements(s, Family::subset, part), BigCount(ps.size()));
    std::vector<int> caps;
    for (int sz : sizes) caps.push_back(sz * c);
    EXPECT_EQ(as_vectors(ps), oracle::brute_force_vectors(caps, m * c));
  }
}

TEST(EnumerationTest, FamilyNames) {
  EXPECT_EQ(family_from_string("chunk"), Family::chunk);
  EXPECT_EQ(family_from_string("file"), Family::file);
  EXPECT_EQ(family_from_string("subset"), Family::subset);
  EXPECT_STREQ(to_string(Family::subset), "subset");
  EXPECT_THROW(family_from_string("bogus"), ValidationError);
}

}  // namespace
}  // namespace cacheveil
