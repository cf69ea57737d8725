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

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "cacheveil/common.hpp"
#include "cacheveil/scenario.hpp"

namespace cacheveil {

using BigCount = boost::multiprecision::cpp_int;

enum class Family { chunk, file, subset };

inline const char* to_string(Family f) {
  switch (f) {
    case Family::chunk: return "chunk";
    case Family::file: return "file";
    case Family::subset: return "subset";
  }
  return "?";
}

inline Family family_from_string(const std::string& s) {
  if (s == "chunk") return Family::chunk;
  if (s == "file") return Family::file;
  if (s == "subset") return Family::subset;
  throw ValidationError("unknown placement family \"" + s + "\"");
}

inline constexpr std::size_t kDefaultEnumerationCap = 5'000'000;

using Placement = std::vector<int>;

// Contiguous partition of the popularity-ordered files into L subsets.
class Partition {
 public:
  Partition() = default;
  explicit Partition(std::vector<int> sizes) : sizes_(std::move(sizes)) {
    if (sizes_.empty()) throw ValidationError("partition must have at least one subset");
    for (int s : sizes_) {
      if (s < 1) throw ValidationError("partition subset sizes must be >= 1");
    }
    starts_.resize(sizes_.size());
    std::exclusive_scan(sizes_.begin(), sizes_.end(), starts_.begin(), 0);
  }

  // L subsets of size N/L; L must divide N.
  static Partition equal(int num_files, int num_subsets) {
    if (num_subsets < 1 || num_files % num_subsets != 0)
      throw ValidationError("equal partition requires L to divide N (N=" +
                            std::to_string(num_files) + ", L=" + std::to_string(num_subsets) + ")");
    return Partition(std::vector<int>(static_cast<std::size_t>(num_subsets), num_files / num_subsets));
  }

  static Partition singletons(int num_files) { return equal(num_files, num_files); }

  int num_subsets() const { return static_cast<int>(sizes_.size()); }
  int size(int l) const { return sizes_.at(static_cast<std::size_t>(l)); }
  int begin(int l) const { return starts_.at(static_cast<std::size_t>(l)); }
  int total() const { return std::accumulate(sizes_.begin(), sizes_.end(), 0); }
  const std::vector<int>& sizes() const { return sizes_; }

  void validate_for(int num_files) const {
    if (sizes_.empty() || total() != num_files)
      throw ValidationError("partition sizes sum to " + std::to_string(total()) +
                            ", expected num_files = " + std::to_string(num_files));
  }

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<int> sizes_;
  std::vector<int> starts_;
};

// An enumerated placement family in lexicographically ascending order.
// Placements are stored row-major in one flat buffer.
class PlacementSet {
 public:
  PlacementSet(Family family, int width, int chunks_per_file, int cache_capacity,
               std::optional<Partition> partition = std::nullopt)
      : family_(family),
        width_(width),
        chunks_(chunks_per_file),
        capacity_(cache_capacity),
        partition_(std::move(partition)) {}

  Family family() const { return family_; }
  int width() const { return width_; }
  int chunks_per_file() const { return chunks_; }
  int cache_capacity() const { return capacity_; }
  const std::optional<Partition>& partition() const { return partition_; }
  std::size_t size() const { return width_ == 0 ? 0 : data_.size() / static_cast<std::size_t>(width_); }
  bool empty() const { return data_.empty(); }

  std::span<const int> operator[](std::size_t j) const {
    return {data_.data() + j * static_cast<std::size_t>(width_), static_cast<std::size_t>(width_)};
  }

  // Binary search; the set is sorted.
  std::optional<std::size_t> index_of(std::span<const int> z) const {
    std::size_t lo = 0, hi = size();
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      auto row = (*this)[mid];
      if (std::lexicographical_compare(row.begin(), row.end(), z.begin(), z.end())) {
        lo = mid + 1;
      } else {
        hi = mid;
      }
    }
    if (lo < size() && std::equal(z.begin(), z.end(), (*this)[lo].begin())) return lo;
    return std::nullopt;
  }

  void push_back(std::span<const int> z) { data_.insert(data_.end(), z.begin(), z.end()); }
  void reserve(std::size_t n) { data_.reserve(n * static_cast<std::size_t>(width_)); }

 private:
  Family family_;
  int width_;
  int chunks_;
  int capacity_;
  std::optional<Partition> partition_;
  std::vector<int> data_;
};

namespace detail {

// Number of integer vectors with 0 <= z_j <= caps[j] summing to total.
// Polynomial-product DP; exact for any size.
inline BigCount count_bounded_compositions(const std::vector<int>& caps, int total) {
  if (total < 0) return 0;
  std::vector<BigCount> ways(static_cast<std::size_t>(total) + 1, 0);
  ways[0] = 1;
  for (int cap : caps) {
    std::vector<BigCount> next(ways.size(), 0);
    // Sliding window sum over the last cap+1 entries.
    BigCount window = 0;
    for (int t = 0; t <= total; ++t) {
      window += ways[t];
      if (t - cap - 1 >= 0) window -= ways[t - cap - 1];
      next[t] = window;
    }
    ways = std::move(next);
  }
  return ways[static_cast<std::size_t>(total)];
}

inline BigCount big_binomial(int n, int k) {
  if (n < 0 || k < 0 || k > n) return 0;
  BigCount r = 1;
  for (int j = 1; j <= k; ++j) {
    r *= n - k + j;
    r /= j;
  }
  return r;
}

// Equal caps: inclusion-exclusion over the number of parts exceeding cap.
inline BigCount count_equal_cap_compositions(int parts, int cap, int total) {
  BigCount sum = 0;
  for (int j = 0; j <= parts; ++j) {
    int rest = total - j * (cap + 1);
    if (rest < 0) break;
    BigCount term = big_binomial(parts, j) * big_binomial(rest + parts - 1, parts - 1);
    if (j % 2 == 0) {
      sum += term;
    } else {
      sum -= term;
    }
  }
  return sum;
}

inline void check_cap(const BigCount& count, std::size_t cap, Family family) {
  if (count > BigCount(cap)) {
    std::string n = count.str();
    std::string msg = std::string(to_string(family)) + " placement family has " + n +
                      " placements, above the enumeration cap of " + std::to_string(cap);
    if (family == Family::chunk) msg += "; use the subset family (SPC) with fewer subsets";
    throw CapExceededError(msg, n);
  }
}

// Lexicographic walk over bounded compositions with suffix-capacity pruning.
inline void enumerate_bounded(const std::vector<int>& caps, int total, PlacementSet& out,
                              int step = 1) {
  const int n = static_cast<int>(caps.size());
  std::vector<int> suffix(static_cast<std::size_t>(n) + 1, 0);
  for (int j = n - 1; j >= 0; --j) suffix[j] = suffix[j + 1] + caps[j] / step;
  std::vector<int> z(static_cast<std::size_t>(n), 0);
  int units = total / step;
  auto rec = [&](auto&& self, int j, int remaining) -> void {
    if (j == n) {
      if (remaining == 0) out.push_back(z);
      return;
    }
    int lo = std::max(0, remaining - suffix[j + 1]);
    int hi = std::min(caps[j] / step, remaining);
    for (int v = lo; v <= hi; ++v) {
      z[j] = v * step;
      self(self, j + 1, remaining - v);
    }
    z[j] = 0;
  };
  rec(rec, 0, units);
}

}  // namespace detail

inline BigCount count_placements(const Scenario& s, Family family,
                                 const std::optional<Partition>& part = std::nullopt) {
  const int n = s.num_files();
  const int m = s.cache_capacity();
  const int c = s.chunks_per_file();
  switch (family) {
    case Family::chunk:
      return detail::count_equal_cap_compositions(n, c, m * c);
    case Family::file:
      return detail::big_binomial(n, m);
    case Family::subset: {
      if (!part) throw ValidationError("subset family requires a partition");
      part->validate_for(n);
      std::vector<int> caps;
      for (int sz : part->sizes()) caps.push_back(sz * c);
      return detail::count_bounded_compositions(caps, m * c);
    }
  }
  return 0;
}

// All z with 0 <= z_i <= C and sum z_i = MC.
inline PlacementSet enumerate_chunk_placements(const Scenario& s,
                                               std::size_t cap = kDefaultEnumerationCap) {
  BigCount count = count_placements(s, Family::chunk);
  detail::check_cap(count, cap, Family::chunk);
  PlacementSet set(Family::chunk, s.num_files(), s.chunks_per_file(), s.cache_capacity());
  set.reserve(count.convert_to<std::size_t>());
  std::vector<int> caps(static_cast<std::size_t>(s.num_files()), s.chunks_per_file());
  detail::enumerate_bounded(caps, s.cache_capacity() * s.chunks_per_file(), set);
  return set;
}

// All z with exactly M entries equal to C and the rest 0.
inline PlacementSet enumerate_file_placements(const Scenario& s,
                                              std::size_t cap = kDefaultEnumerationCap) {
  BigCount count = count_placements(s, Family::file);
  detail::check_cap(count, cap, Family::file);
  PlacementSet set(Family::file, s.num_files(), s.chunks_per_file(), s.cache_capacity());
  set.reserve(count.convert_to<std::size_t>());
  const int c = s.chunks_per_file();
  std::vector<int> caps(static_cast<std::size_t>(s.num_files()), c);
  detail::enumerate_bounded(caps, s.cache_capacity() * c, set, c);
  return set;
}

// All L-vectors with 0 <= z_l <= |S_l| C and sum z_l = MC.
inline PlacementSet enumerate_subset_placements(const Scenario& s, const Partition& part,
                                                std::size_t cap = kDefaultEnumerationCap) {
  BigCount count = count_placements(s, Family::subset, part);
  detail::check_cap(count, cap, Family::subset);
  PlacementSet set(Family::subset, part.num_subsets(), s.chunks_per_file(), s.cache_capacity(), part);
  set.reserve(count.convert_to<std::size_t>());
  std::vector<int> caps;
  for (int sz : part.sizes()) caps.push_back(sz * s.chunks_per_file());
  detail::enumerate_bounded(caps, s.cache_capacity() * s.chunks_per_file(), set);
  return set;
}

inline PlacementSet enumerate_placements(const Scenario& s, Family family,
                                         const std::optional<Partition>& part = std::nullopt,
                                         std::size_t cap = kDefaultEnumerationCap) {
  switch (family) {
    case Family::chunk: return enumerate_chunk_placements(s, cap);
    case Family::file: return enumerate_file_placements(s, cap);
    case Family::subset:
      if (!part) throw ValidationError("subset family requires a partition");
      return enumerate_subset_placements(s, *part, cap);
  }
  throw ValidationError("unknown family");
}

}  // namespace cacheveil
