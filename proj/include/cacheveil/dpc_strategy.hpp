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

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "cacheveil/common.hpp"

namespace cacheveil::dpc {

// Per-file caching probabilities for one cache; entries in [0,1], sum = M.
using AlphaVector = std::vector<double>;

// Permutation of file indices giving the packing order.
using FillOrder = std::vector<int>;

inline FillOrder ascending_order(int num_files) {
  FillOrder order(static_cast<std::size_t>(num_files));
  std::iota(order.begin(), order.end(), 0);
  return order;
}

// Most popular first; equal popularities keep index order.
inline FillOrder popularity_order(const std::vector<double>& popularity) {
  FillOrder order = ascending_order(static_cast<int>(popularity.size()));
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return popularity[static_cast<std::size_t>(a)] > popularity[static_cast<std::size_t>(b)]; });
  return order;
}

struct Segment {
  int file = 0;
  double start = 0.0;
  double end = 0.0;
};

// M unit intervals, each tiled by file segments.
struct IntervalLayout {
  int num_files = 0;
  std::vector<std::vector<Segment>> intervals;

  int capacity() const { return static_cast<int>(intervals.size()); }
};

// Returns M = sum(alpha) rounded; throws when alpha is not a valid DPC vector.
inline int validate_alpha(const AlphaVector& alpha, double tol = kProbTolerance) {
  double sum = 0.0;
  for (double a : alpha) {
    if (!(a >= -tol && a <= 1.0 + tol))
      throw ValidationError("alpha entry " + std::to_string(a) + " outside [0,1]");
    sum += a;
  }
  const double m = std::round(sum);
  if (m < 1.0 || std::abs(sum - m) > tol)
    throw ValidationError("alpha must sum to a positive integer M, got " + std::to_string(sum));
  return static_cast<int>(m);
}

inline void validate_order(const FillOrder& order, int num_files) {
  if (static_cast<int>(order.size()) != num_files) throw ValidationError("fill order length mismatch");
  std::vector<char> seen(static_cast<std::size_t>(num_files), 0);
  for (int f : order) {
    if (f < 0 || f >= num_files || seen[static_cast<std::size_t>(f)])
      throw ValidationError("fill order is not a permutation");
    seen[static_cast<std::size_t>(f)] = 1;
  }
}

// Packs alpha_i in `order` one after another into M unit intervals, spilling
// into the next interval when the current one fills.
inline IntervalLayout build_layout(const AlphaVector& alpha, const FillOrder& order) {
  const int m = validate_alpha(alpha);
  const int n = static_cast<int>(alpha.size());
  validate_order(order, n);
  IntervalLayout layout;
  layout.num_files = n;
  layout.intervals.resize(static_cast<std::size_t>(m));

  // Boundaries within 1e-12 of an integer are snapped onto it.
  auto snap = [](double v) {
    double r = std::round(v);
    return std::abs(v - r) <= 1e-12 ? r : v;
  };
  double cum = 0.0;
  for (int f : order) {
    const double a = std::clamp(alpha[static_cast<std::size_t>(f)], 0.0, 1.0);
    const double lo = cum;
    double hi = snap(cum + a);
    if (hi > m) hi = m;
    cum = hi;
    if (hi <= lo) continue;
    for (int iv = static_cast<int>(std::floor(lo)); iv < m && iv < hi; ++iv) {
      double s = std::max(lo, static_cast<double>(iv)) - iv;
      double e = std::min(hi, static_cast<double>(iv + 1)) - iv;
      if (e > s) layout.intervals[static_cast<std::size_t>(iv)].push_back({f, s, e});
    }
  }
  // Close the last interval exactly.
  auto& last = layout.intervals.back();
  if (!last.empty()) last.back().end = 1.0;
  return layout;
}

// One vertical band of the layout and the M files its line crosses (sorted).
struct Band {
  double start = 0.0;
  double end = 0.0;
  std::vector<int> files;
};

namespace detail {

inline int file_at(const std::vector<Segment>& interval, double u) {
  for (const auto& seg : interval) {
    if (u >= seg.start && u < seg.end) return seg.file;
  }
  return interval.empty() ? -1 : interval.back().file;
}

}  // namespace detail

// Bands between consecutive distinct segment boundaries; widths < 1e-12 dropped.
inline std::vector<Band> layout_bands(const IntervalLayout& layout) {
  std::vector<double> cuts = {0.0, 1.0};
  for (const auto& iv : layout.intervals) {
    for (const auto& seg : iv) {
      cuts.push_back(seg.start);
      cuts.push_back(seg.end);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> uniq;
  for (double c : cuts) {
    if (uniq.empty() || c - uniq.back() >= 1e-12) uniq.push_back(c);
  }
  std::vector<Band> bands;
  for (std::size_t j = 0; j + 1 < uniq.size(); ++j) {
    Band b{uniq[j], uniq[j + 1], {}};
    const double mid = 0.5 * (b.start + b.end);
    for (const auto& iv : layout.intervals) b.files.push_back(detail::file_at(iv, mid));
    std::sort(b.files.begin(), b.files.end());
    if (std::adjacent_find(b.files.begin(), b.files.end()) != b.files.end())
      throw InternalError("dpc layout band crosses the same file twice");
    bands.push_back(std::move(b));
  }
  return bands;
}

// Distribution over complete-file placements: sorted file set -> probability.
using FileDistribution = std::map<std::vector<int>, double>;

inline FileDistribution layout_to_distribution(const IntervalLayout& layout) {
  FileDistribution dist;
  for (const auto& b : layout_bands(layout)) dist[b.files] += b.end - b.start;
  return dist;
}

// Marginal caching probability of each file under a distribution.
inline std::vector<double> distribution_marginals(const FileDistribution& dist, int num_files) {
  std::vector<double> m(static_cast<std::size_t>(num_files), 0.0);
  for (const auto& [files, p] : dist) {
    for (int f : files) m[static_cast<std::size_t>(f)] += p;
  }
  return m;
}

// Files crossed by the vertical line at u in [0,1); sorted ascending.
inline std::vector<int> sample_placement(const IntervalLayout& layout, double u) {
  if (!(u >= 0.0 && u < 1.0)) throw ValidationError("sample_placement: u must lie in [0,1)");
  std::vector<int> files;
  for (const auto& iv : layout.intervals) files.push_back(detail::file_at(iv, u));
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace cacheveil::dpc
