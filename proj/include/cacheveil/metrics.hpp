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

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

#include "cacheveil/common.hpp"
#include "cacheveil/enumeration.hpp"
#include "cacheveil/scenario.hpp"

namespace cacheveil {

// ---------------------------------------------------------------------------
// Binomial coefficients
// ---------------------------------------------------------------------------

// C(n, k), exact for n <= 64. Zero when k < 0, k > n or n < 0.
inline std::uint64_t binomial(int n, int k) {
  if (n < 0 || k < 0 || k > n) return 0;
  if (n > 64) throw ValidationError("binomial: exact evaluation limited to n <= 64; use log_binomial");
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (int j = 1; j <= k; ++j) r = r * static_cast<unsigned>(n - k + j) / static_cast<unsigned>(j);
  return static_cast<std::uint64_t>(r);
}

// log C(n, k); -infinity for the zero cases.
inline double log_binomial(int n, int k) {
  if (n < 0 || k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// Probability that exactly `hits` of `draws` chunks, drawn without replacement
// from a pool of `pool` chunks of which `chunks` belong to the requested file,
// come from that file: C(C, c) C(pool-C, x-c) / C(pool, x).
inline double hypergeometric_pmf(int pool, int chunks, int draws, int hits) {
  if (draws < 0 || draws > pool || hits < 0 || hits > chunks || draws - hits > pool - chunks ||
      hits > draws)
    return 0.0;
  if (pool <= 64) {
    return static_cast<double>(static_cast<long double>(binomial(chunks, hits)) *
                               static_cast<long double>(binomial(pool - chunks, draws - hits)) /
                               static_cast<long double>(binomial(pool, draws)));
  }
  return std::exp(log_binomial(chunks, hits) + log_binomial(pool - chunks, draws - hits) -
                  log_binomial(pool, draws));
}

// ---------------------------------------------------------------------------
// Policies
// ---------------------------------------------------------------------------

struct PolicyEntry {
  std::size_t index = 0;
  double prob = 0.0;
};

// Per-cache probability distribution over a shared PlacementSet (sparse).
class Policy {
 public:
  Policy(std::shared_ptr<const PlacementSet> set, std::vector<std::vector<PolicyEntry>> per_cache)
      : set_(std::move(set)), per_cache_(std::move(per_cache)) {
    if (!set_) throw ValidationError("policy requires a placement set");
    for (std::size_t k = 0; k < per_cache_.size(); ++k) {
      double sum = 0.0;
      for (const auto& e : per_cache_[k]) {
        if (e.index >= set_->size())
          throw ValidationError("policy placement index " + std::to_string(e.index) +
                                " out of range for set of size " + std::to_string(set_->size()));
        if (!(e.prob >= -kProbTolerance && e.prob <= 1.0 + kProbTolerance))
          throw ValidationError("policy probability outside [0,1]");
        sum += e.prob;
      }
      if (std::abs(sum - 1.0) > kProbTolerance)
        throw ValidationError("policy for cache " + std::to_string(k) + " sums to " +
                              std::to_string(sum));
    }
  }

  static Policy deterministic(std::shared_ptr<const PlacementSet> set, int num_caches,
                              std::size_t index) {
    return Policy(std::move(set), std::vector<std::vector<PolicyEntry>>(
                                      static_cast<std::size_t>(num_caches), {{index, 1.0}}));
  }

  static Policy uniform(std::shared_ptr<const PlacementSet> set, int num_caches) {
    std::vector<PolicyEntry> entries;
    const double w = 1.0 / static_cast<double>(set->size());
    for (std::size_t j = 0; j < set->size(); ++j) entries.push_back({j, w});
    return Policy(std::move(set), std::vector<std::vector<PolicyEntry>>(
                                      static_cast<std::size_t>(num_caches), entries));
  }

  const PlacementSet& placements() const { return *set_; }
  const std::shared_ptr<const PlacementSet>& placements_ptr() const { return set_; }
  Family family() const { return set_->family(); }
  int num_caches() const { return static_cast<int>(per_cache_.size()); }
  const std::vector<PolicyEntry>& cache(int k) const { return per_cache_.at(static_cast<std::size_t>(k)); }
  const std::vector<std::vector<PolicyEntry>>& per_cache() const { return per_cache_; }

 private:
  std::shared_ptr<const PlacementSet> set_;
  std::vector<std::vector<PolicyEntry>> per_cache_;
};

namespace detail {

inline void require_plain_family(const Policy& pol) {
  if (pol.family() == Family::subset)
    throw ValidationError("operation requires a chunk- or file-family policy");
}

inline void require_subset_family(const Policy& pol) {
  if (pol.family() != Family::subset || !pol.placements().partition())
    throw ValidationError("operation requires a subset-family policy");
}

inline void check_compatible(const Scenario& s, const Policy& pol) {
  const auto& set = pol.placements();
  if (pol.num_caches() != s.num_caches())
    throw ValidationError("policy has " + std::to_string(pol.num_caches()) +
                          " caches, scenario has " + std::to_string(s.num_caches()));
  if (set.chunks_per_file() != s.chunks_per_file() || set.cache_capacity() != s.cache_capacity())
    throw ValidationError("placement set was enumerated for a different (M, C)");
  if (set.family() == Family::subset) {
    set.partition()->validate_for(s.num_files());
  } else if (set.width() != s.num_files()) {
    throw ValidationError("placement width does not match num_files");
  }
}

}  // namespace detail

// q[k][i][x]: probability that cache k holds x chunks of file i (chunk/file
// family) or x chunks of subset i (subset family).
using Marginals = std::vector<std::vector<std::vector<double>>>;

inline Marginals compute_marginals(const Policy& pol) {
  const auto& set = pol.placements();
  const int c = set.chunks_per_file();
  Marginals q(static_cast<std::size_t>(pol.num_caches()));
  for (int k = 0; k < pol.num_caches(); ++k) {
    auto& qk = q[static_cast<std::size_t>(k)];
    qk.resize(static_cast<std::size_t>(set.width()));
    for (int i = 0; i < set.width(); ++i) {
      int max_x = set.family() == Family::subset ? set.partition()->size(i) * c : c;
      qk[static_cast<std::size_t>(i)].assign(static_cast<std::size_t>(max_x) + 1, 0.0);
    }
    for (const auto& e : pol.cache(k)) {
      auto z = set[e.index];
      for (int i = 0; i < set.width(); ++i) qk[static_cast<std::size_t>(i)][static_cast<std::size_t>(z[i])] += e.prob;
    }
  }
  return q;
}

// q^(k)_{i,x} = sum over placements with z_i = x of P^(k)(z).
inline double marginal_chunk_prob(const Policy& pol, int k, int i, int x) {
  detail::require_plain_family(pol);
  const auto& set = pol.placements();
  if (k < 0 || k >= pol.num_caches() || i < 0 || i >= set.width())
    throw ValidationError("marginal_chunk_prob: index out of range");
  if (x < 0 || x > set.chunks_per_file()) return 0.0;
  double sum = 0.0;
  for (const auto& e : pol.cache(k)) {
    if (set[e.index][static_cast<std::size_t>(i)] == x) sum += e.prob;
  }
  return sum;
}

// P(Y = y | k, i) = q^(k)_{i, C-y}, y = 0..C.
inline std::vector<double> transfer_distribution(const Policy& pol, int k, int i) {
  detail::require_plain_family(pol);
  const int c = pol.placements().chunks_per_file();
  std::vector<double> dist(static_cast<std::size_t>(c) + 1);
  for (int y = 0; y <= c; ++y) dist[static_cast<std::size_t>(y)] = marginal_chunk_prob(pol, k, i, c - y);
  return dist;
}

// P(Y = y | l, k) for subset family: hypergeometric mixture over the number
// of chunks x cached from subset l.
inline std::vector<double> spc_transfer_from_marginal(const std::vector<double>& q_l,
                                                      int subset_size, int chunks) {
  const int pool = subset_size * chunks;
  std::vector<double> dist(static_cast<std::size_t>(chunks) + 1, 0.0);
  for (int y = 0; y <= chunks; ++y) {
    double sum = 0.0;
    for (int x = chunks - y; x <= pool; ++x) {
      double qx = q_l[static_cast<std::size_t>(x)];
      if (qx != 0.0) sum += qx * hypergeometric_pmf(pool, chunks, x, chunks - y);
    }
    dist[static_cast<std::size_t>(y)] = sum;
  }
  return dist;
}

inline std::vector<double> spc_transfer_distribution(const Policy& pol, int k, int l) {
  detail::require_subset_family(pol);
  const auto& set = pol.placements();
  const auto& part = *set.partition();
  if (k < 0 || k >= pol.num_caches() || l < 0 || l >= part.num_subsets())
    throw ValidationError("spc_transfer_distribution: index out of range");
  const int c = set.chunks_per_file();
  std::vector<double> q(static_cast<std::size_t>(part.size(l) * c) + 1, 0.0);
  for (const auto& e : pol.cache(k)) q[static_cast<std::size_t>(set[e.index][static_cast<std::size_t>(l)])] += e.prob;
  return spc_transfer_from_marginal(q, part.size(l), c);
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

// MAP estimate for one observed chunk count y. `subset` is -1 for chunk/file
// family policies; for subset family the file is the subset's most popular.
struct DecisionEntry {
  int y = 0;
  int cache = 0;
  int file = 0;
  int subset = -1;
  double score = 0.0;
};

struct AdversaryDecision {
  std::vector<DecisionEntry> entries;  // indexed by y = 0..C

  const DecisionEntry& at(int y) const { return entries.at(static_cast<std::size_t>(y)); }
  int max_y() const { return static_cast<int>(entries.size()) - 1; }
};

struct EvaluationReport {
  double omega = 0.0;
  double psi = 0.0;
  std::vector<double> hit_ratio;  // per cache
  double average_hit_ratio = 0.0;
  AdversaryDecision decision;
};

// ---------------------------------------------------------------------------
// Chunk / file family metrics
// ---------------------------------------------------------------------------

inline double communication_cost(const Scenario& s, const Policy& pol) {
  detail::require_plain_family(pol);
  detail::check_compatible(s, pol);
  const int c = s.chunks_per_file();
  const auto& set = pol.placements();
  double omega = 0.0;
  for (int k = 0; k < s.num_caches(); ++k) {
    double per_cache = 0.0;
    for (const auto& e : pol.cache(k)) {
      auto z = set[e.index];
      double missing = 0.0;
      for (int i = 0; i < s.num_files(); ++i) missing += s.popularity(i) * (c - z[static_cast<std::size_t>(i)]);
      per_cache += e.prob * missing;
    }
    omega += s.request_gen(k) * per_cache;
  }
  return omega / c;
}

// Score table max_{k,i} p_i p_g^(k) P(Y=y|k,i); ties go to the smallest k,
// then the smallest i (strict comparison in cache-major order).
inline AdversaryDecision map_decision(const Scenario& s, const Marginals& q) {
  const int c = s.chunks_per_file();
  AdversaryDecision table;
  for (int y = 0; y <= c; ++y) {
    DecisionEntry best{y, 0, 0, -1, -1.0};
    for (int k = 0; k < s.num_caches(); ++k) {
      for (int i = 0; i < s.num_files(); ++i) {
        double score = s.request_gen(k) * s.popularity(i) *
                       q[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)][static_cast<std::size_t>(c - y)];
        if (score > best.score) best = {y, k, i, -1, score};
      }
    }
    table.entries.push_back(best);
  }
  return table;
}

struct PrivacyResult {
  double psi = 0.0;
  AdversaryDecision decision;
};

inline PrivacyResult privacy_degree(const Scenario& s, const Policy& pol) {
  detail::require_plain_family(pol);
  detail::check_compatible(s, pol);
  PrivacyResult r;
  r.decision = map_decision(s, compute_marginals(pol));
  double attained = 0.0;
  for (const auto& e : r.decision.entries) attained += e.score;
  r.psi = 1.0 - attained;
  return r;
}

struct HitRatio {
  std::vector<double> per_cache;
  double average = 0.0;
};

// A request hits when at least one chunk of the requested file is cached.
inline HitRatio hit_ratio(const Scenario& s, const Policy& pol) {
  detail::require_plain_family(pol);
  detail::check_compatible(s, pol);
  const auto& set = pol.placements();
  HitRatio h;
  for (int k = 0; k < s.num_caches(); ++k) {
    double hk = 0.0;
    for (const auto& e : pol.cache(k)) {
      auto z = set[e.index];
      double covered = 0.0;
      for (int i = 0; i < s.num_files(); ++i) {
        if (z[static_cast<std::size_t>(i)] != 0) covered += s.popularity(i);
      }
      hk += e.prob * covered;
    }
    h.per_cache.push_back(hk);
    h.average += s.request_gen(k) * hk;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Subset family metrics
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<double> subset_mass(const Scenario& s, const Partition& part) {
  std::vector<double> a(static_cast<std::size_t>(part.num_subsets()), 0.0);
  for (int l = 0; l < part.num_subsets(); ++l) {
    for (int i = part.begin(l); i < part.begin(l) + part.size(l); ++i) a[static_cast<std::size_t>(l)] += s.popularity(i);
  }
  return a;
}

// Most popular file of subset l is its first (files are popularity-sorted).
inline double subset_top(const Scenario& s, const Partition& part, int l) {
  return s.popularity(part.begin(l));
}

// 1 - C(|S|C - C, x) / C(|S|C, x): some chunk of the requested file is among x.
inline double subset_hit_term(int subset_size, int chunks, int x) {
  return 1.0 - hypergeometric_pmf(subset_size * chunks, chunks, x, 0);
}

}  // namespace detail

inline double spc_communication_cost(const Scenario& s, const Policy& pol) {
  detail::require_subset_family(pol);
  detail::check_compatible(s, pol);
  const auto& set = pol.placements();
  const auto& part = *set.partition();
  const int c = s.chunks_per_file();
  auto a = detail::subset_mass(s, part);
  double omega = 0.0;
  for (int k = 0; k < s.num_caches(); ++k) {
    double per_cache = 0.0;
    for (const auto& e : pol.cache(k)) {
      auto z = set[e.index];
      double missing = 0.0;
      for (int l = 0; l < part.num_subsets(); ++l) {
        missing += a[static_cast<std::size_t>(l)] *
                   (c - static_cast<double>(z[static_cast<std::size_t>(l)]) / part.size(l));
      }
      per_cache += e.prob * missing;
    }
    omega += s.request_gen(k) * per_cache;
  }
  return omega / c;
}

inline PrivacyResult spc_privacy_degree(const Scenario& s, const Policy& pol) {
  detail::require_subset_family(pol);
  detail::check_compatible(s, pol);
  const auto& part = *pol.placements().partition();
  const int c = s.chunks_per_file();
  auto q = compute_marginals(pol);
  // dist[k][l][y]
  std::vector<std::vector<std::vector<double>>> dist(static_cast<std::size_t>(s.num_caches()));
  for (int k = 0; k < s.num_caches(); ++k) {
    for (int l = 0; l < part.num_subsets(); ++l) {
      dist[static_cast<std::size_t>(k)].push_back(spc_transfer_from_marginal(
          q[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)], part.size(l), c));
    }
  }
  PrivacyResult r;
  double attained = 0.0;
  for (int y = 0; y <= c; ++y) {
    DecisionEntry best{y, 0, 0, 0, -1.0};
    for (int k = 0; k < s.num_caches(); ++k) {
      for (int l = 0; l < part.num_subsets(); ++l) {
        double score = s.request_gen(k) * detail::subset_top(s, part, l) *
                       dist[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)][static_cast<std::size_t>(y)];
        if (score > best.score) best = {y, k, part.begin(l), l, score};
      }
    }
    attained += best.score;
    r.decision.entries.push_back(best);
  }
  r.psi = 1.0 - attained;
  return r;
}

inline HitRatio spc_hit_ratio(const Scenario& s, const Policy& pol) {
  detail::require_subset_family(pol);
  detail::check_compatible(s, pol);
  const auto& set = pol.placements();
  const auto& part = *set.partition();
  const int c = s.chunks_per_file();
  auto a = detail::subset_mass(s, part);
  HitRatio h;
  for (int k = 0; k < s.num_caches(); ++k) {
    double hk = 0.0;
    for (const auto& e : pol.cache(k)) {
      auto z = set[e.index];
      double covered = 0.0;
      for (int l = 0; l < part.num_subsets(); ++l) {
        covered += a[static_cast<std::size_t>(l)] *
                   detail::subset_hit_term(part.size(l), c, z[static_cast<std::size_t>(l)]);
      }
      hk += e.prob * covered;
    }
    h.per_cache.push_back(hk);
    h.average += s.request_gen(k) * hk;
  }
  return h;
}

// Full analytic evaluation, dispatching on the policy's family.
inline EvaluationReport evaluate(const Scenario& s, const Policy& pol) {
  EvaluationReport rep;
  const bool subset = pol.family() == Family::subset;
  rep.omega = subset ? spc_communication_cost(s, pol) : communication_cost(s, pol);
  auto priv = subset ? spc_privacy_degree(s, pol) : privacy_degree(s, pol);
  rep.psi = priv.psi;
  rep.decision = std::move(priv.decision);
  auto h = subset ? spc_hit_ratio(s, pol) : hit_ratio(s, pol);
  rep.hit_ratio = std::move(h.per_cache);
  rep.average_hit_ratio = h.average;
  return rep;
}

// ---------------------------------------------------------------------------
// Closed-form privacy bounds
// ---------------------------------------------------------------------------

struct PrivacyBounds {
  double psi_min = 0.0;
  double psi_max = 0.0;
};

// psi_min = 1 - pg_max (p_1 + p_{M+1}); psi_max = 1 - pg_max p_1.
inline PrivacyBounds privacy_bounds(const Scenario& s) {
  const double pg = s.max_request_gen();
  const double p1 = s.popularity(0);
  const double next = s.popularity(s.cache_capacity());
  return {1.0 - pg * p1 - pg * next, 1.0 - pg * p1};
}

struct SpcPrivacyBounds {
  double psi_min = 0.0;
  double psi_max = 0.0;
  int boundary_subset = 0;   // m: first subset not cached completely (0-based)
  int boundary_chunks = 0;   // z_m: chunks cached from subset m
  bool exact_fill = false;   // z_m == 0: MC exhausts the subsets before m
};

// Bounds for the subset family, from the greedy most-popular placement that
// fills subsets in index order. Each y term follows the case analysis of that
// placement: y = 0 is won by a fully cached subset (or by subset m when none
// is full), y = C by subset m or m+1, and 0 < y < C only by subset m.
inline SpcPrivacyBounds spc_privacy_bounds(const Scenario& s, const Partition& part) {
  part.validate_for(s.num_files());
  const int c = s.chunks_per_file();
  const double pg = s.max_request_gen();
  SpcPrivacyBounds b;
  int remaining = s.cache_capacity() * c;
  int m = 0;
  while (m < part.num_subsets() && remaining >= part.size(m) * c) {
    remaining -= part.size(m) * c;
    ++m;
  }
  // m < L always since MC < NC.
  b.boundary_subset = m;
  b.boundary_chunks = remaining;
  b.exact_fill = remaining == 0;
  const int pool = part.size(m) * c;
  const double top_m = detail::subset_top(s, part, m);
  const double all_cached = hypergeometric_pmf(pool, c, remaining, c);  // P(Y=0 | m)
  const double none_cached = hypergeometric_pmf(pool, c, remaining, 0);  // P(Y=C | m)
  double y0 = top_m * all_cached;
  if (m > 0) y0 = std::max(y0, detail::subset_top(s, part, 0));
  double yc = top_m * none_cached;
  if (m + 1 < part.num_subsets()) yc = std::max(yc, detail::subset_top(s, part, m + 1));
  double middle = c > 1 ? top_m * std::max(0.0, 1.0 - all_cached - none_cached) : 0.0;
  b.psi_min = 1.0 - pg * (y0 + yc + middle);
  b.psi_max = 1.0 - pg * s.popularity(0);
  return b;
}

}  // namespace cacheveil
