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
#include <cstdint>
#include <limits>
#include <thread>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "cacheveil/baselines.hpp"
#include "cacheveil/common.hpp"
#include "cacheveil/metrics.hpp"
#include "cacheveil/scenario.hpp"

namespace cacheveil {

struct SimConfig {
  std::uint64_t num_requests = 100000;
  std::uint64_t seed = 1;
  bool resample_placements_each_request = true;
};

struct SimReport {
  std::uint64_t num_requests = 0;
  double omega = 0.0;
  double omega_se = 0.0;
  double psi = 0.0;
  double psi_se = 0.0;
  std::vector<std::uint64_t> histogram;       // requests per observed y
  std::vector<std::uint64_t> correct_by_y;    // adversary successes per y
};

// Counter-based generator: the stream for request r depends only on (seed, r).
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t counter)
      : state_(mix(seed ^ mix(counter + 0x632be59bd9b4e019ULL))) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t v;
    do v = next();
    while (v >= limit);
    return v % n;
  }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

namespace detail {

// Index drawn from `weights` (cumulative search); the last positive entry
// absorbs rounding.
template <typename Weight>
std::size_t draw_index(const std::vector<Weight>& cumulative, double u) {
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  if (it == cumulative.end()) return cumulative.size() - 1;
  return static_cast<std::size_t>(it - cumulative.begin());
}

inline std::vector<double> cumulative(const std::vector<double>& w) {
  std::vector<double> c(w.size());
  double run = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) c[j] = run += w[j];
  return c;
}

struct Counters {
  std::uint64_t sum_y = 0;
  std::uint64_t sum_y2 = 0;
  std::uint64_t correct = 0;
  std::vector<std::uint64_t> histogram;
  std::vector<std::uint64_t> correct_by_y;

  explicit Counters(int c)
      : histogram(static_cast<std::size_t>(c) + 1, 0), correct_by_y(static_cast<std::size_t>(c) + 1, 0) {}

  void add(int y, bool hit) {
    sum_y += static_cast<std::uint64_t>(y);
    sum_y2 += static_cast<std::uint64_t>(y) * static_cast<std::uint64_t>(y);
    ++histogram[static_cast<std::size_t>(y)];
    if (hit) {
      ++correct;
      ++correct_by_y[static_cast<std::size_t>(y)];
    }
  }

  void merge(const Counters& o) {
    sum_y += o.sum_y;
    sum_y2 += o.sum_y2;
    correct += o.correct;
    for (std::size_t y = 0; y < histogram.size(); ++y) {
      histogram[y] += o.histogram[y];
      correct_by_y[y] += o.correct_by_y[y];
    }
  }
};

inline void check_decision(const Scenario& s, const AdversaryDecision& d) {
  const int c = s.chunks_per_file();
  if (d.max_y() != c)
    throw ValidationError("decision table covers y = 0.." + std::to_string(d.max_y()) +
                          " but the scenario has C = " + std::to_string(c));
  for (int y = 0; y <= c; ++y) {
    const auto& e = d.at(y);
    if (e.y != y || e.cache < 0 || e.cache >= s.num_caches() || e.file < 0 || e.file >= s.num_files())
      throw ValidationError("decision table entry for y = " + std::to_string(y) + " is inconsistent");
  }
}

// Runs `one(r, counters)` for every request index, split into contiguous
// blocks across workers; integer counters make the merge order irrelevant.
template <typename Fn>
Counters run_requests(const SimConfig& cfg, int c, Fn&& one) {
  const std::uint64_t n = cfg.num_requests;
  const std::uint64_t workers = std::max<std::uint64_t>(1, std::min<std::uint64_t>(worker_count(), n / 4096 + 1));
  std::vector<Counters> parts(static_cast<std::size_t>(workers), Counters(c));
  auto block = [&](std::uint64_t w) {
    const std::uint64_t lo = n * w / workers;
    const std::uint64_t hi = n * (w + 1) / workers;
    for (std::uint64_t r = lo; r < hi; ++r) one(r, parts[static_cast<std::size_t>(w)]);
  };
  if (workers == 1) {
    block(0);
  } else {
    std::vector<std::thread> pool;
    for (std::uint64_t w = 0; w < workers; ++w) pool.emplace_back(block, w);
    for (auto& t : pool) t.join();
  }
  Counters total(c);
  for (const auto& p : parts) total.merge(p);
  return total;
}

inline SimReport finish(const Counters& t, std::uint64_t n, int c) {
  SimReport r;
  r.num_requests = n;
  const double dn = static_cast<double>(n);
  const double mean_y = static_cast<double>(t.sum_y) / dn;
  const double var_y = std::max(0.0, static_cast<double>(t.sum_y2) / dn - mean_y * mean_y);
  r.omega = mean_y / c;
  r.omega_se = std::sqrt(var_y / dn) / c;
  const double success = static_cast<double>(t.correct) / dn;
  r.psi = 1.0 - success;
  r.psi_se = std::sqrt(success * (1.0 - success) / dn);
  r.histogram = t.histogram;
  r.correct_by_y = t.correct_by_y;
  return r;
}

// Number of the requested file's `chunks` chunks among `draws` picked
// uniformly without replacement from a pool of `pool` chunks.
inline int draw_overlap(CounterRng& rng, int pool, int chunks, int draws) {
  int marked = chunks, hits = 0;
  for (int d = 0; d < draws; ++d) {
    if (rng.below(static_cast<std::uint64_t>(pool - d)) < static_cast<std::uint64_t>(marked)) {
      ++hits;
      --marked;
    }
  }
  return hits;
}

}  // namespace detail

// Replays the delivery phase for `pol` with the adversary answering from
// `decision` (normally evaluate(s, pol).decision).
inline SimReport simulate(const Scenario& s, const Policy& pol, const AdversaryDecision& decision,
                          const SimConfig& cfg) {
  if (cfg.num_requests < 1) throw ValidationError("simulate: num_requests must be >= 1");
  detail::check_compatible(s, pol);
  detail::check_decision(s, decision);
  const int c = s.chunks_per_file();
  const int kc = s.num_caches();
  const auto& set = pol.placements();
  const bool subset = set.family() == Family::subset;
  const Partition* part = subset ? &*set.partition() : nullptr;
  if (subset) {
    for (int y = 0; y <= c; ++y) {
      const auto& e = decision.at(y);
      if (e.subset < 0 || e.subset >= part->num_subsets() || part->begin(e.subset) != e.file)
        throw ValidationError("decision table does not match the subset family policy");
    }
  }
  // Subset index of every file.
  std::vector<int> subset_of(static_cast<std::size_t>(s.num_files()), 0);
  if (subset)
    for (int l = 0; l < part->num_subsets(); ++l)
      for (int i = part->begin(l); i < part->begin(l) + part->size(l); ++i) subset_of[static_cast<std::size_t>(i)] = l;

  std::vector<double> gen_w, pop_w;
  for (int k = 0; k < kc; ++k) gen_w.push_back(s.request_gen(k));
  for (int i = 0; i < s.num_files(); ++i) pop_w.push_back(s.popularity(i));
  const auto gen_cum = detail::cumulative(gen_w);
  const auto pop_cum = detail::cumulative(pop_w);
  std::vector<std::vector<double>> pol_cum(static_cast<std::size_t>(kc));
  for (int k = 0; k < kc; ++k) {
    std::vector<double> w;
    for (const auto& e : pol.cache(k)) w.push_back(e.prob);
    pol_cum[static_cast<std::size_t>(k)] = detail::cumulative(w);
  }
  auto draw_placement = [&](int k, double u) {
    return pol.cache(k)[detail::draw_index(pol_cum[static_cast<std::size_t>(k)], u)].index;
  };
  // Held mode: one placement per cache for the whole run, from a dedicated stream.
  std::vector<std::size_t> held(static_cast<std::size_t>(kc));
  if (!cfg.resample_placements_each_request) {
    CounterRng rng(cfg.seed, std::numeric_limits<std::uint64_t>::max());
    for (int k = 0; k < kc; ++k) held[static_cast<std::size_t>(k)] = draw_placement(k, rng.uniform());
  }

  auto one = [&](std::uint64_t r, detail::Counters& acc) {
    CounterRng rng(cfg.seed, r);
    const int k = static_cast<int>(detail::draw_index(gen_cum, rng.uniform()));
    const int i = static_cast<int>(detail::draw_index(pop_cum, rng.uniform()));
    const double u = rng.uniform();
    const std::size_t j = cfg.resample_placements_each_request ? draw_placement(k, u) : held[static_cast<std::size_t>(k)];
    auto z = set[j];
    int cached;
    if (subset) {
      const int l = subset_of[static_cast<std::size_t>(i)];
      cached = detail::draw_overlap(rng, part->size(l) * c, c, z[static_cast<std::size_t>(l)]);
    } else {
      cached = z[static_cast<std::size_t>(i)];
    }
    const int y = c - cached;
    const auto& guess = decision.at(y);
    acc.add(y, guess.cache == k && guess.file == i);
  };
  return detail::finish(detail::run_requests(cfg, c, one), cfg.num_requests, c);
}

// RDA protocol: most popular M files cached everywhere, cached requests
// answered with C dummy chunks with probability s.
inline SimReport simulate(const Scenario& s, const RdaConfig& rda, const AdversaryDecision& decision,
                          const SimConfig& cfg) {
  if (cfg.num_requests < 1) throw ValidationError("simulate: num_requests must be >= 1");
  validate(rda);
  detail::check_decision(s, decision);
  const int c = s.chunks_per_file();
  std::vector<double> gen_w, pop_w;
  for (int k = 0; k < s.num_caches(); ++k) gen_w.push_back(s.request_gen(k));
  for (int i = 0; i < s.num_files(); ++i) pop_w.push_back(s.popularity(i));
  const auto gen_cum = detail::cumulative(gen_w);
  const auto pop_cum = detail::cumulative(pop_w);
  auto one = [&](std::uint64_t r, detail::Counters& acc) {
    CounterRng rng(cfg.seed, r);
    const int k = static_cast<int>(detail::draw_index(gen_cum, rng.uniform()));
    const int i = static_cast<int>(detail::draw_index(pop_cum, rng.uniform()));
    const double u = rng.uniform();
    int y = c;
    if (i < s.cache_capacity() && u >= rda.s) y = 0;
    const auto& guess = decision.at(y);
    acc.add(y, guess.cache == k && guess.file == i);
  };
  return detail::finish(detail::run_requests(cfg, c, one), cfg.num_requests, c);
}

// Analytic Pr{Y = y} = sum_{k,i} p_g p_i P(Y = y | k, i).
inline std::vector<double> analytic_y_distribution(const Scenario& s, const Policy& pol) {
  detail::check_compatible(s, pol);
  const int c = s.chunks_per_file();
  std::vector<double> out(static_cast<std::size_t>(c) + 1, 0.0);
  const auto& set = pol.placements();
  for (int k = 0; k < s.num_caches(); ++k) {
    if (set.family() == Family::subset) {
      const auto& part = *set.partition();
      auto mass = detail::subset_mass(s, part);
      for (int l = 0; l < part.num_subsets(); ++l) {
        auto d = spc_transfer_distribution(pol, k, l);
        for (int y = 0; y <= c; ++y) out[static_cast<std::size_t>(y)] += s.request_gen(k) * mass[static_cast<std::size_t>(l)] * d[static_cast<std::size_t>(y)];
      }
    } else {
      for (int i = 0; i < s.num_files(); ++i) {
        auto d = transfer_distribution(pol, k, i);
        for (int y = 0; y <= c; ++y) out[static_cast<std::size_t>(y)] += s.request_gen(k) * s.popularity(i) * d[static_cast<std::size_t>(y)];
      }
    }
  }
  return out;
}

inline std::vector<double> analytic_y_distribution(const Scenario& s, const RdaConfig& rda) {
  validate(rda);
  const int c = s.chunks_per_file();
  double cached = 0.0;
  for (int i = 0; i < s.cache_capacity(); ++i) cached += s.popularity(i);
  std::vector<double> out(static_cast<std::size_t>(c) + 1, 0.0);
  out[0] += (1.0 - rda.s) * cached;
  out[static_cast<std::size_t>(c)] += 1.0 - (1.0 - rda.s) * cached;
  return out;
}

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

// Pearson goodness of fit. Bins with expected count below 5 are pooled into
// one; a nonzero count where the expected probability is zero gives p = 0.
inline ChiSquareResult chi_square_gof(const std::vector<std::uint64_t>& observed,
                                      const std::vector<double>& expected_prob) {
  if (observed.size() != expected_prob.size()) throw ValidationError("chi-square: size mismatch");
  double n = 0.0;
  for (auto o : observed) n += static_cast<double>(o);
  std::vector<std::pair<double, double>> bins;  // (observed, expected)
  double pooled_o = 0.0, pooled_e = 0.0;
  for (std::size_t j = 0; j < observed.size(); ++j) {
    const double o = static_cast<double>(observed[j]);
    const double e = n * expected_prob[j];
    if (e <= 0.0) {
      if (o > 0.0) return {std::numeric_limits<double>::infinity(), 0, 0.0};
      continue;
    }
    if (e < 5.0) {
      pooled_o += o;
      pooled_e += e;
    } else {
      bins.emplace_back(o, e);
    }
  }
  if (pooled_e > 0.0) bins.emplace_back(pooled_o, pooled_e);
  ChiSquareResult r;
  for (const auto& [o, e] : bins) r.statistic += (o - e) * (o - e) / e;
  r.dof = static_cast<int>(bins.size()) - 1;
  if (r.dof < 1) return {r.statistic, 0, 1.0};
  boost::math::chi_squared dist(r.dof);
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

}  // namespace cacheveil
