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
#include <string>

#include "cacheveil/common.hpp"
#include "cacheveil/metrics.hpp"
#include "cacheveil/scenario.hpp"

namespace cacheveil {

// Random dummy approach: the M most popular files are cached everywhere and a
// request for a cached file is answered with C dummy chunks with probability s.
struct RdaConfig {
  double s = 0.0;
};

inline void validate(const RdaConfig& cfg) {
  if (!(cfg.s >= 0.0 && cfg.s <= 1.0)) throw ValidationError("rda: s must lie in [0,1]");
}

// 1 - pg_max ((1-s) p_1 + max{p_{M+1}, s p_1})
inline double rda_privacy(const Scenario& sc, const RdaConfig& cfg) {
  validate(cfg);
  const double pg = sc.max_request_gen();
  const double p1 = sc.popularity(0);
  const double next = sc.popularity(sc.cache_capacity());
  return 1.0 - pg * ((1.0 - cfg.s) * p1 + std::max(next, cfg.s * p1));
}

// s sum_{i<=M} p_i + sum_{i>M} p_i
inline double rda_cost(const Scenario& sc, const RdaConfig& cfg) {
  validate(cfg);
  double cached = 0.0, uncached = 0.0;
  for (int i = 0; i < sc.num_files(); ++i) {
    (i < sc.cache_capacity() ? cached : uncached) += sc.popularity(i);
  }
  return cfg.s * cached + uncached;
}

// Smallest s whose privacy degree equals zeta.
inline RdaConfig rda_for_target(const Scenario& sc, double zeta) {
  const auto bounds = privacy_bounds(sc);
  const double tol = 1e-12;
  if (zeta < bounds.psi_min - tol || zeta > bounds.psi_max + tol)
    throw ValidationError("rda: privacy target " + std::to_string(zeta) + " outside [" +
                          std::to_string(bounds.psi_min) + ", " + std::to_string(bounds.psi_max) + "]");
  const double pg = sc.max_request_gen();
  const double p1 = sc.popularity(0);
  const double next = sc.popularity(sc.cache_capacity());
  double s = (p1 + next - (1.0 - zeta) / pg) / p1;
  return {std::clamp(s, 0.0, next / p1)};
}

// Analytic MAP table and metrics for RDA, using the same tie rule as the
// policy metrics. Cached files emit y = C with probability s and y = 0
// otherwise; uncached files always emit y = C.
inline EvaluationReport rda_evaluate(const Scenario& sc, const RdaConfig& cfg) {
  validate(cfg);
  const int c = sc.chunks_per_file();
  EvaluationReport rep;
  rep.omega = rda_cost(sc, cfg);
  double attained = 0.0;
  for (int y = 0; y <= c; ++y) {
    DecisionEntry best{y, 0, 0, -1, -1.0};
    for (int k = 0; k < sc.num_caches(); ++k) {
      for (int i = 0; i < sc.num_files(); ++i) {
        const bool cached = i < sc.cache_capacity();
        double p = 0.0;
        if (y == c) p = cached ? cfg.s : 1.0;
        if (y == 0 && cached) p += 1.0 - cfg.s;
        double score = sc.request_gen(k) * sc.popularity(i) * p;
        if (score > best.score) best = {y, k, i, -1, score};
      }
    }
    attained += best.score;
    rep.decision.entries.push_back(best);
  }
  rep.psi = 1.0 - attained;
  double hit = 0.0;
  for (int i = 0; i < sc.cache_capacity(); ++i) hit += sc.popularity(i);
  rep.hit_ratio.assign(static_cast<std::size_t>(sc.num_caches()), hit);
  rep.average_hit_ratio = hit;
  return rep;
}

}  // namespace cacheveil
