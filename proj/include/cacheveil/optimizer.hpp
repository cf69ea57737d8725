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
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <initializer_list>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "cacheveil/common.hpp"
#include "cacheveil/dpc_strategy.hpp"
#include "cacheveil/enumeration.hpp"
#include "cacheveil/metrics.hpp"
#include "cacheveil/scenario.hpp"
#include "cacheveil/simplex.hpp"

namespace cacheveil {

struct Targets {
  double zeta = 0.0;
  std::optional<double> beta;  // average hit ratio must be >= beta

  void validate() const {
    if (!(zeta >= 0.0 && zeta <= 1.0)) throw ValidationError("zeta must lie in [0,1]");
    if (beta && !(*beta >= 0.0 && *beta <= 1.0)) throw ValidationError("beta must lie in [0,1]");
  }
};

enum class Method { jpc, dpc, spc };

inline const char* to_string(Method m) {
  switch (m) {
    case Method::jpc: return "jpc";
    case Method::dpc: return "dpc";
    case Method::spc: return "spc";
  }
  return "?";
}

inline Method method_from_string(const std::string& s) {
  if (s == "jpc") return Method::jpc;
  if (s == "dpc") return Method::dpc;
  if (s == "spc") return Method::spc;
  throw ValidationError("unknown method \"" + s + "\"");
}

inline constexpr double kVerifyTolerance = 1e-6;
inline constexpr double kDropThreshold = 1e-10;

// ---------------------------------------------------------------------------
// LP builders
//
// Variable layout (fixed): placement probabilities cache-major in canonical
// placement order, followed by the Gamma_y (y = 0..C). The objective is Omega
// itself, i.e. it carries the 1/C factor.
// ---------------------------------------------------------------------------

namespace detail {

inline void require_family(const PlacementSet& ps, std::initializer_list<Family> allowed) {
  for (Family f : allowed)
    if (ps.family() == f) return;
  throw ValidationError(std::string("placement family ") + to_string(ps.family()) +
                        " does not match the requested program");
}

inline void check_set_matches(const Scenario& s, const PlacementSet& ps) {
  if (ps.chunks_per_file() != s.chunks_per_file() || ps.cache_capacity() != s.cache_capacity())
    throw ValidationError("placement set was enumerated for a different (M, C)");
}

}  // namespace detail

inline lp::LinearProgram build_jpc_lp(const Scenario& s, const PlacementSet& ps, const Targets& t) {
  detail::require_family(ps, {Family::chunk, Family::file});
  detail::check_set_matches(s, ps);
  if (ps.width() != s.num_files()) throw ValidationError("placement width does not match num_files");
  t.validate();
  const int n = s.num_files();
  const int kc = s.num_caches();
  const int c = s.chunks_per_file();
  const std::size_t f = ps.size();
  const std::size_t gamma0 = static_cast<std::size_t>(kc) * f;

  lp::LinearProgram lp(gamma0 + static_cast<std::size_t>(c) + 1);
  lp.names.resize(lp.num_vars());
  for (int k = 0; k < kc; ++k) {
    for (std::size_t j = 0; j < f; ++j) {
      auto z = ps[j];
      double missing = 0.0;
      for (int i = 0; i < n; ++i) missing += s.popularity(i) * (c - z[static_cast<std::size_t>(i)]);
      std::size_t v = static_cast<std::size_t>(k) * f + j;
      lp.objective[v] = s.request_gen(k) * missing / c;
      lp.upper[v] = 1.0;
      lp.names[v] = "P" + std::to_string(k + 1) + "_" + std::to_string(j);
    }
  }
  for (int y = 0; y <= c; ++y) lp.names[gamma0 + static_cast<std::size_t>(y)] = "G" + std::to_string(y);

  std::vector<lp::Term> priv;
  for (int y = 0; y <= c; ++y) priv.push_back({static_cast<int>(gamma0) + y, 1.0});
  lp.add_constraint(std::move(priv), lp::Relation::less_equal, 1.0 - t.zeta, "privacy");

  // by_count[i][x]: placements holding x chunks of file i.
  std::vector<std::vector<std::vector<std::size_t>>> by_count(
      static_cast<std::size_t>(n), std::vector<std::vector<std::size_t>>(static_cast<std::size_t>(c) + 1));
  for (std::size_t j = 0; j < f; ++j) {
    auto z = ps[j];
    for (int i = 0; i < n; ++i) by_count[static_cast<std::size_t>(i)][static_cast<std::size_t>(z[static_cast<std::size_t>(i)])].push_back(j);
  }
  for (int y = 0; y <= c; ++y) {
    for (int k = 0; k < kc; ++k) {
      for (int i = 0; i < n; ++i) {
        const double w = s.popularity(i) * s.request_gen(k);
        std::vector<lp::Term> terms;
        for (std::size_t j : by_count[static_cast<std::size_t>(i)][static_cast<std::size_t>(c - y)])
          terms.push_back({static_cast<int>(static_cast<std::size_t>(k) * f + j), w});
        terms.push_back({static_cast<int>(gamma0) + y, -1.0});
        lp.add_constraint(std::move(terms), lp::Relation::less_equal, 0.0,
                          "dom_y" + std::to_string(y) + "_k" + std::to_string(k + 1) + "_i" +
                              std::to_string(i + 1));
      }
    }
  }
  for (int k = 0; k < kc; ++k) {
    std::vector<lp::Term> terms;
    for (std::size_t j = 0; j < f; ++j) terms.push_back({static_cast<int>(static_cast<std::size_t>(k) * f + j), 1.0});
    lp.add_constraint(std::move(terms), lp::Relation::equal, 1.0, "norm_k" + std::to_string(k + 1));
  }
  if (t.beta) {
    std::vector<lp::Term> terms;
    for (int k = 0; k < kc; ++k) {
      for (std::size_t j = 0; j < f; ++j) {
        auto z = ps[j];
        double covered = 0.0;
        for (int i = 0; i < n; ++i)
          if (z[static_cast<std::size_t>(i)] != 0) covered += s.popularity(i);
        terms.push_back({static_cast<int>(static_cast<std::size_t>(k) * f + j), s.request_gen(k) * covered});
      }
    }
    lp.add_constraint(std::move(terms), lp::Relation::greater_equal, *t.beta, "hit");
  }
  return lp;
}

// Variables alpha_{k,i} (cache-major) then gamma_0, gamma_1.
inline lp::LinearProgram build_dpc_lp(const Scenario& s, const Targets& t) {
  t.validate();
  if (t.beta)
    throw ValidationError("dpc: hit-ratio targets are not supported (DPC hit ratio equals 1 - Omega); "
                          "use jpc or spc");
  const int n = s.num_files();
  const int kc = s.num_caches();
  const std::size_t g0 = static_cast<std::size_t>(kc * n);
  lp::LinearProgram lp(g0 + 2);
  lp.names.resize(lp.num_vars());
  lp.objective_offset = 1.0;
  for (int k = 0; k < kc; ++k) {
    for (int i = 0; i < n; ++i) {
      std::size_t v = static_cast<std::size_t>(k * n + i);
      lp.objective[v] = -s.request_gen(k) * s.popularity(i);
      lp.upper[v] = 1.0;
      lp.names[v] = "a" + std::to_string(k + 1) + "_" + std::to_string(i + 1);
    }
  }
  lp.names[g0] = "g0";
  lp.names[g0 + 1] = "g1";
  lp.add_constraint({{static_cast<int>(g0), 1.0}, {static_cast<int>(g0) + 1, 1.0}},
                    lp::Relation::less_equal, 1.0 - t.zeta, "privacy");
  for (int k = 0; k < kc; ++k) {
    for (int i = 0; i < n; ++i) {
      const double w = s.request_gen(k) * s.popularity(i);
      lp.add_constraint({{k * n + i, w}, {static_cast<int>(g0), -1.0}}, lp::Relation::less_equal, 0.0);
    }
  }
  for (int k = 0; k < kc; ++k) {
    for (int i = 0; i < n; ++i) {
      const double w = s.request_gen(k) * s.popularity(i);
      lp.add_constraint({{k * n + i, -w}, {static_cast<int>(g0) + 1, -1.0}}, lp::Relation::less_equal, -w);
    }
  }
  for (int k = 0; k < kc; ++k) {
    std::vector<lp::Term> terms;
    for (int i = 0; i < n; ++i) terms.push_back({k * n + i, 1.0});
    lp.add_constraint(std::move(terms), lp::Relation::equal, s.cache_capacity(), "norm_k" + std::to_string(k + 1));
  }
  return lp;
}

inline lp::LinearProgram build_spc_lp(const Scenario& s, const PlacementSet& ps, const Targets& t) {
  detail::require_family(ps, {Family::subset});
  detail::check_set_matches(s, ps);
  t.validate();
  const auto& part = *ps.partition();
  part.validate_for(s.num_files());
  const int kc = s.num_caches();
  const int c = s.chunks_per_file();
  const int nl = part.num_subsets();
  const std::size_t f = ps.size();
  const std::size_t gamma0 = static_cast<std::size_t>(kc) * f;
  auto a = detail::subset_mass(s, part);

  lp::LinearProgram lp(gamma0 + static_cast<std::size_t>(c) + 1);
  for (int k = 0; k < kc; ++k) {
    for (std::size_t j = 0; j < f; ++j) {
      auto z = ps[j];
      double missing = 0.0;
      for (int l = 0; l < nl; ++l)
        missing += a[static_cast<std::size_t>(l)] * (c - static_cast<double>(z[static_cast<std::size_t>(l)]) / part.size(l));
      std::size_t v = static_cast<std::size_t>(k) * f + j;
      lp.objective[v] = s.request_gen(k) * missing / c;
      lp.upper[v] = 1.0;
    }
  }
  std::vector<lp::Term> priv;
  for (int y = 0; y <= c; ++y) priv.push_back({static_cast<int>(gamma0) + y, 1.0});
  lp.add_constraint(std::move(priv), lp::Relation::less_equal, 1.0 - t.zeta, "privacy");

  // coeff[l][x][y] = P_{x, C-y} for subset l.
  std::vector<std::vector<std::vector<double>>> coeff(static_cast<std::size_t>(nl));
  for (int l = 0; l < nl; ++l) {
    const int pool = part.size(l) * c;
    auto& cl = coeff[static_cast<std::size_t>(l)];
    cl.assign(static_cast<std::size_t>(pool) + 1, std::vector<double>(static_cast<std::size_t>(c) + 1, 0.0));
    for (int x = 0; x <= pool; ++x)
      for (int y = 0; y <= c; ++y) cl[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)] = hypergeometric_pmf(pool, c, x, c - y);
  }
  for (int y = 0; y <= c; ++y) {
    for (int k = 0; k < kc; ++k) {
      for (int l = 0; l < nl; ++l) {
        const double w = detail::subset_top(s, part, l) * s.request_gen(k);
        std::vector<lp::Term> terms;
        for (std::size_t j = 0; j < f; ++j) {
          double h = coeff[static_cast<std::size_t>(l)][static_cast<std::size_t>(ps[j][static_cast<std::size_t>(l)])][static_cast<std::size_t>(y)];
          if (h != 0.0) terms.push_back({static_cast<int>(static_cast<std::size_t>(k) * f + j), w * h});
        }
        terms.push_back({static_cast<int>(gamma0) + y, -1.0});
        lp.add_constraint(std::move(terms), lp::Relation::less_equal, 0.0);
      }
    }
  }
  for (int k = 0; k < kc; ++k) {
    std::vector<lp::Term> terms;
    for (std::size_t j = 0; j < f; ++j) terms.push_back({static_cast<int>(static_cast<std::size_t>(k) * f + j), 1.0});
    lp.add_constraint(std::move(terms), lp::Relation::equal, 1.0, "norm_k" + std::to_string(k + 1));
  }
  if (t.beta) {
    std::vector<lp::Term> terms;
    for (int k = 0; k < kc; ++k) {
      for (std::size_t j = 0; j < f; ++j) {
        auto z = ps[j];
        double covered = 0.0;
        for (int l = 0; l < nl; ++l)
          covered += a[static_cast<std::size_t>(l)] * detail::subset_hit_term(part.size(l), c, z[static_cast<std::size_t>(l)]);
        terms.push_back({static_cast<int>(static_cast<std::size_t>(k) * f + j), s.request_gen(k) * covered});
      }
    }
    lp.add_constraint(std::move(terms), lp::Relation::greater_equal, *t.beta, "hit");
  }
  return lp;
}

// ---------------------------------------------------------------------------
// Conversions between JPC policies and DPC probabilities
// ---------------------------------------------------------------------------

// alpha_i^(k) = 1 - (1/C) sum_y y q_{i,C-y} = sum_x (x/C) q_{i,x}
inline std::vector<dpc::AlphaVector> project_to_dpc(const Scenario& s, const Policy& pol) {
  detail::require_plain_family(pol);
  detail::check_compatible(s, pol);
  const auto& set = pol.placements();
  const double c = s.chunks_per_file();
  std::vector<dpc::AlphaVector> alpha(static_cast<std::size_t>(pol.num_caches()),
                                      dpc::AlphaVector(static_cast<std::size_t>(s.num_files()), 0.0));
  for (int k = 0; k < pol.num_caches(); ++k) {
    for (const auto& e : pol.cache(k)) {
      auto z = set[e.index];
      for (int i = 0; i < s.num_files(); ++i) alpha[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] += e.prob * z[static_cast<std::size_t>(i)] / c;
    }
  }
  return alpha;
}

// Realizes per-cache alpha vectors as a file-family policy through the
// interval-filling layout.
inline Policy embed_dpc_as_jpc(const Scenario& s, const std::vector<dpc::AlphaVector>& alpha,
                               std::shared_ptr<const PlacementSet> file_set = nullptr,
                               const std::optional<dpc::FillOrder>& order = std::nullopt) {
  if (static_cast<int>(alpha.size()) != s.num_caches())
    throw ValidationError("embed_dpc_as_jpc: one alpha vector per cache required");
  if (!file_set) file_set = std::make_shared<const PlacementSet>(enumerate_file_placements(s));
  detail::require_family(*file_set, {Family::file});
  const int c = s.chunks_per_file();
  std::vector<std::vector<PolicyEntry>> per_cache;
  for (const auto& a : alpha) {
    if (static_cast<int>(a.size()) != s.num_files()) throw ValidationError("alpha length must equal num_files");
    if (dpc::validate_alpha(a) != s.cache_capacity())
      throw ValidationError("alpha must sum to the cache capacity M");
    auto layout = dpc::build_layout(a, order.value_or(dpc::ascending_order(s.num_files())));
    std::vector<PolicyEntry> entries;
    for (const auto& [files, p] : dpc::layout_to_distribution(layout)) {
      Placement z(static_cast<std::size_t>(s.num_files()), 0);
      for (int fidx : files) z[static_cast<std::size_t>(fidx)] = c;
      auto idx = file_set->index_of(z);
      if (!idx) throw InternalError("dpc placement missing from file family");
      entries.push_back({*idx, p});
    }
    std::sort(entries.begin(), entries.end(), [](const auto& x, const auto& y) { return x.index < y.index; });
    per_cache.push_back(std::move(entries));
  }
  return Policy(std::move(file_set), std::move(per_cache));
}

// ---------------------------------------------------------------------------
// optimize
// ---------------------------------------------------------------------------

struct OptimizeOptions {
  Family family = Family::chunk;             // jpc only: chunk or file
  std::optional<Partition> partition;        // spc only
  std::size_t cap = kDefaultEnumerationCap;
  std::optional<dpc::FillOrder> fill_order;  // dpc embedding
  lp::SolveOptions solver;
  std::shared_ptr<const PlacementSet> placements;  // reuse a pre-enumerated set
};

struct OptimizationOutcome {
  Method method = Method::jpc;
  lp::Status status = lp::Status::infeasible;
  double omega_star = 0.0;
  std::optional<Policy> policy;
  std::vector<dpc::AlphaVector> alpha;  // dpc only
  std::vector<double> gamma;            // Gamma_0..Gamma_C, or gamma_0, gamma_1 for dpc
  std::optional<EvaluationReport> verification;
  std::vector<double> top_placement_mass;  // per cache, diagnostic
  std::size_t num_vars = 0;
  std::size_t num_rows = 0;
  std::size_t iterations = 0;
  double solve_ms = 0.0;

  bool optimal() const { return status == lp::Status::optimal; }
};

namespace detail {

inline std::shared_ptr<const PlacementSet> placements_for(const Scenario& s, Method method,
                                                          const OptimizeOptions& opt) {
  if (opt.placements) {
    check_set_matches(s, *opt.placements);
    return opt.placements;
  }
  switch (method) {
    case Method::jpc:
      if (opt.family == Family::subset) throw ValidationError("jpc requires the chunk or file family");
      return std::make_shared<const PlacementSet>(enumerate_placements(s, opt.family, std::nullopt, opt.cap));
    case Method::spc:
      if (!opt.partition) throw ValidationError("spc requires a partition");
      return std::make_shared<const PlacementSet>(enumerate_subset_placements(s, *opt.partition, opt.cap));
    case Method::dpc:
      return std::make_shared<const PlacementSet>(enumerate_file_placements(s, opt.cap));
  }
  return nullptr;
}

inline Policy extract_policy(std::shared_ptr<const PlacementSet> set, int num_caches,
                             const std::vector<double>& x) {
  const std::size_t f = set->size();
  std::vector<std::vector<PolicyEntry>> per_cache(static_cast<std::size_t>(num_caches));
  for (int k = 0; k < num_caches; ++k) {
    auto& entries = per_cache[static_cast<std::size_t>(k)];
    double total = 0.0;
    for (std::size_t j = 0; j < f; ++j) {
      double v = x[static_cast<std::size_t>(k) * f + j];
      if (v >= kDropThreshold) {
        entries.push_back({j, v});
        total += v;
      }
    }
    if (entries.empty()) throw InternalError("solver returned an empty distribution");
    for (auto& e : entries) e.prob /= total;
  }
  return Policy(std::move(set), std::move(per_cache));
}

// Index of the placement that caches the most popular content greedily.
inline std::optional<std::size_t> top_placement(const Scenario& s, const PlacementSet& set) {
  Placement z(static_cast<std::size_t>(set.width()), 0);
  int remaining = s.cache_capacity() * s.chunks_per_file();
  for (int l = 0; l < set.width() && remaining > 0; ++l) {
    int cap = set.family() == Family::subset ? set.partition()->size(l) * s.chunks_per_file()
                                             : s.chunks_per_file();
    z[static_cast<std::size_t>(l)] = std::min(cap, remaining);
    remaining -= z[static_cast<std::size_t>(l)];
  }
  return set.index_of(z);
}

inline void verify(const OptimizationOutcome& out, const Targets& t) {
  const auto& rep = *out.verification;
  if (rep.psi < t.zeta - kVerifyTolerance)
    throw InternalError("verification failed: recomputed privacy " + std::to_string(rep.psi) +
                        " below zeta " + std::to_string(t.zeta));
  if (std::abs(rep.omega - out.omega_star) > kVerifyTolerance)
    throw InternalError("verification failed: recomputed cost " + std::to_string(rep.omega) +
                        " differs from solver objective " + std::to_string(out.omega_star));
  if (t.beta && rep.average_hit_ratio < *t.beta - kVerifyTolerance)
    throw InternalError("verification failed: hit ratio " + std::to_string(rep.average_hit_ratio) +
                        " below beta " + std::to_string(*t.beta));
}

}  // namespace detail

// Builds and solves the program for `method`, extracts the policy and checks
// it by independent re-evaluation. Throws InternalError on a mismatch.
inline OptimizationOutcome optimize(const Scenario& s, Method method, const Targets& t,
                                    const OptimizeOptions& opt = {}) {
  t.validate();
  OptimizationOutcome out;
  out.method = method;
  auto set = detail::placements_for(s, method, opt);

  lp::LinearProgram program = method == Method::jpc   ? build_jpc_lp(s, *set, t)
                              : method == Method::spc ? build_spc_lp(s, *set, t)
                                                      : build_dpc_lp(s, t);
  out.num_vars = program.num_vars();
  out.num_rows = program.num_rows();

  auto t0 = std::chrono::steady_clock::now();
  lp::LpSolution sol = lp::solve(program, opt.solver);
  out.solve_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  out.status = sol.status;
  out.iterations = sol.iterations;
  if (sol.status != lp::Status::optimal) return out;
  out.omega_star = sol.objective;

  const int kc = s.num_caches();
  if (method == Method::dpc) {
    const int n = s.num_files();
    for (int k = 0; k < kc; ++k) {
      dpc::AlphaVector a(sol.x.begin() + k * n, sol.x.begin() + (k + 1) * n);
      for (double& v : a) v = std::clamp(v, 0.0, 1.0);
      // Renormalize the numerical dust so the layout sees sum = M exactly.
      double sum = std::accumulate(a.begin(), a.end(), 0.0);
      if (sum > 0.0 && std::abs(sum - s.cache_capacity()) < 1e-7) {
        double scale = s.cache_capacity() / sum;
        for (double& v : a) v = std::min(1.0, v * scale);
      }
      out.alpha.push_back(std::move(a));
    }
    out.gamma = {sol.x[static_cast<std::size_t>(kc * n)], sol.x[static_cast<std::size_t>(kc * n) + 1]};
    out.policy = embed_dpc_as_jpc(s, out.alpha, set, opt.fill_order);
  } else {
    const std::size_t g0 = static_cast<std::size_t>(kc) * set->size();
    out.gamma.assign(sol.x.begin() + static_cast<std::ptrdiff_t>(g0), sol.x.end());
    out.policy = detail::extract_policy(set, kc, sol.x);
  }
  out.verification = evaluate(s, *out.policy);
  if (auto top = detail::top_placement(s, out.policy->placements())) {
    for (int k = 0; k < kc; ++k) {
      double mass = 0.0;
      for (const auto& e : out.policy->cache(k))
        if (e.index == *top) mass += e.prob;
      out.top_placement_mass.push_back(mass);
    }
  }
  detail::verify(out, t);
  return out;
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

struct SweepPoint {
  double zeta = 0.0;
  lp::Status status = lp::Status::infeasible;
  double omega_star = 0.0;
  double psi_verified = 0.0;
  double hit_ratio = 0.0;
  std::size_t num_vars = 0;
  std::size_t num_rows = 0;
  std::size_t iterations = 0;
  double solve_ms = 0.0;
};

// Runs fn(index) for index in [0, count) over worker threads.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn, std::size_t workers = worker_count()) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

// Inclusive start:stop:step grid; stop is included when within 1e-12.
inline std::vector<double> make_grid(double start, double stop, double step) {
  if (!(step > 0.0)) throw ValidationError("grid step must be positive");
  if (stop < start) throw ValidationError("grid stop must not precede start");
  std::vector<double> g;
  for (long j = 0;; ++j) {
    double v = start + static_cast<double>(j) * step;
    if (v > stop + 1e-12) break;
    g.push_back(std::min(v, stop));
  }
  return g;
}

inline std::vector<double> linspace(double start, double stop, int points) {
  if (points < 1) throw ValidationError("linspace needs at least one point");
  std::vector<double> g;
  for (int j = 0; j < points; ++j)
    g.push_back(points == 1 ? start : start + (stop - start) * j / (points - 1));
  if (points > 1) g.back() = stop;
  return g;
}

// One optimize call per grid point; points are independent and may run
// concurrently, results come back in grid order.
inline std::vector<SweepPoint> sweep_privacy(const Scenario& s, Method method,
                                             const std::vector<double>& zeta_grid,
                                             OptimizeOptions opt = {},
                                             std::optional<double> beta = std::nullopt) {
  if (zeta_grid.empty()) throw ValidationError("sweep: empty zeta grid");
  if (!std::is_sorted(zeta_grid.begin(), zeta_grid.end()))
    throw ValidationError("sweep: zeta grid must be ascending");
  if (!opt.placements) opt.placements = detail::placements_for(s, method, opt);
  std::vector<SweepPoint> out(zeta_grid.size());
  parallel_for(zeta_grid.size(), [&](std::size_t idx) {
    Targets t{zeta_grid[idx], beta};
    auto o = optimize(s, method, t, opt);
    SweepPoint& p = out[idx];
    p.zeta = t.zeta;
    p.status = o.status;
    p.num_vars = o.num_vars;
    p.num_rows = o.num_rows;
    p.iterations = o.iterations;
    p.solve_ms = o.solve_ms;
    if (o.optimal()) {
      p.omega_star = o.omega_star;
      p.psi_verified = o.verification->psi;
      p.hit_ratio = o.verification->average_hit_ratio;
    }
  });
  return out;
}

struct CminResult {
  std::optional<int> c_min;
  std::optional<OptimizationOutcome> outcome;
  int last_tried = 0;
  bool cap_exceeded = false;
  std::string cap_message;
};

// Smallest C in 1..c_max for which the hit-constrained program is feasible.
// Stops early, flagged, when a placement family exceeds the enumeration cap.
inline CminResult min_feasible_chunks(const Scenario& s, Method method, const Targets& t, int c_max,
                                      const OptimizeOptions& opt = {}) {
  if (method == Method::dpc) throw ValidationError("cmin: method must be jpc or spc");
  if (!t.beta) throw ValidationError("cmin: a hit-ratio target beta is required");
  if (c_max < 1) throw ValidationError("cmin: c_max must be >= 1");
  CminResult r;
  for (int c = 1; c <= c_max; ++c) {
    r.last_tried = c;
    Scenario sc = s.with_chunks(c);
    OptimizeOptions o = opt;
    o.placements = nullptr;
    try {
      auto out = optimize(sc, method, t, o);
      if (out.optimal()) {
        r.c_min = c;
        r.outcome = std::move(out);
        return r;
      }
    } catch (const CapExceededError& e) {
      r.cap_exceeded = true;
      r.cap_message = e.what();
      return r;
    }
  }
  return r;
}

}  // namespace cacheveil
