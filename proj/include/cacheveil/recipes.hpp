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

#include <cstdint>
#include <cstdio>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cacheveil/baselines.hpp"
#include "cacheveil/common.hpp"
#include "cacheveil/enumeration.hpp"
#include "cacheveil/metrics.hpp"
#include "cacheveil/montecarlo.hpp"
#include "cacheveil/optimizer.hpp"
#include "cacheveil/scenario.hpp"

namespace cacheveil {

// ---------------------------------------------------------------------------
// CSV tables
// ---------------------------------------------------------------------------

// Shortest round-trip-stable text for CSV cells.
inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) {
    if (row.size() != header.size()) throw InternalError("table row width mismatch");
    rows.push_back(std::move(row));
  }

  void write(std::ostream& os) const {
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t j = 0; j < cells.size(); ++j) os << (j ? "," : "") << cells[j];
      os << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
  }
};

inline std::string cell(double v) { return format_number(v); }
inline std::string cell(std::optional<double> v) { return v ? format_number(*v) : std::string(); }

// ---------------------------------------------------------------------------
// Figure recipes
// ---------------------------------------------------------------------------

struct RecipeContext {
  std::uint64_t seed = 1;
  std::size_t cap = kDefaultEnumerationCap;
  int points = 10;                     // privacy grid resolution
  std::uint64_t requests = 100000;     // simulated requests per point
};

struct RecipeOutput {
  std::string name;  // file stem
  Table table;
};

struct Recipe {
  std::string name;
  std::string description;
  std::function<std::vector<RecipeOutput>(const RecipeContext&)> run;
};

namespace recipes {

// L near-equal subsets, larger ones first.
inline Partition near_equal_partition(int num_files, int num_subsets) {
  if (num_subsets < 1 || num_subsets > num_files) throw ValidationError("partition: need 1 <= L <= N");
  std::vector<int> sizes(static_cast<std::size_t>(num_subsets), num_files / num_subsets);
  for (int l = 0; l < num_files % num_subsets; ++l) ++sizes[static_cast<std::size_t>(l)];
  return Partition(std::move(sizes));
}

inline std::optional<double> omega_if_optimal(const SweepPoint& p) {
  return p.status == lp::Status::optimal ? std::optional<double>(p.omega_star) : std::nullopt;
}

inline OptimizeOptions options(const RecipeContext& ctx) {
  OptimizeOptions o;
  o.cap = ctx.cap;
  return o;
}

inline OptimizeOptions spc_options(const RecipeContext& ctx, const Partition& part) {
  OptimizeOptions o = options(ctx);
  o.partition = part;
  return o;
}

// Zipf scenario with K = 2 caches.
inline Scenario zipf_scenario(int n, int m, int c, double alpha, std::vector<double> pg) {
  return Scenario(n, 2, m, c, zipf_popularity({alpha, n}), std::move(pg), alpha);
}

// JPC at C = 1 and C = 10 and DPC over the achievable privacy range of the
// default scenario, with a seeded simulation of the C = 10 policy.
inline std::vector<RecipeOutput> fig3(const RecipeContext& ctx) {
  const Scenario s1 = default_scenario(1);
  const Scenario s10 = default_scenario(10);
  const auto b = privacy_bounds(s1);
  const auto grid = linspace(b.psi_min, b.psi_max, ctx.points);

  auto jpc1 = sweep_privacy(s1, Method::jpc, grid, options(ctx));
  auto dpc = sweep_privacy(s1, Method::dpc, grid, options(ctx));

  OptimizeOptions o10 = options(ctx);
  o10.placements = std::make_shared<const PlacementSet>(enumerate_chunk_placements(s10, ctx.cap));
  std::vector<std::optional<OptimizationOutcome>> jpc10(grid.size());
  parallel_for(grid.size(), [&](std::size_t j) { jpc10[j] = optimize(s10, Method::jpc, {grid[j], std::nullopt}, o10); });

  RecipeOutput out{"fig3", {}};
  out.table.header = {"zeta",    "omega_jpc_c1", "omega_jpc_c10", "omega_dpc",
                      "sim_omega", "sim_omega_se", "sim_psi",     "sim_psi_se"};
  for (std::size_t j = 0; j < grid.size(); ++j) {
    std::vector<std::string> row = {cell(grid[j]), cell(omega_if_optimal(jpc1[j])), "",
                                    cell(omega_if_optimal(dpc[j])), "", "", "", ""};
    const auto& o = *jpc10[j];
    if (o.optimal()) {
      row[2] = cell(o.omega_star);
      SimConfig cfg{ctx.requests, ctx.seed, true};
      auto sim = simulate(s10, *o.policy, o.verification->decision, cfg);
      row[4] = cell(sim.omega);
      row[5] = cell(sim.omega_se);
      row[6] = cell(sim.psi);
      row[7] = cell(sim.psi_se);
    }
    out.table.add(std::move(row));
  }
  return {out};
}

// JPC, DPC and the random dummy baseline at C = 1.
inline std::vector<RecipeOutput> fig4(const RecipeContext& ctx) {
  const Scenario s = default_scenario(1);
  const auto b = privacy_bounds(s);
  const auto grid = linspace(b.psi_min, b.psi_max, ctx.points);
  auto jpc = sweep_privacy(s, Method::jpc, grid, options(ctx));
  auto dpc = sweep_privacy(s, Method::dpc, grid, options(ctx));

  RecipeOutput out{"fig4", {}};
  out.table.header = {"zeta", "omega_jpc", "omega_dpc", "omega_rda", "rda_s", "gap"};
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const auto rda = rda_for_target(s, grid[j]);
    const double cost = rda_cost(s, rda);
    auto oj = omega_if_optimal(jpc[j]);
    std::optional<double> gap;
    if (oj && cost > 0.0) gap = (cost - *oj) / cost;
    out.table.add({cell(grid[j]), cell(oj), cell(omega_if_optimal(dpc[j])), cell(cost), cell(rda.s), cell(gap)});
  }
  return {out};
}

inline Table cmin_table(const std::vector<std::pair<double, CminResult>>& results) {
  Table t;
  t.header = {"beta", "c_min", "omega_star"};
  for (const auto& [beta, r] : results) {
    t.add({cell(beta), r.c_min ? std::to_string(*r.c_min) : "",
           r.c_min ? cell(r.outcome->omega_star) : ""});
  }
  return t;
}

// Reduced-scale stand-in for the hit-ratio-constrained JPC figure: N = 6,
// M = 2, Zipf 1, privacy target at the scenario's minimum degree.
inline std::vector<RecipeOutput> fig5(const RecipeContext& ctx) {
  const Scenario s = zipf_scenario(6, 2, 1, 1.0, {0.7, 0.3});
  const double zeta = privacy_bounds(s).psi_min;
  const auto betas = make_grid(0.5, 1.0, 0.05);
  std::vector<std::pair<double, CminResult>> results(betas.size());
  parallel_for(betas.size(), [&](std::size_t j) {
    results[j] = {betas[j], min_feasible_chunks(s, Method::jpc, {zeta, betas[j]}, 6, options(ctx))};
  });
  RecipeOutput out{"fig5_reduced_scale", cmin_table(results)};
  out.table.header.push_back("scale");
  for (auto& r : out.table.rows) r.push_back("reduced-scale");
  return {out};
}

// SPC at L = 3, 6, 12 against JPC; N = 12, M = 3, Zipf 0.65, C = 1.
inline std::vector<RecipeOutput> fig6(const RecipeContext& ctx) {
  const Scenario s = zipf_scenario(12, 3, 1, 0.65, {0.7, 0.3});
  const auto b = privacy_bounds(s);
  const auto grid = linspace(b.psi_min, b.psi_max, ctx.points);
  RecipeOutput out{"fig6", {}};
  out.table.header = {"zeta", "omega_jpc"};
  std::vector<std::vector<SweepPoint>> cols;
  cols.push_back(sweep_privacy(s, Method::jpc, grid, options(ctx)));
  for (int l : {3, 6, 12}) {
    out.table.header.push_back("omega_spc_l" + std::to_string(l));
    cols.push_back(sweep_privacy(s, Method::spc, grid, spc_options(ctx, Partition::equal(12, l))));
  }
  for (std::size_t j = 0; j < grid.size(); ++j) {
    std::vector<std::string> row = {cell(grid[j])};
    for (const auto& c : cols) row.push_back(cell(omega_if_optimal(c[j])));
    out.table.add(std::move(row));
  }
  return {out};
}

// Hit-ratio-constrained SPC: C_min and cost versus beta at zeta = 0.81,
// N = 12, M = 3, Zipf 1, equal request generation. The chunk search is
// bounded per L to keep the subset family tractable.
inline std::vector<RecipeOutput> fig7(const RecipeContext& ctx) {
  const Scenario s = zipf_scenario(12, 3, 1, 1.0, {0.5, 0.5});
  const double zeta = 0.81;
  const auto betas = make_grid(0.5, 0.95, 0.05);
  const std::vector<std::pair<int, int>> ls = {{3, 6}, {6, 6}, {12, 3}};
  std::vector<std::tuple<int, double, CminResult>> results;
  for (const auto& [l, c_max] : ls)
    for (double beta : betas) results.emplace_back(l, beta, CminResult{});
  parallel_for(results.size(), [&](std::size_t j) {
    auto& [l, beta, r] = results[j];
    const int c_max = l == 12 ? 3 : 6;
    r = min_feasible_chunks(s, Method::spc, {zeta, beta}, c_max, spc_options(ctx, Partition::equal(12, l)));
  });
  RecipeOutput out{"fig7", {}};
  out.table.header = {"subsets", "beta", "c_max", "c_min", "omega_star"};
  for (const auto& [l, beta, r] : results) {
    out.table.add({std::to_string(l), cell(beta), std::to_string(r.last_tried),
                   r.c_min ? std::to_string(*r.c_min) : "", r.c_min ? cell(r.outcome->omega_star) : ""});
  }
  return {out};
}

// Average optimal SPC cost over each L's achievable privacy range, and the
// size of the subset family, for L = 2..12 near-equal subsets at C = 1.
inline std::vector<RecipeOutput> fig8(const RecipeContext& ctx) {
  const Scenario s = zipf_scenario(12, 3, 1, 1.0, {0.7, 0.3});
  RecipeOutput out{"fig8", {}};
  out.table.header = {"subsets", "num_placements", "psi_min", "psi_max", "avg_omega", "feasible_points"};
  for (int l = 2; l <= 12; ++l) {
    const Partition part = near_equal_partition(12, l);
    const auto b = spc_privacy_bounds(s, part);
    const auto grid = linspace(b.psi_min, b.psi_max, ctx.points);
    auto pts = sweep_privacy(s, Method::spc, grid, spc_options(ctx, part));
    double sum = 0.0;
    int feasible = 0;
    for (const auto& p : pts) {
      if (auto o = omega_if_optimal(p)) {
        sum += *o;
        ++feasible;
      }
    }
    out.table.add({std::to_string(l), count_placements(s, Family::subset, part).str(), cell(b.psi_min),
                   cell(b.psi_max), feasible ? cell(sum / feasible) : "", std::to_string(feasible)});
  }
  return {out};
}

}  // namespace recipes

inline std::vector<Recipe> figure_recipes() {
  return {
      {"fig3", "JPC (C=1, C=10) and DPC cost vs privacy, default scenario, with simulation", recipes::fig3},
      {"fig4", "JPC, DPC and random dummy cost vs privacy, default scenario, C=1", recipes::fig4},
      {"fig5", "reduced-scale: JPC C_min and cost vs hit-ratio target, N=6, M=2, Zipf 1", recipes::fig5},
      {"fig6", "SPC (L=3,6,12) and JPC cost vs privacy, N=12, M=3, Zipf 0.65, C=1", recipes::fig6},
      {"fig7", "SPC C_min and cost vs hit-ratio target, N=12, M=3, Zipf 1, zeta=0.81", recipes::fig7},
      {"fig8", "SPC average cost and placement count vs number of subsets, N=12, M=3", recipes::fig8},
  };
}

inline const Recipe& find_recipe(const std::string& name) {
  static const std::vector<Recipe> all = figure_recipes();
  for (const auto& r : all)
    if (r.name == name) return r;
  throw ValidationError("unknown recipe \"" + name + "\"");
}

}  // namespace cacheveil
