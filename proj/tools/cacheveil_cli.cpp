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

// cacheveil: command-line front end for the placement optimizers, baselines,
// simulator and figure recipes. Every subcommand writes its outputs plus a
// run manifest next to --out.

#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cacheveil/baselines.hpp"
#include "cacheveil/dpc_strategy.hpp"
#include "cacheveil/enumeration.hpp"
#include "cacheveil/metrics.hpp"
#include "cacheveil/montecarlo.hpp"
#include "cacheveil/optimizer.hpp"
#include "cacheveil/recipes.hpp"
#include "cacheveil/scenario.hpp"
#include "cacheveil/simplex.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace cacheveil;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kValidation = 2, kInfeasible = 3, kCapExceeded = 4 };

struct Globals {
  std::string scenario_path;
  std::string out;
  std::uint64_t seed = 1;
  std::size_t cap = kDefaultEnumerationCap;
  bool quiet = false;
};

// Options shared by several subcommands.
struct Args {
  std::string method = "jpc";
  std::string family;
  int subsets = 0;
  std::vector<int> partition;
  std::string zeta;
  std::string beta;
  std::string policy_path;
  std::string alpha_path;
  std::string fill_order;
  std::string lp_path;
  std::string recipe;
  double rda_s = -1.0;
  int c_max = 6;
  int samples = 0;
  int points = 10;
  std::uint64_t requests = 100000;
  bool list = false;
  bool held = false;
};

std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

// "<dir>/<stem><suffix>" for a sibling of `out`.
fs::path sibling(const fs::path& out, const std::string& suffix) {
  return out.parent_path() / (out.stem().string() + suffix);
}

// Collects written files and emits the run manifest.
class Run {
 public:
  // Recipes build their own scenarios; they pass a description instead.
  Run(std::string subcommand, const Globals& g, std::optional<Scenario> scenario,
      std::string builtin = {})
      : subcommand_(std::move(subcommand)), g_(g), scenario_(std::move(scenario)), builtin_(std::move(builtin)) {}

  const Scenario& scenario() const { return scenario_.value(); }
  const Globals& globals() const { return g_; }

  void write(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
    if (!out) throw Error("write failed for " + path.string());
    outputs_.push_back(path.string());
  }

  // Writes to --out when given, otherwise to stdout.
  void emit(const std::string& content) {
    if (g_.out.empty()) {
      std::cout << content;
    } else {
      write(g_.out, content);
    }
  }

  void emit_sibling(const std::string& suffix, const std::string& content) {
    if (!g_.out.empty()) write(sibling(g_.out, suffix), content);
  }

  void note(const std::string& msg) const {
    if (!g_.quiet) std::cerr << msg << '\n';
  }

  void finish(const json& params, const fs::path& manifest_path) {
    if (outputs_.empty()) return;
    json m;
    m["subcommand"] = subcommand_;
    const std::string content = scenario_ ? scenario_to_json(*scenario_).dump() : builtin_;
    m["scenario_digest"] = "fnv1a64:" + hex64(fnv1a(content));
    if (scenario_) {
      m["scenario"] = scenario_to_json(*scenario_);
    } else {
      m["scenario"] = builtin_;
    }
    m["params"] = params;
    m["version"] = kVersion;
    m["timestamp"] = utc_timestamp();
    m["outputs"] = outputs_;
    std::ofstream out(manifest_path, std::ios::binary);
    if (!out) throw Error("cannot write " + manifest_path.string());
    out << m.dump(2) << '\n';
  }

  fs::path default_manifest() const { return sibling(g_.out, ".manifest.json"); }

 private:
  std::string subcommand_;
  Globals g_;
  std::optional<Scenario> scenario_;
  std::string builtin_;
  std::vector<std::string> outputs_;
};

std::string to_csv(const Table& t) {
  std::ostringstream os;
  t.write(os);
  return os.str();
}

// start:stop:step (inclusive) or a single value.
std::vector<double> parse_grid(const std::string& spec, const char* what) {
  if (spec.empty()) throw ValidationError(std::string("--") + what + " is required");
  std::vector<double> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ValidationError(std::string("--") + what + ": cannot parse \"" + spec + "\"");
    }
  }
  if (parts.size() == 1) return parts;
  if (parts.size() != 3) throw ValidationError(std::string("--") + what + " must be VALUE or START:STOP:STEP");
  return make_grid(parts[0], parts[1], parts[2]);
}

double parse_single(const std::string& spec, const char* what) {
  auto g = parse_grid(spec, what);
  if (g.size() != 1) throw ValidationError(std::string("--") + what + " takes a single value here");
  return g[0];
}

std::optional<double> parse_optional(const std::string& spec, const char* what) {
  if (spec.empty()) return std::nullopt;
  return parse_single(spec, what);
}

std::optional<Partition> partition_from(const Args& a, const Scenario& s) {
  if (a.subsets > 0 && !a.partition.empty()) throw ValidationError("use either --subsets or --partition");
  if (a.subsets > 0) return Partition::equal(s.num_files(), a.subsets);
  if (!a.partition.empty()) {
    Partition p(a.partition);
    p.validate_for(s.num_files());
    return p;
  }
  return std::nullopt;
}

OptimizeOptions optimize_options(const Args& a, const Globals& g, const Scenario& s, Method m) {
  OptimizeOptions o;
  o.cap = g.cap;
  if (!a.family.empty()) o.family = family_from_string(a.family);
  o.partition = partition_from(a, s);
  if (m == Method::spc && !o.partition) throw ValidationError("spc requires --subsets or --partition");
  return o;
}

json placement_json(std::span<const int> z) { return std::vector<int>(z.begin(), z.end()); }

json policy_to_json(const Policy& pol) {
  json j;
  j["family"] = to_string(pol.family());
  if (pol.placements().partition()) j["partition"] = pol.placements().partition()->sizes();
  json caches = json::array();
  for (const auto& entries : pol.per_cache()) {
    json list = json::array();
    for (const auto& e : entries) {
      list.push_back({{"placement_index", e.index},
                      {"placement", placement_json(pol.placements()[e.index])},
                      {"prob", e.prob}});
    }
    caches.push_back(list);
  }
  j["caches"] = caches;
  return j;
}

// Accepts a bare per-cache list, a {family, partition, caches} object, or an
// optimize result carrying such an object under "policy".
Policy policy_from_json(json doc, const Scenario& s, const Args& a, std::size_t cap) {
  if (doc.is_object() && doc.contains("policy")) doc = doc["policy"];
  json caches = doc;
  Family family = a.family.empty() ? Family::chunk : family_from_string(a.family);
  std::optional<Partition> part = partition_from(a, s);
  if (doc.is_object()) {
    if (!doc.contains("caches")) throw ValidationError("policy document needs \"caches\"");
    caches = doc["caches"];
    if (doc.contains("family")) family = family_from_string(doc["family"].get<std::string>());
    if (doc.contains("partition")) part = Partition(doc["partition"].get<std::vector<int>>());
  }
  if (!caches.is_array()) throw ValidationError("policy caches must be an array");
  if (static_cast<int>(caches.size()) != s.num_caches())
    throw ValidationError("policy lists " + std::to_string(caches.size()) + " caches, scenario has " +
                          std::to_string(s.num_caches()));
  auto set = std::make_shared<const PlacementSet>(
      enumerate_placements(s, family, family == Family::subset ? part : std::nullopt, cap));
  std::vector<std::vector<PolicyEntry>> per_cache;
  for (const auto& list : caches) {
    if (!list.is_array()) throw ValidationError("each cache entry must be a list");
    std::vector<PolicyEntry> entries;
    for (const auto& e : list) {
      if (!e.contains("placement_index") || !e.contains("prob"))
        throw ValidationError("policy entries need placement_index and prob");
      entries.push_back({e["placement_index"].get<std::size_t>(), e["prob"].get<double>()});
    }
    per_cache.push_back(std::move(entries));
  }
  return Policy(std::move(set), std::move(per_cache));
}

json report_to_json(const EvaluationReport& r) {
  return {{"omega", r.omega},
          {"psi", r.psi},
          {"hit_ratio", r.hit_ratio},
          {"average_hit_ratio", r.average_hit_ratio}};
}

Table decision_table(const AdversaryDecision& d) {
  Table t;
  t.header = {"y", "k_hat", "i_hat", "score"};
  for (const auto& e : d.entries) t.add({std::to_string(e.y), std::to_string(e.cache), std::to_string(e.file), cell(e.score)});
  return t;
}

std::string join_files(const std::vector<int>& files) {
  std::string s;
  for (std::size_t j = 0; j < files.size(); ++j) s += (j ? " " : "") + std::to_string(files[j]);
  return s;
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

int cmd_enumerate(Run& run, const Args& a) {
  const Scenario& s = run.scenario();
  Family family = a.family.empty() ? Family::chunk : family_from_string(a.family);
  auto part = partition_from(a, s);
  BigCount count = count_placements(s, family, part);
  detail::check_cap(count, run.globals().cap, family);
  run.note(std::string(to_string(family)) + " placements: " + count.str());
  if (!a.list) {
    run.emit(count.str() + "\n");
    return kOk;
  }
  auto set = enumerate_placements(s, family, part, run.globals().cap);
  Table t;
  t.header = {"index"};
  for (int i = 1; i <= set.width(); ++i) t.header.push_back("z_" + std::to_string(i));
  for (std::size_t j = 0; j < set.size(); ++j) {
    std::vector<std::string> row = {std::to_string(j)};
    for (int z : set[j]) row.push_back(std::to_string(z));
    t.add(std::move(row));
  }
  run.emit(to_csv(t));
  return kOk;
}

int cmd_evaluate(Run& run, const Args& a) {
  const Scenario& s = run.scenario();
  if (a.policy_path.empty()) throw ValidationError("evaluate requires --policy");
  Policy pol = policy_from_json(read_json(a.policy_path), s, a, run.globals().cap);
  auto rep = evaluate(s, pol);
  json j = report_to_json(rep);
  if (run.globals().out.empty()) {
    json table = json::array();
    for (const auto& e : rep.decision.entries)
      table.push_back({{"y", e.y}, {"k_hat", e.cache}, {"i_hat", e.file}, {"score", e.score}});
    j["decision"] = table;
  }
  run.emit(j.dump(2) + "\n");
  run.emit_sibling(".decision.csv", to_csv(decision_table(rep.decision)));
  return kOk;
}

int cmd_optimize(Run& run, const Args& a) {
  const Scenario& s = run.scenario();
  Method m = method_from_string(a.method);
  Targets t{parse_single(a.zeta, "zeta"), parse_optional(a.beta, "beta")};
  OptimizeOptions o = optimize_options(a, run.globals(), s, m);
  if (!a.fill_order.empty()) {
    if (a.fill_order == "popularity") o.fill_order = dpc::popularity_order(s.popularity());
    else if (a.fill_order != "ascending") throw ValidationError("--fill-order must be ascending or popularity");
  }
  if (!a.lp_path.empty()) {
    auto set = detail::placements_for(s, m, o);
    o.placements = set;
    auto lp = m == Method::jpc ? build_jpc_lp(s, *set, t) : m == Method::spc ? build_spc_lp(s, *set, t) : build_dpc_lp(s, t);
    std::ostringstream os;
    lp::write_lp_text(lp, os);
    run.write(a.lp_path, os.str());
  }
  auto out = optimize(s, m, t, o);
  json j;
  j["method"] = to_string(m);
  j["status"] = lp::to_string(out.status);
  j["zeta"] = t.zeta;
  if (t.beta) j["beta"] = *t.beta;
  j["num_vars"] = out.num_vars;
  j["num_rows"] = out.num_rows;
  j["iterations"] = out.iterations;
  if (out.optimal()) {
    j["omega_star"] = out.omega_star;
    j["verification"] = report_to_json(*out.verification);
    j["gamma"] = out.gamma;
    if (!out.alpha.empty()) j["alpha"] = out.alpha;
    if (!out.top_placement_mass.empty()) j["top_placement_mass"] = out.top_placement_mass;
    j["policy"] = policy_to_json(*out.policy);
  }
  run.emit(j.dump(2) + "\n");
  run.note(std::string("status: ") + lp::to_string(out.status) +
           (out.optimal() ? ", omega* = " + format_number(out.omega_star) : ""));
  return out.optimal() ? kOk : kInfeasible;
}

int cmd_sweep(Run& run, const Args& a) {
  const Scenario& s = run.scenario();
  Method m = method_from_string(a.method);
  auto grid = parse_grid(a.zeta, "zeta");
  auto pts = sweep_privacy(s, m, grid, optimize_options(a, run.globals(), s, m), parse_optional(a.beta, "beta"));
  Table t;
  t.header = {"method", "zeta", "status", "omega_star", "psi_verified", "hit_ratio",
              "n_vars", "n_rows", "solve_iterations", "solve_ms"};
  for (const auto& p : pts) {
    const bool ok = p.status == lp::Status::optimal;
    t.add({to_string(m), cell(p.zeta), lp::to_string(p.status), ok ? cell(p.omega_star) : "",
           ok ? cell(p.psi_verified) : "", ok ? cell(p.hit_ratio) : "", std::to_string(p.num_vars),
           std::to_string(p.num_rows), std::to_string(p.iterations), cell(p.solve_ms)});
  }
  run.emit(to_csv(t));
  return kOk;
}

int cmd_cmin(Run& run, const Args& a) {
  const Scenario& s = run.scenario();
  Method m = method_from_string(a.method);
  const double zeta = parse_single(a.zeta, "zeta");
  auto betas = parse_grid(a.beta, "beta");
  OptimizeOptions o = optimize_options(a, run.globals(), s, m);
  std::vector<std::pair<double, CminResult>> results(betas.size());
  parallel_for(betas.size(), [&](std::size_t j) {
    results[j] = {betas[j], min_feasible_chunks(s, m, {zeta, betas[j]}, a.c_max, o)};
  });
  run.emit(to_csv(recipes::cmin_table(results)));
  int code = kOk;
  for (const auto& [beta, r] : results) {
    if (r.cap_exceeded) {
      std::cerr << "beta " << format_number(beta) << ": " << r.cap_message << '\n';
      code = kCapExceeded;
    }
  }
  return code;
}

dpc::FillOrder parse_fill_order(const json& spec, const Scenario& s, int n) {
  if (spec.is_array()) return spec.get<dpc::FillOrder>();
  const std::string name = spec.get<std::string>();
  if (name == "ascending") return dpc::ascending_order(n);
  if (name == "popularity") {
    if (s.num_files() != n) throw ValidationError("popularity fill order needs a scenario with N = " + std::to_string(n));
    return dpc::popularity_order(s.popularity());
  }
  // Comma-separated permutation.
  dpc::FillOrder order;
  std::stringstream ss(name);
  std::string item;
  while (std::getline(ss, item, ',')) order.push_back(std::stoi(item));
  return order;
}

int cmd_dpc_sample(Run& run, const Args& a) {
  if (a.alpha_path.empty()) throw ValidationError("dpc-sample requires --alpha");
  json doc = read_json(a.alpha_path);
  json order_spec = "ascending";
  if (doc.is_object()) {
    if (doc.contains("fill_order")) order_spec = doc["fill_order"];
    doc = doc.at("alpha");
  }
  if (!a.fill_order.empty()) order_spec = a.fill_order;
  auto alpha = doc.get<dpc::AlphaVector>();
  const int n = static_cast<int>(alpha.size());
  auto layout = dpc::build_layout(alpha, parse_fill_order(order_spec, run.scenario(), n));
  Table dist;
  dist.header = {"placement", "probability"};
  for (const auto& [files, p] : dpc::layout_to_distribution(layout)) dist.add({join_files(files), cell(p)});
  run.emit(to_csv(dist));
  if (a.samples > 0) {
    Table t;
    t.header = {"sample", "u", "placement"};
    for (int r = 0; r < a.samples; ++r) {
      CounterRng rng(run.globals().seed, static_cast<std::uint64_t>(r));
      const double u = rng.uniform();
      t.add({std::to_string(r), cell(u), join_files(dpc::sample_placement(layout, u))});
    }
    if (run.globals().out.empty()) {
      std::cout << to_csv(t);
    } else {
      run.emit_sibling(".samples.csv", to_csv(t));
    }
  }
  return kOk;
}

int cmd_rda(Run& run, const Args& a) {
  const Scenario& s = run.scenario();
  Table t;
  t.header = {"zeta", "s", "omega", "psi"};
  for (double z : parse_grid(a.zeta, "zeta")) {
    auto cfg = rda_for_target(s, z);
    t.add({cell(z), cell(cfg.s), cell(rda_cost(s, cfg)), cell(rda_privacy(s, cfg))});
  }
  run.emit(to_csv(t));
  return kOk;
}

json sim_to_json(const SimReport& r, const std::vector<double>& analytic, double omega, double psi) {
  return {{"num_requests", r.num_requests},
          {"omega", r.omega},
          {"omega_se", r.omega_se},
          {"psi", r.psi},
          {"psi_se", r.psi_se},
          {"analytic_omega", omega},
          {"analytic_psi", psi},
          {"histogram", r.histogram},
          {"correct_by_y", r.correct_by_y},
          {"analytic_y_distribution", analytic}};
}

int cmd_simulate(Run& run, const Args& a) {
  const Scenario& s = run.scenario();
  SimConfig cfg{a.requests, run.globals().seed, !a.held};
  SimReport rep;
  std::vector<double> analytic;
  double omega = 0.0, psi = 0.0;
  const int sources = (a.policy_path.empty() ? 0 : 1) + (a.rda_s >= 0.0 ? 1 : 0) + (a.zeta.empty() ? 0 : 1);
  if (sources != 1) throw ValidationError("simulate needs exactly one of --policy, --rda, --zeta");
  if (a.rda_s >= 0.0) {
    RdaConfig rda{a.rda_s};
    auto ev = rda_evaluate(s, rda);
    rep = simulate(s, rda, ev.decision, cfg);
    analytic = analytic_y_distribution(s, rda);
    omega = ev.omega;
    psi = ev.psi;
  } else {
    std::optional<Policy> pol;
    if (!a.policy_path.empty()) {
      pol = policy_from_json(read_json(a.policy_path), s, a, run.globals().cap);
    } else {
      Method m = method_from_string(a.method);
      auto out = optimize(s, m, {parse_single(a.zeta, "zeta"), parse_optional(a.beta, "beta")},
                          optimize_options(a, run.globals(), s, m));
      if (!out.optimal()) {
        std::cerr << "optimization " << lp::to_string(out.status) << '\n';
        return kInfeasible;
      }
      pol = *out.policy;
    }
    auto ev = evaluate(s, *pol);
    rep = simulate(s, *pol, ev.decision, cfg);
    analytic = analytic_y_distribution(s, *pol);
    omega = ev.omega;
    psi = ev.psi;
  }
  run.emit(sim_to_json(rep, analytic, omega, psi).dump(2) + "\n");
  Table h;
  h.header = {"y", "count", "analytic_prob"};
  for (std::size_t y = 0; y < rep.histogram.size(); ++y)
    h.add({std::to_string(y), std::to_string(rep.histogram[y]), cell(analytic[y])});
  run.emit_sibling(".histogram.csv", to_csv(h));
  run.note("omega " + format_number(rep.omega) + " +- " + format_number(rep.omega_se) + " (analytic " +
           format_number(omega) + "), psi " + format_number(rep.psi) + " +- " + format_number(rep.psi_se) +
           " (analytic " + format_number(psi) + ")");
  return kOk;
}

int cmd_bounds(Run& run, const Args& a) {
  const Scenario& s = run.scenario();
  auto b = privacy_bounds(s);
  json j = {{"psi_min", b.psi_min}, {"psi_max", b.psi_max}};
  if (auto part = partition_from(a, s)) {
    auto sb = spc_privacy_bounds(s, *part);
    j["spc"] = {{"psi_min", sb.psi_min},
                {"psi_max", sb.psi_max},
                {"boundary_subset", sb.boundary_subset},
                {"boundary_chunks", sb.boundary_chunks},
                {"exact_fill", sb.exact_fill}};
  }
  run.emit(j.dump(2) + "\n");
  return kOk;
}

int cmd_recipe(const Globals& g, const Args& a, const json& params) {
  if (a.list) {
    for (const auto& r : figure_recipes()) std::cout << r.name << "\t" << r.description << '\n';
    return kOk;
  }
  if (a.recipe.empty()) throw ValidationError("recipe: name required (or --list)");
  std::vector<Recipe> chosen;
  if (a.recipe == "all") {
    chosen = figure_recipes();
  } else {
    chosen.push_back(find_recipe(a.recipe));
  }
  if (a.points < 2) throw ValidationError("--points must be >= 2");
  RecipeContext ctx{g.seed, g.cap, a.points, a.requests};
  const fs::path dir = g.out.empty() ? fs::path(".") : fs::path(g.out);
  for (const auto& r : chosen) {
    Globals rg = g;
    rg.out = (dir / (r.name + ".csv")).string();
    Run run("recipe " + r.name, rg, std::nullopt, "built-in: " + r.description);
    for (const auto& o : r.run(ctx)) run.write(dir / (o.name + ".csv"), to_csv(o.table));
    run.finish(params, dir / (r.name + ".manifest.json"));
    run.note(r.name + ": done");
  }
  return kOk;
}

json collect_params(const CLI::App& app) {
  json p = json::object();
  auto add = [&](const CLI::App& a) {
    for (const CLI::Option* opt : a.get_options()) {
      if (opt->count() == 0 || opt->get_name() == "--help") continue;
      const auto& res = opt->results();
      std::string key = opt->get_single_name();
      if (key.empty()) key = opt->get_name();
      if (res.size() == 1) {
        p[key] = res[0];
      } else {
        p[key] = res;
      }
    }
  };
  add(app);
  for (const CLI::App* sub : app.get_subcommands()) add(*sub);
  return p;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Privacy-preserving probabilistic cache placement toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Globals g;
  Args a;
  auto add_globals = [&](CLI::App* sub) {
    sub->add_option("--scenario", g.scenario_path, "Scenario JSON (default: built-in N=5 scenario)");
    sub->add_option("--out", g.out, "Output file (directory for recipe)");
    sub->add_option("--seed", g.seed, "Random seed");
    sub->add_option("--cap", g.cap, "Enumeration cap")->check(CLI::PositiveNumber);
    sub->add_flag("--quiet", g.quiet, "Suppress progress messages");
  };
  add_globals(&app);

  auto family = [&](CLI::App* sub) {
    sub->add_option("--family", a.family, "Placement family")->check(CLI::IsMember({"chunk", "file", "subset"}));
    sub->add_option("--subsets", a.subsets, "Number of equal subsets L");
    sub->add_option("--partition", a.partition, "Subset sizes, comma separated")->delimiter(',');
  };
  auto method = [&](CLI::App* sub) {
    sub->add_option("--method", a.method, "jpc, dpc or spc")->check(CLI::IsMember({"jpc", "dpc", "spc"}));
  };

  std::map<std::string, CLI::App*> subs;
  auto sub = [&](const std::string& name, const std::string& help) {
    CLI::App* s = app.add_subcommand(name, help);
    add_globals(s);
    subs[name] = s;
    return s;
  };

  auto* enumerate = sub("enumerate", "Count or list a placement family");
  family(enumerate);
  enumerate->add_flag("--list", a.list, "Write the placements as CSV");

  auto* evaluate_cmd = sub("evaluate", "Evaluate a policy: cost, privacy, hit ratio, MAP table");
  family(evaluate_cmd);
  evaluate_cmd->add_option("--policy", a.policy_path, "Policy JSON")->required();

  auto* optimize_cmd = sub("optimize", "Solve one privacy-constrained program");
  method(optimize_cmd);
  family(optimize_cmd);
  optimize_cmd->add_option("--zeta", a.zeta, "Privacy threshold")->required();
  optimize_cmd->add_option("--beta", a.beta, "Average hit-ratio threshold");
  optimize_cmd->add_option("--fill-order", a.fill_order, "DPC fill order: ascending or popularity");
  optimize_cmd->add_option("--lp", a.lp_path, "Also write the program in LP text form");

  auto* sweep = sub("sweep", "Optimal cost over a privacy grid");
  method(sweep);
  family(sweep);
  sweep->add_option("--zeta", a.zeta, "START:STOP:STEP or a single value")->required();
  sweep->add_option("--beta", a.beta, "Average hit-ratio threshold");

  auto* cmin = sub("cmin", "Smallest chunk count meeting a hit-ratio target");
  method(cmin);
  family(cmin);
  cmin->add_option("--zeta", a.zeta, "Privacy threshold")->required();
  cmin->add_option("--beta", a.beta, "START:STOP:STEP or a single value")->required();
  cmin->add_option("--c-max", a.c_max, "Largest chunk count tried")->check(CLI::PositiveNumber);

  auto* dpc_sample = sub("dpc-sample", "Placement distribution of a DPC vector");
  dpc_sample->add_option("--alpha", a.alpha_path, "Alpha JSON")->required();
  dpc_sample->add_option("--fill-order", a.fill_order, "ascending, popularity or a permutation");
  dpc_sample->add_option("--samples", a.samples, "Number of sampled placements")->check(CLI::NonNegativeNumber);

  auto* rda = sub("rda", "Random dummy baseline over a privacy grid");
  rda->add_option("--zeta", a.zeta, "START:STOP:STEP or a single value")->required();

  auto* sim = sub("simulate", "Monte Carlo replay of a policy or the dummy baseline");
  method(sim);
  family(sim);
  sim->add_option("--policy", a.policy_path, "Policy JSON");
  sim->add_option("--rda", a.rda_s, "Dummy probability s")->check(CLI::Range(0.0, 1.0));
  sim->add_option("--zeta", a.zeta, "Optimize at this privacy threshold, then simulate");
  sim->add_option("--beta", a.beta, "Average hit-ratio threshold");
  sim->add_option("--requests", a.requests, "Number of requests")->check(CLI::PositiveNumber);
  sim->add_flag("--held", a.held, "Draw placements once and hold them");

  auto* bounds = sub("bounds", "Achievable privacy range");
  family(bounds);

  auto* recipe = sub("recipe", "Regenerate a figure's CSV data");
  recipe->add_option("name", a.recipe, "Recipe name or 'all'");
  recipe->add_flag("--list", a.list, "List recipes");
  recipe->add_option("--points", a.points, "Privacy grid points");
  recipe->add_option("--requests", a.requests, "Simulated requests per point")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  const json params = collect_params(app);
  try {
    if (subs["recipe"]->parsed()) return cmd_recipe(g, a, params);
    Scenario scenario = g.scenario_path.empty() ? default_scenario() : load_scenario(read_file(g.scenario_path));
    std::string name = app.get_subcommands().front()->get_name();
    Run run(name, g, scenario);
    int code = kOk;
    if (name == "enumerate") code = cmd_enumerate(run, a);
    else if (name == "evaluate") code = cmd_evaluate(run, a);
    else if (name == "optimize") code = cmd_optimize(run, a);
    else if (name == "sweep") code = cmd_sweep(run, a);
    else if (name == "cmin") code = cmd_cmin(run, a);
    else if (name == "dpc-sample") code = cmd_dpc_sample(run, a);
    else if (name == "rda") code = cmd_rda(run, a);
    else if (name == "simulate") code = cmd_simulate(run, a);
    else if (name == "bounds") code = cmd_bounds(run, a);
    if (!g.out.empty()) run.finish(params, run.default_manifest());
    return code;
  } catch (const CapExceededError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kCapExceeded;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}
