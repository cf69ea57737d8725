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

#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cacheveil/optimizer.hpp"
#include "cacheveil/scenario.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = CACHEVEIL_CLI_PATH;
const std::string kScenarios = CACHEVEIL_SCENARIO_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string l; std::getline(ss, l);) out.push_back(l);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string c; std::getline(ss, c, ',');) out.push_back(c);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("cacheveil_cli_" + std::to_string(::getpid()) + "_" + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  // Runs the CLI in the scratch directory; stdout and stderr are captured.
  int run(const std::string& args, const std::string& env = "") {
    std::string cmd = "cd '" + dir_.string() + "' && " + env + " '" + kCli + "' " + args + " >stdout.txt 2>stderr.txt";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string out() const { return slurp(dir_ / "stdout.txt"); }
  std::string err() const { return slurp(dir_ / "stderr.txt"); }
  fs::path path(const std::string& name) const { return dir_ / name; }
  static std::string scenario(const std::string& name) { return kScenarios + "/" + name; }

  fs::path dir_;
};

TEST_F(CliTest, SweepExampleWritesCsvAndManifest) {
  ASSERT_EQ(run("sweep --scenario " + scenario("default.json") + " --method dpc --zeta 0.56:0.65:0.01 --out fig3.csv"), 0)
      << err();
  auto rows = lines(slurp(path("fig3.csv")));
  ASSERT_EQ(rows.size(), 11u);
  EXPECT_EQ(rows[0], "method,zeta,status,omega_star,psi_verified,hit_ratio,n_vars,n_rows,solve_iterations,solve_ms");

  // Oracle: the library's own solve at the same points.
  auto s = cacheveil::default_scenario();
  for (std::size_t j = 1; j < rows.size(); ++j) {
    auto cells = split(rows[j]);
    ASSERT_EQ(cells.size(), 10u);
    EXPECT_EQ(cells[0], "dpc");
    EXPECT_EQ(cells[2], "optimal");
    const double zeta = std::stod(cells[1]);
    EXPECT_NEAR(zeta, 0.56 + 0.01 * static_cast<double>(j - 1), 1e-9);
    auto o = cacheveil::optimize(s, cacheveil::Method::dpc, {zeta, std::nullopt});
    EXPECT_NEAR(std::stod(cells[3]), o.omega_star, 1e-9);
    EXPECT_GE(std::stod(cells[4]), zeta - 1e-6);
  }
  EXPECT_NEAR(std::stod(split(rows[1])[3]), 0.32, 1e-9);

  auto m = json::parse(slurp(path("fig3.manifest.json")));
  EXPECT_EQ(m["subcommand"], "sweep");
  EXPECT_EQ(m["version"], cacheveil::kVersion);
  EXPECT_EQ(m["outputs"], json::array({"fig3.csv"}));
  EXPECT_EQ(m["params"]["zeta"], "0.56:0.65:0.01");
  EXPECT_TRUE(m.contains("timestamp"));
  EXPECT_EQ(m["scenario_digest"].get<std::string>().rfind("fnv1a64:", 0), 0u);
}

TEST_F(CliTest, InfeasibleOptimizeExitsThree) {
  EXPECT_EQ(run("optimize --method jpc --zeta 0.7 --scenario " + scenario("default.json") + " --out opt.json"), 3);
  auto j = json::parse(slurp(path("opt.json")));
  EXPECT_EQ(j["status"], "infeasible");
  EXPECT_FALSE(j.contains("policy"));
  EXPECT_TRUE(fs::exists(path("opt.manifest.json")));
}

TEST_F(CliTest, EnumerationBeyondCapExitsFour) {
  EXPECT_EQ(run("enumerate --family chunk --scenario " + scenario("big.json")), 4);
  EXPECT_NE(err().find("325328796"), std::string::npos) << err();
  EXPECT_EQ(run("enumerate --family chunk --cap 7050 --scenario " + scenario("default.json")), 4);
  EXPECT_EQ(run("enumerate --family chunk --cap 7051 --scenario " + scenario("default.json")), 0);
  EXPECT_EQ(out(), "7051\n");
}

TEST_F(CliTest, EnumerateListsPlacements) {
  ASSERT_EQ(run("enumerate --family file --list --scenario " + scenario("default_c1.json") + " --out f.csv"), 0);
  auto rows = lines(slurp(path("f.csv")));
  ASSERT_EQ(rows.size(), 11u);
  EXPECT_EQ(rows[0], "index,z_1,z_2,z_3,z_4,z_5");
  EXPECT_EQ(rows[1], "0,0,0,0,1,1");
  EXPECT_EQ(rows[10], "9,1,1,0,0,0");
  ASSERT_EQ(run("enumerate --family subset --subsets 6 --scenario " + scenario("zipf12.json")), 0);
  EXPECT_EQ(out(), "50\n");
}

TEST_F(CliTest, RejectsUnknownFlagsAndBadInput) {
  EXPECT_EQ(run("sweep --method dpc --zeta 0.6 --bogus 1"), 2);
  EXPECT_EQ(run("sweep --method nope --zeta 0.6"), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("sweep --method dpc --zeta 0.6:0.5:0.01"), 2);
  EXPECT_EQ(run("sweep --method spc --zeta 0.6"), 2);
  std::ofstream(path("bad.json")) << R"({"num_files": 2, "num_caches": 1, "cache_capacity": 1,
    "chunks_per_file": 1, "popularity": [0.5, 0.5], "request_gen": [1.0], "extra": 1})";
  EXPECT_EQ(run("bounds --scenario bad.json"), 2);
  EXPECT_NE(err().find("extra"), std::string::npos);
  EXPECT_EQ(run("bounds --scenario missing.json"), 2);
  EXPECT_EQ(run("--help"), 0);
}

TEST_F(CliTest, DigestDependsOnContentOnly) {
  std::ofstream(path("a.json")) << slurp(scenario("default.json"));
  std::ofstream(path("b.json"))
      << R"({"request_gen":[0.7,0.3],"popularity":[0.5,0.18,0.12,0.11,0.09],)"
      << R"("chunks_per_file":10,"cache_capacity":2,"num_caches":2,"num_files":5})";
  std::ofstream(path("c.json"))
      << R"({"request_gen":[0.6,0.4],"popularity":[0.5,0.18,0.12,0.11,0.09],)"
      << R"("chunks_per_file":10,"cache_capacity":2,"num_caches":2,"num_files":5})";
  ASSERT_EQ(run("bounds --scenario a.json --out a.out"), 0);
  ASSERT_EQ(run("bounds --scenario b.json --out b.out"), 0);
  ASSERT_EQ(run("bounds --scenario c.json --out c.out"), 0);
  auto digest = [&](const char* m) { return json::parse(slurp(path(m)))["scenario_digest"].get<std::string>(); };
  EXPECT_EQ(digest("a.manifest.json"), digest("b.manifest.json"));
  EXPECT_NE(digest("a.manifest.json"), digest("c.manifest.json"));
  auto bounds = json::parse(slurp(path("a.out")));
  EXPECT_NEAR(bounds["psi_min"].get<double>(), 0.566, 1e-12);
  EXPECT_NEAR(bounds["psi_max"].get<double>(), 0.65, 1e-12);
}

TEST_F(CliTest, OptimizeEvaluateRoundTrip) {
  ASSERT_EQ(run("optimize --method jpc --zeta 0.6 --scenario " + scenario("default.json") + " --out o.json --quiet"), 0)
      << err();
  auto o = json::parse(slurp(path("o.json")));
  EXPECT_EQ(o["status"], "optimal");
  ASSERT_EQ(run("evaluate --policy o.json --scenario " + scenario("default.json") + " --out ev.json"), 0) << err();
  auto ev = json::parse(slurp(path("ev.json")));
  EXPECT_NEAR(ev["omega"].get<double>(), o["omega_star"].get<double>(), 1e-9);
  EXPECT_NEAR(ev["psi"].get<double>(), 0.6, 1e-6);
  auto rows = lines(slurp(path("ev.decision.csv")));
  ASSERT_EQ(rows.size(), 12u);
  EXPECT_EQ(rows[0], "y,k_hat,i_hat,score");
  auto m = json::parse(slurp(path("ev.manifest.json")));
  EXPECT_EQ(m["outputs"].size(), 2u);

  // A policy for the wrong number of caches is a validation error.
  std::ofstream(path("p.json")) << R"([[{"placement_index": 0, "prob": 1.0}]])";
  EXPECT_EQ(run("evaluate --policy p.json --scenario " + scenario("default.json")), 2);
}

TEST_F(CliTest, SchemasOfTabularOutputs) {
  ASSERT_EQ(run("rda --zeta 0.566:0.65:0.042 --out r.csv"), 0);
  auto r = lines(slurp(path("r.csv")));
  ASSERT_EQ(r.size(), 4u);
  EXPECT_EQ(r[0], "zeta,s,omega,psi");
  EXPECT_EQ(r[1], "0.566,0,0.32,0.566");

  ASSERT_EQ(run("cmin --zeta 0.56 --beta 1 --c-max 4 --scenario " + scenario("default_c1.json") + " --out c.csv"), 0);
  auto c = lines(slurp(path("c.csv")));
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0], "beta,c_min,omega_star");
  EXPECT_EQ(split(c[1])[1], "3");

  ASSERT_EQ(run("simulate --rda 1 --requests 20000 --out s.json"), 0);
  auto h = lines(slurp(path("s.histogram.csv")));
  EXPECT_EQ(h[0], "y,count,analytic_prob");
  EXPECT_EQ(h.back(), "10,20000,1");
  EXPECT_DOUBLE_EQ(json::parse(slurp(path("s.json")))["omega"].get<double>(), 1.0);

  std::ofstream(path("alpha.json")) << R"({"alpha": [0.9, 0.6, 0.3, 0.1, 0.1]})";
  ASSERT_EQ(run("dpc-sample --alpha alpha.json --samples 4 --out d.csv"), 0);
  auto d = lines(slurp(path("d.csv")));
  EXPECT_EQ(d[0], "placement,probability");
  EXPECT_EQ(d[1], "0 1,0.5");
  auto ds = lines(slurp(path("d.samples.csv")));
  EXPECT_EQ(ds.size(), 5u);
  EXPECT_EQ(ds[0], "sample,u,placement");
}

TEST_F(CliTest, SimulateIsReproducibleAcrossThreadCounts) {
  const std::string args = "simulate --method jpc --zeta 0.6 --requests 30000 --seed 7 --quiet --out ";
  ASSERT_EQ(run(args + "a.json", "CACHEVEIL_THREADS=1"), 0) << err();
  ASSERT_EQ(run(args + "b.json", "CACHEVEIL_THREADS=5"), 0) << err();
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
  EXPECT_EQ(slurp(path("a.histogram.csv")), slurp(path("b.histogram.csv")));
}

TEST_F(CliTest, RecipesAreByteIdenticalAcrossRuns) {
  ASSERT_EQ(run("recipe --list"), 0);
  for (const char* name : {"fig3", "fig4", "fig5", "fig6", "fig7", "fig8"})
    EXPECT_NE(out().find(name), std::string::npos) << name;

  ASSERT_EQ(run("recipe all --quiet --requests 20000 --out one", "CACHEVEIL_THREADS=1"), 0) << err();
  ASSERT_EQ(run("recipe all --quiet --requests 20000 --out two", "CACHEVEIL_THREADS=4"), 0) << err();
  int csvs = 0;
  for (const auto& e : fs::directory_iterator(path("one"))) {
    if (e.path().extension() != ".csv") continue;
    ++csvs;
    const auto other = path("two") / e.path().filename();
    ASSERT_TRUE(fs::exists(other)) << other;
    EXPECT_EQ(slurp(e.path()), slurp(other)) << e.path().filename();
    auto rows = lines(slurp(e.path()));
    ASSERT_GE(rows.size(), 2u);
    const auto width = split(rows[0]).size();
    for (const auto& row : rows) EXPECT_EQ(split(row).size(), width) << e.path().filename() << ": " << row;
  }
  EXPECT_EQ(csvs, 6);
  EXPECT_TRUE(fs::exists(path("one/fig5_reduced_scale.csv")));
  EXPECT_NE(slurp(path("one/fig5_reduced_scale.csv")).find("reduced-scale"), std::string::npos);
  auto m = json::parse(slurp(path("one/fig6.manifest.json")));
  EXPECT_EQ(m["outputs"], json::array({"one/fig6.csv"}));
}

TEST_F(CliTest, UnknownRecipeIsRejected) {
  EXPECT_EQ(run("recipe fig99"), 2);
  EXPECT_EQ(run("recipe"), 2);
}

}  // namespace
