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
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cacheveil/common.hpp"
#include "json.hpp"

namespace cacheveil {

struct ZipfSpec {
  double alpha = 1.0;
  int n = 1;
};

// p_i = i^-alpha / sum_j j^-alpha, i = 1..n. alpha = 0 gives the uniform profile.
inline std::vector<double> zipf_popularity(const ZipfSpec& spec) {
  if (spec.n < 1) throw ValidationError("zipf: n must be >= 1");
  if (!(spec.alpha >= 0.0)) throw ValidationError("zipf: alpha must be >= 0");
  std::vector<double> p(static_cast<std::size_t>(spec.n));
  for (int i = 0; i < spec.n; ++i) p[i] = std::pow(static_cast<double>(i + 1), -spec.alpha);
  double total = 0.0;
  // Summing smallest-first keeps the normalization tight for large n.
  for (auto it = p.rbegin(); it != p.rend(); ++it) total += *it;
  for (double& v : p) v /= total;
  return p;
}

// Network instance: N files of C chunks each, K caches of M files.
//
// Files are held in descending popularity order (ties keep their original
// relative order); original_index() maps back to the caller's numbering.
// All indices in this library are 0-based. Values are immutable after
// construction.
class Scenario {
 public:
  Scenario(int num_files, int num_caches, int cache_capacity, int chunks_per_file,
           std::vector<double> popularity, std::vector<double> request_gen,
           std::optional<double> zipf_alpha = std::nullopt)
      : num_files_(num_files),
        num_caches_(num_caches),
        capacity_(cache_capacity),
        chunks_(chunks_per_file),
        popularity_(std::move(popularity)),
        request_gen_(std::move(request_gen)),
        zipf_alpha_(zipf_alpha) {
    validate_and_normalize();
  }

  int num_files() const { return num_files_; }
  int num_caches() const { return num_caches_; }
  int cache_capacity() const { return capacity_; }
  int chunks_per_file() const { return chunks_; }
  const std::vector<double>& popularity() const { return popularity_; }
  const std::vector<double>& request_gen() const { return request_gen_; }
  double popularity(int i) const { return popularity_.at(static_cast<std::size_t>(i)); }
  double request_gen(int k) const { return request_gen_.at(static_cast<std::size_t>(k)); }
  const std::vector<int>& original_index() const { return original_index_; }
  std::optional<double> zipf_alpha() const { return zipf_alpha_; }

  double max_request_gen() const {
    return *std::max_element(request_gen_.begin(), request_gen_.end());
  }

  // Same instance with a different chunk count.
  Scenario with_chunks(int c) const {
    Scenario s = *this;
    if (c < 1) throw ValidationError("chunks_per_file must be >= 1");
    s.chunks_ = c;
    return s;
  }

 private:
  static void check_distribution(std::vector<double>& v, const char* name) {
    for (double x : v) {
      if (!(x >= 0.0 && x <= 1.0)) {
        std::ostringstream os;
        os << name << " entry " << x << " outside [0,1]";
        throw ValidationError(os.str());
      }
    }
    double sum = std::accumulate(v.begin(), v.end(), 0.0);
    if (std::abs(sum - 1.0) > kProbTolerance) {
      std::ostringstream os;
      os.precision(12);
      os << name << " sum = " << sum;
      throw ValidationError(os.str());
    }
    for (double& x : v) x /= sum;
  }

  void validate_and_normalize() {
    if (num_files_ < 1) throw ValidationError("num_files must be >= 1");
    if (num_caches_ < 1) throw ValidationError("num_caches must be >= 1");
    if (chunks_ < 1) throw ValidationError("chunks_per_file must be >= 1");
    if (capacity_ < 1 || capacity_ >= num_files_)
      throw ValidationError("cache_capacity must satisfy 0 < M < N");
    if (static_cast<int>(popularity_.size()) != num_files_)
      throw ValidationError("popularity has " + std::to_string(popularity_.size()) +
                            " entries, expected num_files = " + std::to_string(num_files_));
    if (static_cast<int>(request_gen_.size()) != num_caches_)
      throw ValidationError("request_gen has " + std::to_string(request_gen_.size()) +
                            " entries, expected num_caches = " + std::to_string(num_caches_));
    check_distribution(popularity_, "popularity");
    check_distribution(request_gen_, "request_gen");

    original_index_.resize(popularity_.size());
    std::iota(original_index_.begin(), original_index_.end(), 0);
    std::stable_sort(original_index_.begin(), original_index_.end(),
                     [&](int a, int b) { return popularity_[a] > popularity_[b]; });
    std::vector<double> sorted(popularity_.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) sorted[i] = popularity_[original_index_[i]];
    popularity_ = std::move(sorted);
  }

  int num_files_;
  int num_caches_;
  int capacity_;
  int chunks_;
  std::vector<double> popularity_;
  std::vector<double> request_gen_;
  std::optional<double> zipf_alpha_;
  std::vector<int> original_index_;
};

// P(k, i) = p_i * p_g^(k).
inline double joint_request_prob(const Scenario& s, int k, int i) {
  if (k < 0 || k >= s.num_caches()) throw ValidationError("cache index out of range");
  if (i < 0 || i >= s.num_files()) throw ValidationError("file index out of range");
  return s.popularity(i) * s.request_gen(k);
}

// The N=5, K=2, M=2, C=10 instance used throughout the numerical study.
inline Scenario default_scenario(int chunks_per_file = 10) {
  return Scenario(5, 2, 2, chunks_per_file, {0.5, 0.18, 0.12, 0.11, 0.09}, {0.7, 0.3});
}

inline Scenario scenario_from_json(const nlohmann::json& doc) {
  static const std::vector<std::string_view> kKeys = {
      "num_files", "num_caches", "cache_capacity", "chunks_per_file",
      "popularity", "zipf", "request_gen"};
  if (!doc.is_object()) throw ValidationError("scenario document must be a JSON object");
  for (const auto& [key, _] : doc.items()) {
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end())
      throw ValidationError("unknown scenario key \"" + key + "\"");
  }
  auto get_int = [&](const char* key) {
    if (!doc.contains(key) || !doc[key].is_number_integer())
      throw ValidationError(std::string("scenario key \"") + key + "\" must be an integer");
    return doc[key].get<int>();
  };
  auto get_probs = [&](const char* key) {
    if (!doc[key].is_array()) throw ValidationError(std::string(key) + " must be an array");
    std::vector<double> v;
    for (const auto& x : doc[key]) {
      if (!x.is_number()) throw ValidationError(std::string(key) + " entries must be numbers");
      v.push_back(x.get<double>());
    }
    return v;
  };
  int n = get_int("num_files");
  int k = get_int("num_caches");
  int m = get_int("cache_capacity");
  int c = get_int("chunks_per_file");
  if (!doc.contains("request_gen")) throw ValidationError("missing request_gen");
  std::vector<double> pg = get_probs("request_gen");

  bool has_pop = doc.contains("popularity");
  bool has_zipf = doc.contains("zipf");
  if (has_pop == has_zipf)
    throw ValidationError("exactly one of \"popularity\" or \"zipf\" is required");
  if (has_pop) return Scenario(n, k, m, c, get_probs("popularity"), std::move(pg));

  const auto& z = doc["zipf"];
  if (!z.is_object()) throw ValidationError("zipf must be an object");
  for (const auto& [key, _] : z.items()) {
    if (key != "alpha") throw ValidationError("unknown zipf key \"" + key + "\"");
  }
  if (!z.contains("alpha") || !z["alpha"].is_number())
    throw ValidationError("zipf.alpha must be a number");
  double alpha = z["alpha"].get<double>();
  if (n < 1) throw ValidationError("num_files must be >= 1");
  return Scenario(n, k, m, c, zipf_popularity({alpha, n}), std::move(pg), alpha);
}

// Parses and validates a scenario document. Throws ValidationError.
inline Scenario load_scenario(std::string_view document) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(document);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("scenario parse error: ") + e.what());
  }
  return scenario_from_json(doc);
}

inline nlohmann::json scenario_to_json(const Scenario& s) {
  nlohmann::json j;
  j["num_files"] = s.num_files();
  j["num_caches"] = s.num_caches();
  j["cache_capacity"] = s.cache_capacity();
  j["chunks_per_file"] = s.chunks_per_file();
  if (s.zipf_alpha()) {
    j["zipf"] = {{"alpha", *s.zipf_alpha()}};
  } else {
    j["popularity"] = s.popularity();
  }
  j["request_gen"] = s.request_gen();
  return j;
}

}  // namespace cacheveil
