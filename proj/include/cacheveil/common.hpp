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
#include <cstddef>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>

namespace cacheveil {

inline constexpr const char* kVersion = "0.3.0";

// Error hierarchy. The CLI maps each class onto a distinct exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input violates a documented invariant (bad probabilities, bad indices...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A placement family is larger than the configured enumeration cap.
class CapExceededError : public Error {
 public:
  CapExceededError(const std::string& what, std::string count)
      : Error(what), count_(std::move(count)) {}
  const std::string& count() const { return count_; }

 private:
  std::string count_;
};

// A solver result failed independent re-verification.
class InternalError : public Error {
 public:
  using Error::Error;
};

inline constexpr double kProbTolerance = 1e-9;

// Worker count for parallel sweeps and simulation. CACHEVEIL_THREADS bounds it.
inline std::size_t worker_count() {
  std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CACHEVEIL_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return static_cast<std::size_t>(v);
  }
  return hw;
}

}  // namespace cacheveil
