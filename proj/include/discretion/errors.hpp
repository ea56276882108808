// Copyright 2026 The Discretion Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <map>
#include <stdexcept>
#include <string>

namespace discretion {

// Malformed or inconsistent input data (bad files, dangling ids, invalid
// label values). Maps to exit code 1 in the CLI.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Remote endpoint failed after retries were exhausted. Exit code 2.
class EndpointError : public std::runtime_error {
 public:
  explicit EndpointError(const std::string& what) : std::runtime_error(what) {}
};

// Optimizer did not reach the requested gradient norm within the iteration
// budget. Carries the last iterate so callers can inspect it. Exit code 3.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what,
                   std::map<std::string, double> last_weights,
                   double gradient_norm, int iterations)
      : std::runtime_error(what),
        last_weights(std::move(last_weights)),
        gradient_norm(gradient_norm),
        iterations(iterations) {}

  std::map<std::string, double> last_weights;
  double gradient_norm = 0.0;
  int iterations = 0;
};

}  // namespace discretion
