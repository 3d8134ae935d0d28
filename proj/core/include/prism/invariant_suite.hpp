// Copyright 2026 The Prism Lab Authors
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

#include <cstdint>
#include <string>
#include <vector>

#include "prism/workload.hpp"

namespace prism {

// A small randomized scenario: random pool sizes, update kinds and rates,
// policy and connection behaviour, with full-width signatures.
Scenario random_scenario(std::uint64_t seed);

struct InvariantCheck {
  std::uint64_t seed = 0;
  std::string policy;
  std::uint64_t connections = 0;
  std::uint64_t updates = 0;
  std::uint64_t pcc_violations = 0;
  std::uint64_t invariant_checks = 0;
  std::vector<std::string> failures;
  bool passed() const { return pcc_violations == 0 && failures.empty(); }
};

InvariantCheck check_scenario(const Scenario& s);

}  // namespace prism
