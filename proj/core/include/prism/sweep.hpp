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

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "prism/workload.hpp"

namespace prism {

struct SweepRow {
  std::string value;
  std::size_t runs = 0;
  double mct_fraction_mean = 0.0;
  double mct_integral_mean = 0.0;
  double migrated_per_update_mean = 0.0;
  std::size_t max_rounds = 0;
  double second_round_mean = 0.0;
  double update_ms_mean = 0.0;
  std::uint64_t pcc_violations = 0;
  std::uint64_t broken_by_collision = 0;
  std::size_t failed_runs = 0;
};

struct SweepOptions {
  std::size_t seeds = 1;    // runs per value with seeds base, base+1, ...
  std::size_t threads = 1;  // 0 uses the hardware concurrency
};

// Parameter names: rho, update_rate, lifetime_mean, signature_hash_bits,
// policy, or any scenario key. Throws Error(kConfigError) on a bad value.
std::vector<SweepRow> sweep(const Scenario& base, const std::string& parameter,
                            const std::vector<std::string>& values, const SweepOptions& options);

std::string sweep_csv(const std::string& parameter, const std::vector<SweepRow>& rows);

}  // namespace prism
