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
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "prism/types.hpp"

namespace prism {

enum class PolicyKind { kRandom, kLeastPopulated, kExpectedLoad, kLifeExpectancy, kBlended };

struct BinSelectionPolicy {
  PolicyKind kind = PolicyKind::kExpectedLoad;
  double alpha = 0.5;  // Blended only

  // Accepts random, least_populated, expected_load, life_expectancy, blended
  // and blended:<alpha>.
  static BinSelectionPolicy parse(std::string_view name);
  std::string name() const;
};

// A candidate bin described by the ages (seconds since latest SYN) of the
// signatures that would have to be migrated with it.
struct CandidateBin {
  BinIndex bin = 0;
  std::vector<double> ages_s;
};

// Bin weight under `policy`. `mean_lifetime_s` is the VIP's expected
// connection duration T; without it every weighted policy uses |bin|.
double bin_weight(const CandidateBin& c, const BinSelectionPolicy& policy,
                  std::optional<double> mean_lifetime_s);

// The n candidates of least weight, ties by lowest bin index. Random draws
// uniformly from `rng`. Throws kInsufficientBins when n > candidates.
std::vector<BinIndex> select_bins(const std::vector<CandidateBin>& candidates, std::size_t n,
                                  const BinSelectionPolicy& policy,
                                  std::optional<double> mean_lifetime_s, std::mt19937_64& rng);

}  // namespace prism
