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

#include "prism/bin_selection.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>

#include <fmt/format.h>

#include "prism/error.hpp"

namespace prism {

BinSelectionPolicy BinSelectionPolicy::parse(std::string_view name) {
  BinSelectionPolicy p;
  if (name == "random") {
    p.kind = PolicyKind::kRandom;
  } else if (name == "least_populated") {
    p.kind = PolicyKind::kLeastPopulated;
  } else if (name == "expected_load") {
    p.kind = PolicyKind::kExpectedLoad;
  } else if (name == "life_expectancy") {
    p.kind = PolicyKind::kLifeExpectancy;
  } else if (name.substr(0, 7) == "blended") {
    p.kind = PolicyKind::kBlended;
    if (name.size() > 7) {
      if (name[7] != ':') throw Error(ErrorCode::kConfigError, "bad policy name");
      const std::string text(name.substr(8));
      try {
        std::size_t used = 0;
        p.alpha = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
      } catch (const std::exception&) {
        throw Error(ErrorCode::kConfigError, "bad blend alpha '" + text + "'");
      }
    }
    if (p.alpha < 0.0 || p.alpha > 1.0) {
      throw Error(ErrorCode::kConfigError, "blend alpha must be in [0, 1]");
    }
  } else {
    throw Error(ErrorCode::kConfigError, "unknown policy '" + std::string(name) + "'");
  }
  return p;
}

std::string BinSelectionPolicy::name() const {
  switch (kind) {
    case PolicyKind::kRandom: return "random";
    case PolicyKind::kLeastPopulated: return "least_populated";
    case PolicyKind::kExpectedLoad: return "expected_load";
    case PolicyKind::kLifeExpectancy: return "life_expectancy";
    case PolicyKind::kBlended: return fmt::format("blended:{}", alpha);
  }
  return "unknown";
}

double bin_weight(const CandidateBin& c, const BinSelectionPolicy& policy,
                  std::optional<double> mean_lifetime_s) {
  const auto size = static_cast<double>(c.ages_s.size());
  if (policy.kind == PolicyKind::kLeastPopulated || policy.kind == PolicyKind::kRandom ||
      !mean_lifetime_s) {
    return size;
  }
  const double t = *mean_lifetime_s;
  double expected = 0.0;
  double life = 0.0;
  for (double age : c.ages_s) {
    expected += t - age;
    life += std::max(0.0, t - age);
  }
  switch (policy.kind) {
    case PolicyKind::kExpectedLoad: return expected;
    case PolicyKind::kLifeExpectancy: return life;
    case PolicyKind::kBlended: return policy.alpha * life + (1.0 - policy.alpha) * size;
    default: return size;
  }
}

std::vector<BinIndex> select_bins(const std::vector<CandidateBin>& candidates, std::size_t n,
                                  const BinSelectionPolicy& policy,
                                  std::optional<double> mean_lifetime_s, std::mt19937_64& rng) {
  if (n > candidates.size()) {
    throw Error(ErrorCode::kInsufficientBins,
                fmt::format("need {} bins, only {} candidates", n, candidates.size()));
  }
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<BinIndex> out;
  out.reserve(n);
  if (policy.kind == PolicyKind::kRandom) {
    // Partial Fisher-Yates over candidates sorted by bin index.
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return candidates[a].bin < candidates[b].bin; });
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng() % (order.size() - i));
      std::swap(order[i], order[j]);
      out.push_back(candidates[order[i]].bin);
    }
    return out;
  }
  std::vector<double> w(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    w[i] = bin_weight(candidates[i], policy, mean_lifetime_s);
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (w[a] != w[b]) return w[a] < w[b];
    return candidates[a].bin < candidates[b].bin;
  });
  for (std::size_t i = 0; i < n; ++i) out.push_back(candidates[order[i]].bin);
  return out;
}

}  // namespace prism
