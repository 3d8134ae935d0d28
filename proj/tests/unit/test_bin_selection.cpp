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
#include <limits>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "prism/error.hpp"

namespace prism {
namespace {

std::vector<BinIndex> pick(const std::vector<CandidateBin>& c, std::size_t n, const char* policy,
                           std::optional<double> t) {
  std::mt19937_64 rng(1);
  return select_bins(c, n, BinSelectionPolicy::parse(policy), t, rng);
}

TEST(BinSelection, ParseNames) {
  EXPECT_EQ(BinSelectionPolicy::parse("random").kind, PolicyKind::kRandom);
  EXPECT_EQ(BinSelectionPolicy::parse("least_populated").kind, PolicyKind::kLeastPopulated);
  EXPECT_EQ(BinSelectionPolicy::parse("expected_load").kind, PolicyKind::kExpectedLoad);
  EXPECT_EQ(BinSelectionPolicy::parse("life_expectancy").kind, PolicyKind::kLifeExpectancy);
  const auto b = BinSelectionPolicy::parse("blended:0.25");
  EXPECT_EQ(b.kind, PolicyKind::kBlended);
  EXPECT_DOUBLE_EQ(b.alpha, 0.25);
  EXPECT_THROW(BinSelectionPolicy::parse("blended:2"), Error);
  EXPECT_THROW(BinSelectionPolicy::parse("fastest"), Error);
  EXPECT_EQ(BinSelectionPolicy::parse("least_populated").name(), "least_populated");
}

TEST(BinSelection, LeastPopulatedTakesSmallestBins) {
  const std::vector<CandidateBin> c{{0, {1, 1, 1}}, {1, {1}}, {2, {1, 1}}, {3, {}}};
  EXPECT_EQ(pick(c, 2, "least_populated", 10.0), (std::vector<BinIndex>{3, 1}));
}

TEST(BinSelection, TiesGoToLowestBin) {
  const std::vector<CandidateBin> c{{7, {1}}, {2, {1}}, {5, {1}}};
  EXPECT_EQ(pick(c, 2, "least_populated", std::nullopt), (std::vector<BinIndex>{2, 5}));
}

TEST(BinSelection, ExpectedLoadPrefersOldConnections) {
  // T = 10: bin 1 holds two connections with 2 s left each (load 4),
  // bin 2 holds one fresh connection with 5 s left (load 5).
  const std::vector<CandidateBin> c{{1, {8, 8}}, {2, {5}}};
  EXPECT_EQ(pick(c, 1, "expected_load", 10.0), (std::vector<BinIndex>{1}));
  EXPECT_EQ(pick(c, 1, "least_populated", 10.0), (std::vector<BinIndex>{2}));
}

TEST(BinSelection, WeightsPerPolicy) {
  const CandidateBin c{0, {2, 12}};
  EXPECT_DOUBLE_EQ(bin_weight(c, BinSelectionPolicy::parse("least_populated"), 10.0), 2.0);
  EXPECT_DOUBLE_EQ(bin_weight(c, BinSelectionPolicy::parse("expected_load"), 10.0), 6.0);
  EXPECT_DOUBLE_EQ(bin_weight(c, BinSelectionPolicy::parse("life_expectancy"), 10.0), 8.0);
  EXPECT_DOUBLE_EQ(bin_weight(c, BinSelectionPolicy::parse("blended:0.5"), 10.0), 5.0);
  // Without a lifetime estimate every weighted policy falls back to |bin|.
  EXPECT_DOUBLE_EQ(bin_weight(c, BinSelectionPolicy::parse("expected_load"), std::nullopt),
                   2.0);
}

TEST(BinSelection, InsufficientBins) {
  const std::vector<CandidateBin> c{{0, {}}};
  try {
    pick(c, 2, "least_populated", std::nullopt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientBins);
  }
}

TEST(BinSelection, RandomIsSeededAndDistinct) {
  std::vector<CandidateBin> c;
  for (BinIndex b = 0; b < 50; ++b) c.push_back({b, {}});
  const auto a = pick(c, 10, "random", std::nullopt);
  const auto b = pick(c, 10, "random", std::nullopt);
  EXPECT_EQ(a, b);
  EXPECT_EQ(std::set<BinIndex>(a.begin(), a.end()).size(), 10u);
}

TEST(BinSelection, RandomCoversAllBinsUniformly) {
  std::vector<CandidateBin> c;
  for (BinIndex b = 0; b < 8; ++b) c.push_back({b, {}});
  std::mt19937_64 rng(3);
  std::vector<int> hits(8);
  const int trials = 80'000;
  for (int i = 0; i < trials; ++i) {
    for (BinIndex b : select_bins(c, 2, BinSelectionPolicy::parse("random"), std::nullopt, rng)) {
      ++hits[b];
    }
  }
  for (int h : hits) EXPECT_NEAR(h, trials * 2 / 8, 600);
}

// The n-subset of least summed weight, by enumeration.
std::set<BinIndex> brute_force_best(const std::vector<double>& w, std::size_t n) {
  double best = std::numeric_limits<double>::infinity();
  std::uint32_t best_mask = 0;
  const std::size_t m = w.size();
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != n) continue;
    double sum = 0;
    for (std::size_t i = 0; i < m; ++i) {
      if (mask & (1u << i)) sum += w[i];
    }
    if (sum < best) {
      best = sum;
      best_mask = mask;
    }
  }
  std::set<BinIndex> out;
  for (std::size_t i = 0; i < m; ++i) {
    if (best_mask & (1u << i)) out.insert(static_cast<BinIndex>(i));
  }
  return out;
}

TEST(BinSelection, ExpectedLoadMatchesBruteForce) {
  std::mt19937_64 rng(21);
  const auto policy = BinSelectionPolicy::parse("expected_load");
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t m = 1 + rng() % 15;
    const std::size_t n = 1 + rng() % m;
    const double t = 5.0;
    std::vector<CandidateBin> c;
    std::vector<double> w;
    for (std::size_t i = 0; i < m; ++i) {
      CandidateBin bin{static_cast<BinIndex>(i), {}};
      const std::size_t k = 1 + rng() % 5;
      double expected = 0.0;  // sum of T - age, computed apart from bin_weight
      for (std::size_t j = 0; j < k; ++j) {
        const double age = static_cast<double>(rng() >> 11) * 0x1.0p-53 * 10.0;
        bin.ages_s.push_back(age);
        expected += t - age;
      }
      w.push_back(expected);
      c.push_back(bin);
    }
    const auto chosen = select_bins(c, n, policy, t, rng);
    EXPECT_EQ(std::set<BinIndex>(chosen.begin(), chosen.end()), brute_force_best(w, n)) << trial;
  }
}

}  // namespace
}  // namespace prism
