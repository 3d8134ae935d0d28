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

#include "prism/ecmp.hpp"

#include <algorithm>
#include <cstdlib>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "prism/error.hpp"

namespace prism {
namespace {

const DipId D1{1}, D2{2}, D3{3}, D4{4}, D5{5};

DipPool equal4() { return DipPool::equal({D1, D2, D3, D4}); }

DonorChooser lowest_first() {
  return [](DipId, const std::vector<BinIndex>& bins, std::size_t n) {
    return std::vector<BinIndex>(bins.begin(), bins.begin() + static_cast<std::ptrdiff_t>(n));
  };
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

// |bins(d) - weight(d) * length| <= 1 for every DIP.
void expect_weight_fidelity(const EcmpTable& t, const DipPool& pool) {
  const auto counts = t.counts();
  const Rational total = pool.total();
  for (const auto& [d, w] : pool.weights()) {
    const double ideal = (w / total).to_double() * static_cast<double>(t.size());
    const auto it = counts.find(d);
    const double have = it == counts.end() ? 0.0 : static_cast<double>(it->second);
    EXPECT_LE(std::abs(have - ideal), 1.0) << "DIP " << d.value;
  }
  for (const auto& [d, c] : counts) EXPECT_TRUE(pool.contains(d)) << d.value;
}

TEST(BuildTable, FourEqualDipsGetThirtyTwoEach) {
  const auto t = build_table(VipId{0}, equal4(), 128);
  ASSERT_EQ(t.size(), 128u);
  for (DipId d : {D1, D2, D3, D4}) EXPECT_EQ(t.counts().at(d), 32u);
}

TEST(BuildTable, ThirdsAndSixths) {
  DipPool pool;
  pool.set(D1, Rational(1, 3));
  pool.set(D2, Rational(1, 3));
  pool.set(D3, Rational(1, 6));
  pool.set(D4, Rational(1, 6));
  const auto t = build_table(VipId{0}, pool, 128);
  const auto c = t.counts();
  std::size_t sum = 0;
  for (const auto& [d, n] : c) sum += n;
  EXPECT_EQ(sum, 128u);
  EXPECT_TRUE(c.at(D1) == 42 || c.at(D1) == 43);
  EXPECT_TRUE(c.at(D2) == 42 || c.at(D2) == 43);
  EXPECT_TRUE(c.at(D3) == 21 || c.at(D3) == 22);
  EXPECT_TRUE(c.at(D4) == 21 || c.at(D4) == 22);
  expect_weight_fidelity(t, pool);
}

TEST(BuildTable, SingleDipFillsTable) {
  const auto t = build_table(VipId{0}, DipPool::equal({D1}), 8);
  EXPECT_EQ(t.bins(), std::vector<DipId>(8, D1));
}

TEST(BuildTable, RoundRobinPlacementIsDeterministic) {
  const auto a = build_table(VipId{0}, equal4(), 16);
  const auto b = build_table(VipId{0}, equal4(), 16);
  EXPECT_EQ(a.bins(), b.bins());
  EXPECT_EQ(a.dip_at(0), D1);
  EXPECT_EQ(a.dip_at(1), D2);
  EXPECT_EQ(a.dip_at(4), D1);
}

TEST(BuildTable, Errors) {
  EXPECT_EQ(code_of([] { build_table(VipId{0}, equal4(), 2); }), ErrorCode::kTooSmall);
  EXPECT_EQ(code_of([] { build_table(VipId{0}, equal4(), 12); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { build_table(VipId{0}, DipPool{}, 8); }), ErrorCode::kEmptyTable);
}

TEST(TakeDown, RedistributesElevenElevenTen) {
  const auto pool = equal4();
  auto t = build_table(VipId{0}, pool, 128);
  const auto plan = plan_take_down(t, pool, D4);
  EXPECT_EQ(plan.reason, UpdateReason::kTakeDown);
  EXPECT_TRUE(plan.resolved());
  EXPECT_EQ(plan.affected_bins(), t.bins_of(D4));
  std::map<DipId, int> to;
  for (const auto& a : plan.assignments) {
    EXPECT_EQ(a.from, D4);
    ++to[a.to];
  }
  std::vector<int> got{to[D1], to[D2], to[D3]};
  std::sort(got.begin(), got.end());
  EXPECT_EQ(got, (std::vector<int>{10, 11, 11}));
  t.apply(plan);
  EXPECT_TRUE(t.bins_of(D4).empty());
  expect_weight_fidelity(t, plan.pool_after);
}

TEST(TakeDown, TwoDipsTwoBins) {
  const auto pool = DipPool::equal({D1, D2});
  auto t = build_table(VipId{0}, pool, 2);
  const auto plan = plan_take_down(t, pool, D2);
  EXPECT_EQ(plan.affected_count(), 1u);
  t.apply(plan);
  EXPECT_EQ(t.dip_at(0), t.dip_at(1));
}

TEST(TakeDown, LastDipIsRejected) {
  const auto pool = DipPool::equal({D1});
  const auto t = build_table(VipId{0}, pool, 4);
  EXPECT_EQ(code_of([&] { plan_take_down(t, pool, D1); }), ErrorCode::kPoolWouldBeEmpty);
  EXPECT_EQ(code_of([&] { plan_take_down(t, pool, D2); }), ErrorCode::kNotInPool);
}

TEST(TakeDown, WeightedPoolKeepsRatios) {
  DipPool pool;
  pool.set(D1, Rational(1, 2));
  pool.set(D2, Rational(1, 4));
  pool.set(D3, Rational(1, 8));
  pool.set(D4, Rational(1, 8));
  auto t = build_table(VipId{0}, pool, 256);
  const auto plan = plan_take_down(t, pool, D3);
  t.apply(plan);
  expect_weight_fidelity(t, plan.pool_after);
  EXPECT_EQ(plan.pool_after.weight(D1), Rational(4, 7));
}

TEST(AddDip, FourToFiveOn128Bins) {
  const auto pool = equal4();
  auto t = build_table(VipId{0}, pool, 128);
  const auto plan = plan_add_dip(t, pool, D5, Rational(1, 5));
  EXPECT_FALSE(plan.resolved());
  std::size_t total = 0;
  for (const auto& tr : plan.transfers) {
    EXPECT_EQ(tr.to, D5);
    EXPECT_TRUE(tr.count == 6 || tr.count == 7) << tr.count;
    total += tr.count;
  }
  // 128/5 = 25.6, settled to the floor since every bin moved costs a migration.
  EXPECT_EQ(total, 25u);
  const auto resolved = resolve_plan(t, plan, lowest_first());
  t.apply(resolved);
  EXPECT_EQ(t.counts().at(D5), 25u);
  expect_weight_fidelity(t, plan.pool_after);
}

TEST(AddDip, FourToFiveOn100Bins) {
  std::vector<DipId> bins;
  for (int i = 0; i < 100; ++i) bins.push_back(DipId{static_cast<std::uint32_t>(1 + i % 4)});
  EcmpTable t(VipId{0}, bins);
  const auto plan = plan_add_dip(t, equal4(), D5, Rational(1, 5));
  std::size_t total = 0;
  for (const auto& tr : plan.transfers) total += tr.count;
  EXPECT_EQ(total, 20u);
  t.apply(resolve_plan(t, plan, lowest_first()));
  for (DipId d : {D1, D2, D3, D4, D5}) EXPECT_EQ(t.counts().at(d), 20u);
}

TEST(AddDip, ZeroWeightIsEmpty) {
  const auto pool = equal4();
  const auto t = build_table(VipId{0}, pool, 128);
  EXPECT_TRUE(plan_add_dip(t, pool, D5, Rational(0)).empty());
}

TEST(AddDip, DuplicateIsRejected) {
  const auto pool = equal4();
  const auto t = build_table(VipId{0}, pool, 128);
  EXPECT_EQ(code_of([&] { plan_add_dip(t, pool, D2, Rational(1, 5)); }),
            ErrorCode::kAlreadyPresent);
}

TEST(Reweight, ThirdsAndSixthsMoveTenFromEachSmallDip) {
  const auto pool = equal4();
  auto t = build_table(VipId{0}, pool, 128);
  DipPool next;
  next.set(D1, Rational(1, 3));
  next.set(D2, Rational(1, 3));
  next.set(D3, Rational(1, 6));
  next.set(D4, Rational(1, 6));
  const auto plan = plan_reweight(t, pool, next);
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> moves;
  for (const auto& tr : plan.transfers) moves[{tr.from.value, tr.to.value}] += tr.count;
  EXPECT_EQ(moves.size(), 4u);
  EXPECT_EQ((moves[{3, 1}]), 5u);
  EXPECT_EQ((moves[{3, 2}]), 5u);
  EXPECT_EQ((moves[{4, 1}]), 5u);
  EXPECT_EQ((moves[{4, 2}]), 5u);
  t.apply(resolve_plan(t, plan, lowest_first()));
  EXPECT_EQ(t.counts().at(D1), 42u);
  EXPECT_EQ(t.counts().at(D3), 22u);
  expect_weight_fidelity(t, next);
}

TEST(Reweight, IdenticalWeightsGiveEmptyPlan) {
  const auto pool = equal4();
  const auto t = build_table(VipId{0}, pool, 128);
  EXPECT_TRUE(plan_reweight(t, pool, pool).empty());
}

TEST(Reweight, ArbitraryWeightsMatchFidelity) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng() % 10;
    std::vector<DipId> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back(DipId{static_cast<std::uint32_t>(i + 1)});
    const auto pool = DipPool::equal(ids);
    auto t = build_table(VipId{0}, pool, 256);
    DipPool next;
    for (DipId d : ids) next.set(d, Rational(static_cast<std::int64_t>(1 + rng() % 9), 10));
    const auto plan = plan_reweight(t, pool, next);
    // Only over-provisioned DIPs donate.
    const auto before = t.counts();
    const Rational total = next.total();
    for (const auto& [d, k] : plan.donations()) {
      EXPECT_GT(before.at(d), static_cast<std::size_t>((next.weight(d) / total).floor_times(256)))
          << trial;
    }
    t.apply(resolve_plan(t, plan, lowest_first()));
    expect_weight_fidelity(t, next);
  }
}

TEST(Expand, DuplicatesBins) {
  EcmpTable t(VipId{0}, {D1, D2, D1, D2});
  const auto [grown, plan] = expand_table(t, DipPool::equal({D1, D2}), 1024);
  EXPECT_EQ(grown.bins(), (std::vector<DipId>{D1, D2, D1, D2, D1, D2, D1, D2}));
  EXPECT_TRUE(plan.empty());
  EXPECT_EQ(plan.reason, UpdateReason::kExpand);
}

TEST(Expand, PreservesEverySignaturesDip) {
  const auto pool = DipPool::equal({D1, D2, D3});
  const auto t = build_table(VipId{0}, pool, 64);
  const auto grown = expand_table(t, pool, 1024).first;
  std::mt19937_64 rng(4);
  for (int i = 0; i < 100'000; ++i) {
    const Signature s{VipId{0}, rng() & Signature::kHashMask};
    ASSERT_EQ(t.lookup(s), grown.lookup(s));
  }
}

TEST(Expand, ThenAddKeepsFidelity) {
  const auto pool = equal4();
  const auto t = build_table(VipId{0}, pool, 4);
  auto [grown, plan] = expand_table(t, pool, 1024);
  EXPECT_TRUE(plan.empty());
  const auto add = plan_add_dip(grown, pool, D5, Rational(1, 5));
  grown.apply(resolve_plan(grown, add, lowest_first()));
  expect_weight_fidelity(grown, add.pool_after);
}

TEST(Expand, BeyondMaxThrows) {
  const auto t = build_table(VipId{0}, equal4(), 8);
  EXPECT_EQ(code_of([&] { expand_table(t, equal4(), 8); }), ErrorCode::kCapacityExceeded);
}

TEST(Apply, ChangesOnlyAffectedBinsAndBumpsGenerationOnce) {
  const auto pool = equal4();
  auto t = build_table(VipId{0}, pool, 128);
  const auto before = t.bins();
  const auto gen = t.generation();
  const auto plan = plan_take_down(t, pool, D2);
  t.apply(plan);
  EXPECT_EQ(t.generation(), gen + 1);
  const auto affected = plan.affected_bins();
  const std::set<BinIndex> set(affected.begin(), affected.end());
  for (BinIndex b = 0; b < 128; ++b) {
    if (set.count(b)) {
      EXPECT_NE(t.dip_at(b), before[b]);
    } else {
      EXPECT_EQ(t.dip_at(b), before[b]);
    }
  }
}

TEST(Apply, RejectsUnresolvedPlan) {
  const auto pool = equal4();
  auto t = build_table(VipId{0}, pool, 128);
  const auto plan = plan_add_dip(t, pool, D5, Rational(1, 5));
  EXPECT_THROW(t.apply(plan), Error);
}

TEST(Replace, MovesEveryBinToTheNewDip) {
  const auto pool = equal4();
  auto t = build_table(VipId{0}, pool, 128);
  const auto old_bins = t.bins_of(D3);
  const auto plan = plan_replace(t, pool, D3, D5);
  t.apply(plan);
  EXPECT_EQ(t.bins_of(D5), old_bins);
  EXPECT_TRUE(plan.pool_after.contains(D5));
  EXPECT_FALSE(plan.pool_after.contains(D3));
}

TEST(Rebin, MovesListedBinsToFreshDips) {
  const auto pool = equal4();
  auto t = build_table(VipId{0}, pool, 16);
  const auto plan = plan_rebin(t, pool, {5, 2}, {DipId{10}, DipId{11}});
  ASSERT_EQ(plan.assignments.size(), 2u);
  EXPECT_EQ(plan.assignments[0].bin, 2u);
  t.apply(plan);
  EXPECT_EQ(t.dip_at(5), DipId{10});
  EXPECT_EQ(t.dip_at(2), DipId{11});
  EXPECT_EQ(plan.pool_after.weight(DipId{10}), Rational(1, 16));
  EXPECT_THROW(plan_rebin(t, pool, {1, 1}, {DipId{20}, DipId{21}}), Error);
}

}  // namespace
}  // namespace prism
