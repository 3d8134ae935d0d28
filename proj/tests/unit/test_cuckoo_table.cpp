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

#include "prism/cuckoo_table.hpp"

#include <random>
#include <unordered_map>

#include <gtest/gtest.h>

namespace prism {
namespace {

Signature sig(std::uint64_t h, std::uint16_t vip = 0) {
  return Signature{VipId{vip}, h & Signature::kHashMask};
}

TEST(Cuckoo, InsertFindErase) {
  CuckooTable<int> t(64, 1);
  EXPECT_EQ(t.capacity(), 64u);
  EXPECT_EQ(t.insert(sig(1), 10), InsertResult::kInserted);
  EXPECT_EQ(t.insert(sig(1), 11), InsertResult::kAlreadyPresent);
  ASSERT_NE(t.find(sig(1)), nullptr);
  EXPECT_EQ(*t.find(sig(1)), 10);
  EXPECT_EQ(t.find(sig(2)), nullptr);
  EXPECT_TRUE(t.erase(sig(1)));
  EXPECT_FALSE(t.erase(sig(1)));
  EXPECT_EQ(t.size(), 0u);
}

TEST(Cuckoo, VipIsPartOfTheKey) {
  CuckooTable<int> t(64, 1);
  t.insert(sig(5, 1), 1);
  t.insert(sig(5, 2), 2);
  EXPECT_EQ(*t.find(sig(5, 1)), 1);
  EXPECT_EQ(*t.find(sig(5, 2)), 2);
}

TEST(Cuckoo, FullLeavesTableUnchanged) {
  CuckooTable<int> t(16, 3, 2, 2, 8);
  std::mt19937_64 rng(3);
  std::unordered_map<std::uint64_t, int> ref;
  for (int i = 0; i < 1000; ++i) {
    const auto s = sig(rng());
    const auto r = t.insert(s, i);
    if (r == InsertResult::kFull) {
      EXPECT_FALSE(t.contains(s));
      break;
    }
    ref[s.packed()] = i;
  }
  EXPECT_EQ(t.size(), ref.size());
  for (const auto& [k, v] : ref) {
    ASSERT_NE(t.find(Signature::unpack(k)), nullptr);
    EXPECT_EQ(*t.find(Signature::unpack(k)), v);
  }
  EXPECT_TRUE(t.check_invariants());
}

TEST(Cuckoo, MeanLoadAtFirstFullIsHigh) {
  double total = 0;
  const int seeds = 1000;
  for (int seed = 0; seed < seeds; ++seed) {
    CuckooTable<int> t(64, static_cast<std::uint64_t>(seed), 2, 4, 32);
    std::mt19937_64 rng(static_cast<std::uint64_t>(seed) + 1'000'000);
    while (t.insert(sig(rng()), 0) != InsertResult::kFull) {
    }
    total += t.load_factor();
  }
  EXPECT_GE(total / seeds, 0.80);
}

TEST(Cuckoo, MatchesReferenceMapOverRandomOperations) {
  CuckooTable<std::uint64_t> t(4096, 9);
  std::unordered_map<std::uint64_t, std::uint64_t> ref;
  std::mt19937_64 rng(12);
  for (int i = 0; i < 100'000; ++i) {
    const auto s = sig(rng() % 3000);
    switch (rng() % 3) {
      case 0: {
        const auto r = t.insert(s, static_cast<std::uint64_t>(i));
        if (r == InsertResult::kInserted) {
          ASSERT_TRUE(ref.emplace(s.packed(), i).second);
        } else if (r == InsertResult::kAlreadyPresent) {
          ASSERT_TRUE(ref.count(s.packed()));
        } else {
          ASSERT_FALSE(ref.count(s.packed()));
        }
        break;
      }
      case 1: {
        const auto* v = t.find(s);
        const auto it = ref.find(s.packed());
        ASSERT_EQ(v != nullptr, it != ref.end());
        if (v) ASSERT_EQ(*v, it->second);
        break;
      }
      default:
        ASSERT_EQ(t.erase(s), ref.erase(s.packed()) == 1);
    }
    ASSERT_EQ(t.size(), ref.size());
  }
  EXPECT_TRUE(t.check_invariants());
}

TEST(Cuckoo, ForEachVisitsEveryEntry) {
  CuckooTable<int> t(256, 2);
  for (int i = 0; i < 100; ++i) t.insert(sig(static_cast<std::uint64_t>(i) * 7919), i);
  int seen = 0;
  t.for_each([&seen](const Signature&, int&) { ++seen; });
  EXPECT_EQ(seen, 100);
  t.clear();
  EXPECT_EQ(t.size(), 0u);
}

TEST(Cuckoo, RejectsBadShape) {
  EXPECT_THROW(CuckooTable<int>(64, 1, 1, 4), Error);
  EXPECT_THROW(CuckooTable<int>(4, 1, 2, 4), Error);
}

}  // namespace
}  // namespace prism
