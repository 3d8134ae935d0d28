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

#include <cstdint>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "prism/cuckoo_table.hpp"
#include "prism/hashing.hpp"

namespace prism {
namespace {

std::vector<Signature> random_signatures(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Signature> out(n);
  for (auto& s : out) {
    s = Signature{VipId{static_cast<std::uint16_t>(rng() % 8)}, rng() & Signature::kHashMask};
  }
  return out;
}

void BM_CuckooInsertToLoad(benchmark::State& state) {
  const auto capacity = static_cast<std::size_t>(state.range(0));
  const auto keys = random_signatures(capacity, 1);
  for (auto _ : state) {
    CuckooTable<std::uint32_t> t(capacity, 7);
    std::size_t i = 0;
    for (; i < keys.size(); ++i) {
      if (t.insert(keys[i], static_cast<std::uint32_t>(i)) == InsertResult::kFull) break;
    }
    benchmark::DoNotOptimize(i);
    state.counters["load"] = t.load_factor();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(capacity));
}
BENCHMARK(BM_CuckooInsertToLoad)->Arg(1 << 12)->Arg(1 << 16);

void BM_CuckooFindHit(benchmark::State& state) {
  const std::size_t capacity = 1 << 16;
  const auto keys = random_signatures(capacity * 3 / 4, 2);
  CuckooTable<std::uint32_t> t(capacity, 7);
  for (const auto& k : keys) t.insert(k, 1);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(t.find(keys[i]));
    if (++i == keys.size()) i = 0;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_CuckooFindHit);

void BM_CuckooFindMiss(benchmark::State& state) {
  const std::size_t capacity = 1 << 16;
  CuckooTable<std::uint32_t> t(capacity, 7);
  for (const auto& k : random_signatures(capacity * 3 / 4, 3)) t.insert(k, 1);
  const auto probes = random_signatures(4096, 4);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(t.find(probes[i]));
    i = (i + 1) & 4095;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_CuckooFindMiss);

void BM_SignatureOfKey(benchmark::State& state) {
  ConnectionKey key{0x0B000001u, 0x0A640000u, 1000, 80, 6};
  for (auto _ : state) {
    ++key.src_port;
    benchmark::DoNotOptimize(make_signature(VipId{3}, key_digest(key), 48));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SignatureOfKey);

}  // namespace
}  // namespace prism
