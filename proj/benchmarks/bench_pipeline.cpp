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

#include "prism/control_plane.hpp"
#include "prism/ecmp.hpp"
#include "prism/simulator.hpp"

namespace prism {
namespace {

void BM_DataplaneForward(benchmark::State& state) {
  SimConfig cfg;
  VipRegistry registry;
  FibSet fibs(cfg);
  Mct mct(cfg.mct_capacity, 2);
  Dataplane dp(cfg, registry, fibs, mct);
  registry.add_vip(0x0A640000u, 100, 1024);
  Packet p;
  p.key = ConnectionKey{0x0B000001u, 0x0A640000u, 1000, 80, 6};
  p.flag = PacketFlag::kData;
  for (auto _ : state) {
    ++p.key.src_port;
    benchmark::DoNotOptimize(dp.process_packet(p));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_DataplaneForward);

void BM_PollDrain(benchmark::State& state) {
  const auto entries = static_cast<std::size_t>(state.range(0));
  SimConfig cfg;
  cfg.probe_interval = VirtualTime{};
  VipRegistry registry;
  FibSet fibs(cfg);
  Mct mct(cfg.mct_capacity, 2);
  Sct sct(cfg);
  Dataplane dp(cfg, registry, fibs, mct);
  ControlPlane cp(cfg, registry, fibs, mct, sct, dp, BinSelectionPolicy{}, 1);
  const VipId vip = registry.add_vip(0x0A640000u, 100, 1024);
  std::mt19937_64 rng(5);
  VirtualTime now{};
  for (auto _ : state) {
    for (std::size_t i = 0; i < entries; ++i) {
      fibs[FibKind::kSyn1].learn(Signature{vip, rng() & Signature::kHashMask}, now);
    }
    now += from_millis(10);
    cp.poll_fibs(now);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(entries));
}
BENCHMARK(BM_PollDrain)->Arg(1000)->Arg(10'000);

void BM_PlanTakeDown(benchmark::State& state) {
  const auto len = static_cast<std::size_t>(state.range(0));
  std::vector<DipId> dips;
  for (std::uint32_t d = 0; d < 100; ++d) dips.push_back(DipId{d});
  const DipPool pool = DipPool::equal(dips);
  const EcmpTable table = build_table(VipId{0}, pool, len);
  for (auto _ : state) {
    benchmark::DoNotOptimize(plan_take_down(table, pool, DipId{7}));
  }
}
BENCHMARK(BM_PlanTakeDown)->Arg(1024)->Arg(1 << 16);

void BM_SmokeScenario(benchmark::State& state) {
  Scenario s;
  s.vips = 2;
  s.dips_per_vip = {8};
  s.arrival_rate = 2000;
  s.lifetime = LifetimeDist::parse("uniform 0.5 3");
  s.duration = from_seconds(2);
  s.update_rate = 2;
  for (auto _ : state) {
    const RunResult r = run_scenario(s);
    benchmark::DoNotOptimize(r.events);
    state.counters["events"] = static_cast<double>(r.events);
  }
}
BENCHMARK(BM_SmokeScenario)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace prism

BENCHMARK_MAIN();
