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

#include "prism/invariant_suite.hpp"

#include "prism/random.hpp"
#include "prism/simulator.hpp"

namespace prism {

Scenario random_scenario(std::uint64_t seed) {
  Rng rng(seed * 0x9e3779b97f4a7c15ULL + 17);
  Scenario s;
  s.seed = seed;
  s.vips = 1 + rng.below(3);
  s.dips_per_vip = {3 + rng.below(10)};
  s.arrival_rate = rng.uniform(200.0, 2000.0);
  s.lifetime = LifetimeDist{LifetimeDist::Kind::kUniform, 0.5, rng.uniform(1.0, 4.0)};
  s.data_packet_rate = rng.uniform(2.0, 5.0);
  s.rst_fraction = rng.uniform(0.0, 0.2);
  s.dead_client_fraction = rng.uniform(0.0, 0.05);
  s.syn_retx_fraction = rng.uniform(0.0, 0.2);
  s.syn_retx_late_fraction = rng.uniform(0.0, 0.05);
  s.duration = from_seconds(rng.uniform(4.0, 8.0));
  s.update_rate = rng.uniform(1.0, 4.0);
  static const UpdateKind kKinds[] = {UpdateKind::kTakeDown, UpdateKind::kAddDip,
                                      UpdateKind::kReweight, UpdateKind::kReplace,
                                      UpdateKind::kFail,     UpdateKind::kRebin};
  s.update_kinds.clear();
  for (UpdateKind k : kKinds) {
    if (rng.uniform() < 0.5) s.update_kinds.push_back(k);
  }
  if (s.update_kinds.empty()) s.update_kinds.push_back(UpdateKind::kReplace);
  ScheduledUpdate mid;
  mid.at = s.duration / 2;
  mid.cmd.vip = VipId{static_cast<std::uint16_t>(rng.below(s.vips))};
  mid.cmd.kind = UpdateKind::kReplace;
  mid.cmd.pick = rng.next();
  s.updates.push_back(mid);
  static const char* kPolicies[] = {"random", "least_populated", "expected_load",
                                    "life_expectancy", "blended:0.5"};
  s.policy = kPolicies[rng.below(5)];
  s.config.delta_window = from_seconds(rng.uniform(0.5, 5.0));
  s.config.mct_write_rate = rng.uniform(5'000.0, 50'000.0);
  s.config.probe_interval = from_millis(500 + static_cast<std::int64_t>(rng.below(1500)));
  s.config.fib_capacity = 65'536;
  s.config.check_invariants = true;
  return s;
}

InvariantCheck check_scenario(const Scenario& s) {
  Simulation sim(s);
  const RunResult r = sim.run();
  InvariantCheck c;
  c.seed = s.seed;
  c.policy = s.policy;
  c.connections = r.connections;
  c.updates = r.updates.size();
  c.pcc_violations = r.pcc_violations;
  c.invariant_checks = sim.control_plane().counters().invariant_checks;
  c.failures = r.invariant_failures;
  if (r.mct_overflow) c.failures.push_back("MCT overflow");
  return c;
}

}  // namespace prism
