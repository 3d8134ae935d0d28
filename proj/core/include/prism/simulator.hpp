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
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "prism/control_plane.hpp"
#include "prism/dataplane.hpp"
#include "prism/fib_table.hpp"
#include "prism/mct.hpp"
#include "prism/metrics.hpp"
#include "prism/pcc_oracle.hpp"
#include "prism/sct.hpp"
#include "prism/vip_registry.hpp"
#include "prism/workload.hpp"

namespace prism {

struct RunResult {
  std::vector<MetricsFrame> frames;
  std::vector<UpdateReport> updates;
  SummaryDocument summary;
  std::string csv;
  std::string summary_text;
  int exit_status = 0;  // nonzero on MCT overflow or a failed invariant

  VirtualTime end_time{};
  std::uint64_t events = 0;
  std::uint64_t connections = 0;
  double mct_fraction_mean = 0.0;    // over frames at or after warmup
  double mct_occupancy_mean = 0.0;
  double mct_integral = 0.0;         // entry-seconds over the sampled run
  double active_connections_mean = 0.0;
  double migrated_per_update = 0.0;  // over completed updates
  std::size_t max_rounds = 0;
  double mean_second_round = 0.0;    // mean C_2 over migrated bins
  double mean_update_ms = 0.0;
  std::uint64_t pcc_violations = 0;
  std::uint64_t broken_by_collision = 0;
  std::uint64_t completed_updates = 0;
  bool mct_overflow = false;
  std::vector<std::string> invariant_failures;
};

// One deterministic run: generator, switch model, oracle and sampler driven
// by a single virtual clock.
class Simulation {
 public:
  explicit Simulation(Scenario scenario);
  ~Simulation();

  RunResult run();

  const Scenario& scenario() const { return scenario_; }
  const VipRegistry& registry() const { return registry_; }
  const Sct& sct() const { return sct_; }
  const Mct& mct() const { return mct_; }
  const FibSet& fibs() const { return fibs_; }
  const ControlPlane& control_plane() const { return *control_; }
  const Dataplane& dataplane() const { return dataplane_; }
  const PccOracle& oracle() const { return oracle_; }

 private:
  void preload_hot_bins();
  void handle(const SimEvent& ev);
  void sample(VirtualTime now);
  RunResult finish(VirtualTime end);

  Scenario scenario_;
  SimConfig cfg_;
  VipRegistry registry_;
  FibSet fibs_;
  Mct mct_;
  Sct sct_;
  Dataplane dataplane_;
  std::unique_ptr<ControlPlane> control_;
  PccOracle oracle_;
  TrafficGenerator generator_;
  std::vector<MetricsFrame> frames_;
  std::optional<VirtualTime> cpu_wake_;
  std::uint64_t events_ = 0;
  std::size_t updates_seen_ = 0;
};

RunResult run_scenario(const Scenario& scenario);
// Also writes metrics.csv and summary.txt into `out_dir`.
RunResult run_scenario(const Scenario& scenario, const std::filesystem::path& out_dir);

// Seed from PRISM_LAB_SEED when set.
std::optional<std::uint64_t> seed_from_env();

}  // namespace prism
