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
#include <deque>
#include <optional>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include "prism/bin_selection.hpp"
#include "prism/config.hpp"
#include "prism/dataplane.hpp"
#include "prism/ecmp.hpp"
#include "prism/fib_table.hpp"
#include "prism/mct.hpp"
#include "prism/sct.hpp"
#include "prism/vip_registry.hpp"

namespace prism {

enum class UpdateKind { kTakeDown, kAddDip, kReweight, kReplace, kFail, kRebin, kMoveBin };

const char* to_string(UpdateKind kind);
UpdateKind parse_update_kind(std::string_view name);

// A DIP pool change requested by the operator or the workload.
struct PoolUpdateCommand {
  UpdateKind kind = UpdateKind::kReplace;
  VipId vip;
  std::optional<std::size_t> dip_ordinal;  // per-VIP creation order; unset picks at random
  std::uint64_t pick = 0;                  // randomness for unset choices
  std::optional<Rational> weight;          // add_dip; default is an equal share
  std::vector<Rational> weights;           // reweight, one per pool member in id order
  std::size_t count = 1;                   // rebin
  std::vector<BinIndex> bins;              // move_bin
};

struct MigrationRound {
  std::size_t index = 0;
  std::size_t copy_count = 0;  // c_i
  VirtualTime duration{};      // t_i = c_i / rho
  bool trapped = false;        // trap mode was on for this round
  std::size_t trapped_syns = 0;
  std::size_t next_count = 0;  // c_{i+1}, or SYNs trapped during a final round
};

struct BinMigrationReport {
  VipId vip;
  BinIndex bin = 0;
  DipId from;
  DipId to;
  VirtualTime started{};
  VirtualTime finished{};
  std::size_t initial_count = 0;  // C_1
  std::vector<MigrationRound> rounds;
  std::size_t migrated = 0;
  std::size_t trapped_syns = 0;
  std::size_t members_at_rewrite = 0;
  bool aborted = false;
  VirtualTime elapsed() const { return finished - started; }
};

struct UpdateReport {
  std::size_t id = 0;
  UpdateKind kind = UpdateKind::kReplace;
  VipId vip;
  VirtualTime submitted{};
  VirtualTime started{};
  VirtualTime finished{};
  std::size_t affected_bins = 0;
  std::size_t expansions = 0;
  std::vector<BinMigrationReport> bins;
  std::size_t migrated = 0;
  std::size_t trapped_syns = 0;
  bool aborted = false;   // MCT overflow
  bool rejected = false;  // invalid for the current pool
  std::string note;

  std::size_t max_rounds() const;
  VirtualTime duration() const { return finished - started; }
};

struct ControlPlaneCounters {
  std::uint64_t polls = 0;
  std::uint64_t migration_polls = 0;
  std::uint64_t poll_entries = 0;
  VirtualTime cpu_busy{};
  std::uint64_t probes = 0;
  std::uint64_t probe_inserted = 0;
  std::uint64_t probe_alive = 0;
  std::uint64_t probe_dead_removed = 0;
  std::uint64_t migrated_dead_removed = 0;
  std::uint64_t probe_skipped_full = 0;
  std::uint64_t migrated = 0;
  std::uint64_t trapped_syns = 0;
  std::uint64_t trap_mct_full = 0;
  std::uint64_t mct_overflow_aborts = 0;
  std::uint64_t learn_overflow_handled = 0;
  std::uint64_t updates_completed = 0;
  std::uint64_t updates_rejected = 0;
  std::uint64_t expansions = 0;
  std::uint64_t invariant_checks = 0;
  std::uint64_t completeness_violations = 0;
  std::uint64_t trap_violations = 0;
};

// The switch CPU. Work runs as a sequence of steps on one virtual processor:
// global FIB polls, liveness probes and pool updates. A pool update holds the
// processor until every affected bin has been migrated.
class ControlPlane : public SoftwareSink {
 public:
  ControlPlane(const SimConfig& cfg, VipRegistry& registry, FibSet& fibs, Mct& mct, Sct& sct,
               Dataplane& dataplane, BinSelectionPolicy policy, std::uint64_t seed);

  void request_poll() { poll_pending_ = true; }
  void request_probe() { probe_pending_ = true; }
  void submit(const PoolUpdateCommand& cmd, VirtualTime now);

  // Runs every step that can complete at `now`. Returns when the processor
  // next needs attention, or nullopt when it is idle.
  std::optional<VirtualTime> advance(VirtualTime now);
  bool idle() const { return step_ == Step::kNone && !active_ && queue_.empty(); }
  bool updates_outstanding() const { return active_.has_value() || !queue_.empty(); }

  VirtualTime poll_cost(std::size_t entries) const;

  // Synchronous operations, usable without the scheduler.
  void poll_fibs(VirtualTime now);
  void probe_dead_connections(VirtualTime now);
  std::vector<BinIndex> choose_bins(VipId vip, const std::vector<BinIndex>& candidates,
                                    std::size_t n, VirtualTime now);

  void on_trapped_syn(const Signature& sig, BinIndex bin, DipId dip, VirtualTime now) override;
  void on_learn_overflow(FibKind kind, const Signature& sig, VirtualTime now) override;

  const std::vector<UpdateReport>& reports() const { return reports_; }
  const ControlPlaneCounters& counters() const { return counters_; }
  const std::vector<std::string>& invariant_failures() const { return failures_; }
  const BinSelectionPolicy& policy() const { return policy_; }

 private:
  enum class Step { kNone, kGlobalPoll, kProbe, kInitialPoll, kCopy, kRePoll };

  struct QueuedUpdate {
    PoolUpdateCommand cmd;
    VirtualTime submitted{};
  };

  struct ActiveUpdate {
    PoolUpdateCommand cmd;
    UpdateReport report;
    std::deque<BinAssignment> pending;
    DipPool pool_after;
    bool bin_active = false;
    BinMigrationReport bin;
    std::vector<Signature> batch;
    std::size_t round = 0;
    bool last = false;
    std::uint64_t token = 0;
    VirtualTime copy_started{};
  };

  void begin(Step step, VirtualTime now, VirtualTime cost);
  void finish_step(VirtualTime now);
  void start_update(VirtualTime now);
  void plan_update(ActiveUpdate& job, VirtualTime now);
  void next_migration_step(VirtualTime now);
  void begin_copy(VirtualTime now);
  void finish_copy(VirtualTime now);
  void rewrite_bin(VirtualTime now);
  void finish_update(VirtualTime now);
  void abort_update(VirtualTime now, const std::string& why);
  std::vector<Signature> build_batch(VipId vip, BinIndex bin);
  void check_rewrite_invariants(VipId vip, BinIndex bin);

  void drain_syn1(VirtualTime now);
  void drain_rest(VirtualTime now);
  void handle_close(const Signature& sig, CloseKind kind, VirtualTime at);
  void drop_removed(const SctEntry& e);
  DipId resolve_dip(const VipState& v, const PoolUpdateCommand& cmd) const;

  const SimConfig& cfg_;
  VipRegistry& registry_;
  FibSet& fibs_;
  Mct& mct_;
  Sct& sct_;
  Dataplane& dataplane_;
  BinSelectionPolicy policy_;
  std::mt19937_64 rng_;

  Step step_ = Step::kNone;
  VirtualTime step_end_{};
  bool poll_pending_ = false;
  bool probe_pending_ = false;
  std::deque<QueuedUpdate> queue_;
  std::optional<ActiveUpdate> active_;
  std::uint64_t next_token_ = 1;
  std::size_t next_update_id_ = 0;

  std::unordered_set<std::uint32_t> rehomed_;  // DIPs created by rebin or move_bin

  std::optional<VirtualTime> last_syn_drain_;
  std::vector<std::uint64_t> syn_counts_;

  std::vector<UpdateReport> reports_;
  ControlPlaneCounters counters_;
  std::vector<std::string> failures_;
};

}  // namespace prism
