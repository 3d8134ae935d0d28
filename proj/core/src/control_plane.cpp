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

#include "prism/control_plane.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

#include "prism/error.hpp"
#include "prism/hashing.hpp"

namespace prism {
namespace {

// Hard stop for pathological round sequences. t_limit normally ends them first.
constexpr std::size_t kMaxRounds = 64;
constexpr std::size_t kMaxRecordedFailures = 32;

}  // namespace

const char* to_string(UpdateKind kind) {
  switch (kind) {
    case UpdateKind::kTakeDown: return "take_down";
    case UpdateKind::kAddDip: return "add_dip";
    case UpdateKind::kReweight: return "reweight";
    case UpdateKind::kReplace: return "replace";
    case UpdateKind::kFail: return "fail";
    case UpdateKind::kRebin: return "rebin";
    case UpdateKind::kMoveBin: return "move_bin";
  }
  return "unknown";
}

UpdateKind parse_update_kind(std::string_view name) {
  for (auto k : {UpdateKind::kTakeDown, UpdateKind::kAddDip, UpdateKind::kReweight,
                 UpdateKind::kReplace, UpdateKind::kFail, UpdateKind::kRebin,
                 UpdateKind::kMoveBin}) {
    if (name == to_string(k)) return k;
  }
  throw Error(ErrorCode::kConfigError, "unknown update kind '" + std::string(name) + "'");
}

std::size_t UpdateReport::max_rounds() const {
  std::size_t m = 0;
  for (const auto& b : bins) m = std::max(m, b.rounds.size());
  return m;
}

ControlPlane::ControlPlane(const SimConfig& cfg, VipRegistry& registry, FibSet& fibs, Mct& mct,
                           Sct& sct, Dataplane& dataplane, BinSelectionPolicy policy,
                           std::uint64_t seed)
    : cfg_(cfg),
      registry_(registry),
      fibs_(fibs),
      mct_(mct),
      sct_(sct),
      dataplane_(dataplane),
      policy_(policy),
      rng_(seed) {}

VirtualTime ControlPlane::poll_cost(std::size_t entries) const {
  return from_seconds(static_cast<double>(entries) / cfg_.fib_read_rate) +
         cfg_.fib_poll_overhead;
}

void ControlPlane::submit(const PoolUpdateCommand& cmd, VirtualTime now) {
  queue_.push_back(QueuedUpdate{cmd, now});
}

void ControlPlane::begin(Step step, VirtualTime now, VirtualTime cost) {
  step_ = step;
  step_end_ = now + cost;
  counters_.cpu_busy += cost;
}

std::optional<VirtualTime> ControlPlane::advance(VirtualTime now) {
  VirtualTime cursor = now;
  for (;;) {
    if (step_ != Step::kNone) {
      if (step_end_ > now) return step_end_;
      cursor = step_end_;
      finish_step(cursor);
      continue;
    }
    if (active_) {
      next_migration_step(cursor);
      continue;
    }
    if (poll_pending_) {
      poll_pending_ = false;
      begin(Step::kGlobalPoll, cursor, poll_cost(fibs_.total_size()));
      continue;
    }
    if (!queue_.empty()) {
      start_update(cursor);
      continue;
    }
    if (probe_pending_) {
      probe_pending_ = false;
      begin(Step::kProbe, cursor, poll_cost(mct_.size()));
      continue;
    }
    return std::nullopt;
  }
}

void ControlPlane::finish_step(VirtualTime now) {
  const Step step = step_;
  step_ = Step::kNone;
  switch (step) {
    case Step::kNone:
      break;
    case Step::kGlobalPoll:
      poll_fibs(now);
      break;
    case Step::kProbe:
      probe_dead_connections(now);
      break;
    case Step::kInitialPoll: {
      drain_syn1(now);
      ActiveUpdate& job = *active_;
      job.batch = build_batch(job.bin.vip, job.bin.bin);
      job.bin.initial_count = job.batch.size();
      if (job.batch.empty()) {
        rewrite_bin(now);
      } else {
        job.round = 1;
        begin_copy(now);
      }
      break;
    }
    case Step::kCopy:
      finish_copy(now);
      break;
    case Step::kRePoll: {
      drain_syn1(now);
      ActiveUpdate& job = *active_;
      job.batch = build_batch(job.bin.vip, job.bin.bin);
      job.bin.rounds.back().next_count = job.batch.size();
      if (job.batch.empty()) {
        rewrite_bin(now);
      } else {
        ++job.round;
        begin_copy(now);
      }
      break;
    }
  }
}

void ControlPlane::start_update(VirtualTime now) {
  QueuedUpdate q = queue_.front();
  queue_.pop_front();
  ActiveUpdate job;
  job.cmd = q.cmd;
  job.report.id = next_update_id_++;
  job.report.kind = q.cmd.kind;
  job.report.vip = q.cmd.vip;
  job.report.submitted = q.submitted;
  job.report.started = now;
  active_ = std::move(job);
  try {
    plan_update(*active_, now);
  } catch (const Error& e) {
    active_->report.rejected = true;
    active_->report.note = e.what();
    active_->report.finished = now;
    ++counters_.updates_rejected;
    reports_.push_back(std::move(active_->report));
    active_.reset();
  }
}

DipId ControlPlane::resolve_dip(const VipState& v, const PoolUpdateCommand& cmd) const {
  if (cmd.dip_ordinal) {
    if (*cmd.dip_ordinal >= v.ordinals.size()) {
      throw Error(ErrorCode::kNotInPool, fmt::format("no DIP with ordinal {}", *cmd.dip_ordinal));
    }
    return v.ordinals[*cmd.dip_ordinal];
  }
  const auto dips = v.pool.dips();
  if (dips.empty()) throw Error(ErrorCode::kEmptyTable, "pool is empty");
  return dips[cmd.pick % dips.size()];
}

void ControlPlane::plan_update(ActiveUpdate& job, VirtualTime now) {
  const PoolUpdateCommand& cmd = job.cmd;
  VipState& v = registry_.at(cmd.vip);
  UpdatePlan plan;
  std::optional<DipId> failed;
  switch (cmd.kind) {
    case UpdateKind::kTakeDown:
      plan = plan_take_down(v.table, v.pool, resolve_dip(v, cmd));
      break;
    case UpdateKind::kFail:
      failed = resolve_dip(v, cmd);
      plan = plan_fail(v.table, v.pool, *failed);
      break;
    case UpdateKind::kAddDip: {
      const Rational weight =
          cmd.weight ? *cmd.weight : Rational(1, static_cast<std::int64_t>(v.pool.size() + 1));
      while (v.table.size() < cfg_.bins_per_dip * (v.pool.size() + 1)) {
        if (v.table.size() * 2 > cfg_.max_ecmp_length && v.table.size() > v.pool.size()) break;
        auto grown = expand_table(v.table, v.pool, cfg_.max_ecmp_length);
        v.table = std::move(grown.first);
        sct_.rebin(v.id, v.table.size());
        ++job.report.expansions;
        ++counters_.expansions;
      }
      const DipId fresh = registry_.allocate_dip();
      plan = plan_add_dip(v.table, v.pool, fresh, weight);
      v.ordinals.push_back(fresh);
      break;
    }
    case UpdateKind::kReweight: {
      DipPool next;
      const auto dips = v.pool.dips();
      if (cmd.weights.empty()) {
        std::mt19937_64 r(cmd.pick);
        for (DipId d : dips) next.set(d, Rational(static_cast<std::int64_t>(1 + r() % 4)));
      } else {
        if (cmd.weights.size() != dips.size()) {
          throw Error(ErrorCode::kInvalidArgument, "reweight needs one weight per DIP");
        }
        for (std::size_t i = 0; i < dips.size(); ++i) next.set(dips[i], cmd.weights[i]);
      }
      plan = plan_reweight(v.table, v.pool, next);
      break;
    }
    case UpdateKind::kReplace: {
      const DipId old_dip = resolve_dip(v, cmd);
      const DipId fresh = registry_.allocate_dip();
      plan = plan_replace(v.table, v.pool, old_dip, fresh);
      v.ordinals.push_back(fresh);
      break;
    }
    case UpdateKind::kRebin:
    case UpdateKind::kMoveBin: {
      std::vector<BinIndex> bins = cmd.bins;
      if (cmd.kind == UpdateKind::kRebin) {
        // Bins already handed to fresh servers are not taken down again.
        std::vector<BinIndex> candidates;
        for (std::size_t i = 0; i < v.table.size(); ++i) {
          if (rehomed_.count(v.table.dip_at(static_cast<BinIndex>(i)).value) == 0) {
            candidates.push_back(static_cast<BinIndex>(i));
          }
        }
        bins = choose_bins(v.id, candidates, cmd.count, now);
      }
      std::vector<DipId> fresh;
      for (std::size_t i = 0; i < bins.size(); ++i) {
        fresh.push_back(registry_.allocate_dip());
        rehomed_.insert(fresh.back().value);
      }
      plan = plan_rebin(v.table, v.pool, bins, fresh);
      for (DipId d : fresh) v.ordinals.push_back(d);
      break;
    }
  }
  const VipId vip = v.id;
  plan = resolve_plan(v.table, std::move(plan),
                      [this, vip, now](DipId, const std::vector<BinIndex>& bins, std::size_t n) {
                        return choose_bins(vip, bins, n, now);
                      });
  job.report.affected_bins = plan.assignments.size();
  job.pool_after = plan.pool_after;
  if (failed) {
    // No migration: the failed server's connections are lost anyway.
    v.table.apply(plan);
    registry_.mark_failed(*failed);
    return;
  }
  job.pending.assign(plan.assignments.begin(), plan.assignments.end());
}

void ControlPlane::next_migration_step(VirtualTime now) {
  ActiveUpdate& job = *active_;
  if (job.pending.empty()) {
    finish_update(now);
    return;
  }
  const BinAssignment a = job.pending.front();
  job.pending.pop_front();
  job.bin = BinMigrationReport{};
  job.bin.vip = job.report.vip;
  job.bin.bin = a.bin;
  job.bin.from = a.from;
  job.bin.to = a.to;
  job.bin.started = now;
  job.bin_active = true;
  job.batch.clear();
  job.round = 0;
  job.last = false;
  job.token = next_token_++;
  ++counters_.migration_polls;
  begin(Step::kInitialPoll, now, poll_cost(fibs_[FibKind::kSyn1].size()));
}

void ControlPlane::begin_copy(VirtualTime now) {
  ActiveUpdate& job = *active_;
  const VipState& v = registry_.at(job.bin.vip);
  const double rho = cfg_.mct_write_rate;
  const auto c = static_cast<double>(job.batch.size());
  const VirtualTime duration = from_seconds(c / rho);

  // Expected SYN arrivals into this bin while the round runs.
  double rate = 0.0;
  if (job.round == 1) {
    if (v.stats.has_syn_rate) rate = v.stats.syn_rate / static_cast<double>(v.table.size());
  } else {
    const double since = to_seconds(now - job.copy_started);
    if (since > 0.0) rate = c / since;
  }
  const double expected_next = rate * to_seconds(duration);
  const VirtualTime next_duration = from_seconds(expected_next / rho);
  const VirtualTime elapsed = now - job.bin.started;
  job.last = expected_next < 1.0 || elapsed + duration + next_duration > cfg_.t_limit ||
             job.round >= kMaxRounds;
  if (job.last) dataplane_.enable_trap(job.bin.vip, job.bin.bin, job.token);

  MigrationRound round;
  round.index = job.round;
  round.copy_count = job.batch.size();
  round.duration = duration;
  round.trapped = job.last;
  job.bin.rounds.push_back(round);
  job.copy_started = now;
  begin(Step::kCopy, now, duration);
}

void ControlPlane::finish_copy(VirtualTime now) {
  ActiveUpdate& job = *active_;
  for (const Signature& sig : job.batch) {
    SctEntry* e = sct_.find(sig);
    if (e == nullptr || e->in_mct) continue;
    const InsertResult r = mct_.insert(sig, e->dip);
    if (r == InsertResult::kFull) {
      abort_update(now, "MCT full while copying " + to_string(sig));
      return;
    }
    e->in_mct = true;
    ++job.bin.migrated;
    ++counters_.migrated;
  }
  if (job.last) {
    job.bin.rounds.back().next_count = job.bin.rounds.back().trapped_syns;
    rewrite_bin(now);
    return;
  }
  ++counters_.migration_polls;
  begin(Step::kRePoll, now, poll_cost(fibs_[FibKind::kSyn1].size()));
}

void ControlPlane::rewrite_bin(VirtualTime now) {
  ActiveUpdate& job = *active_;
  VipState& v = registry_.at(job.bin.vip);
  if (cfg_.check_invariants) check_rewrite_invariants(job.bin.vip, job.bin.bin);
  const auto* members = sct_.bin_members(job.bin.vip, job.bin.bin);
  job.bin.members_at_rewrite = members == nullptr ? 0 : members->size();
  v.table.set_bin(job.bin.bin, job.bin.to);
  dataplane_.disable_trap(job.bin.vip, job.bin.bin, job.token);
  job.bin.finished = now;
  job.report.migrated += job.bin.migrated;
  job.report.trapped_syns += job.bin.trapped_syns;
  job.report.bins.push_back(job.bin);
  job.bin_active = false;
}

void ControlPlane::abort_update(VirtualTime now, const std::string& why) {
  ActiveUpdate& job = *active_;
  dataplane_.disable_trap(job.bin.vip, job.bin.bin, job.token);
  job.bin.aborted = true;
  job.bin.finished = now;
  job.report.migrated += job.bin.migrated;
  job.report.trapped_syns += job.bin.trapped_syns;
  job.report.bins.push_back(job.bin);
  job.bin_active = false;
  job.pending.clear();
  job.report.aborted = true;
  job.report.note = "MctOverflow: " + why;
  ++counters_.mct_overflow_aborts;
  if (failures_.size() < kMaxRecordedFailures) failures_.push_back(job.report.note);
  // The pool follows whatever the table holds now.
  const VipState& v = registry_.at(job.report.vip);
  DipPool pool;
  const auto len = static_cast<std::int64_t>(v.table.size());
  for (const auto& [d, c] : v.table.counts()) {
    pool.set(d, Rational(static_cast<std::int64_t>(c), len));
  }
  job.pool_after = pool;
}

void ControlPlane::finish_update(VirtualTime now) {
  ActiveUpdate& job = *active_;
  VipState& v = registry_.at(job.report.vip);
  v.pool = job.pool_after;
  job.report.finished = now;
  ++counters_.updates_completed;
  reports_.push_back(std::move(job.report));
  active_.reset();
}

std::vector<Signature> ControlPlane::build_batch(VipId vip, BinIndex bin) {
  std::vector<Signature> out;
  const auto* members = sct_.bin_members(vip, bin);
  if (members == nullptr) return out;
  for (std::uint64_t packed : *members) {
    const Signature sig = Signature::unpack(packed);
    SctEntry* e = sct_.find(sig);
    if (e == nullptr) continue;
    if (!e->in_mct) {
      out.push_back(sig);
      continue;
    }
    if (e->probing) {
      // A liveness probe already holds the right DIP; keep it as a migration.
      if (MctEntry* m = mct_.find(sig)) m->probe_only = false;
      e->probing = false;
      if (e->state == SctState::kTest) e->state = SctState::kActive;
      if (active_ && active_->bin_active) ++active_->bin.migrated;
      ++counters_.migrated;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void ControlPlane::check_rewrite_invariants(VipId vip, BinIndex bin) {
  ++counters_.invariant_checks;
  auto record = [this](std::string msg) {
    if (failures_.size() < kMaxRecordedFailures) failures_.push_back(std::move(msg));
  };
  if (const auto* members = sct_.bin_members(vip, bin)) {
    for (std::uint64_t packed : *members) {
      const Signature sig = Signature::unpack(packed);
      const SctEntry* e = sct_.find(sig);
      if (e != nullptr && e->in_mct && mct_.find(sig) != nullptr) continue;
      ++counters_.completeness_violations;
      record(fmt::format("completeness: vip {} bin {} sig {} not in MCT", vip.value, bin,
                         to_string(sig)));
    }
  }
  const std::size_t len = registry_.at(vip).table.size();
  for (const FibEntry& fe : fibs_[FibKind::kSyn1].pending()) {
    if (fe.signature.vip_id != vip || ecmp_hash(fe.signature, len) != bin) continue;
    const SctEntry* e = sct_.find(fe.signature);
    if (e != nullptr && e->in_mct) continue;
    ++counters_.trap_violations;
    record(fmt::format("trap: vip {} bin {} pending SYN {} not pinned", vip.value, bin,
                       to_string(fe.signature)));
  }
}

void ControlPlane::drain_syn1(VirtualTime now) {
  const auto entries = fibs_[FibKind::kSyn1].drain_all();
  counters_.poll_entries += entries.size();
  syn_counts_.assign(registry_.size(), 0);
  for (const FibEntry& fe : entries) {
    const VipId vip = fe.signature.vip_id;
    if (vip.value >= registry_.size()) continue;
    const VipState& v = registry_.at(vip);
    const BinIndex bin = v.table.bin_of(fe.signature);
    const SynOutcome o = sct_.ingest_syn1(fe.signature, v.table.dip_at(bin), bin, fe.record_time);
    if (o != SynOutcome::kRetransmit) ++syn_counts_[vip.value];
  }
  if (last_syn_drain_ && now > *last_syn_drain_) {
    const double dt = to_seconds(now - *last_syn_drain_);
    registry_.for_each([&](VipState& v) {
      v.stats.record_syn_rate(static_cast<double>(syn_counts_[v.id.value]) / dt,
                              cfg_.syn_rate_ewma_alpha);
    });
  }
  last_syn_drain_ = now;
}

void ControlPlane::drain_rest(VirtualTime now) {
  const auto syn2 = fibs_[FibKind::kSyn2].drain_all();
  counters_.poll_entries += syn2.size();
  for (const FibEntry& fe : syn2) sct_.ingest_syn2(fe.signature, fe.record_time);

  std::vector<std::pair<FibEntry, CloseKind>> closes;
  auto take = [&](FibKind k, CloseKind c) {
    for (const FibEntry& fe : fibs_[k].drain_all()) closes.emplace_back(fe, c);
  };
  take(FibKind::kFin1, CloseKind::kFin1);
  take(FibKind::kFin2, CloseKind::kFin2);
  take(FibKind::kRst1, CloseKind::kRst);
  take(FibKind::kRst2, CloseKind::kRst);
  counters_.poll_entries += closes.size();
  std::stable_sort(closes.begin(), closes.end(), [](const auto& a, const auto& b) {
    return a.first.record_time < b.first.record_time;
  });
  for (const auto& [fe, kind] : closes) handle_close(fe.signature, kind, fe.record_time);

  for (const SctEntry& e : sct_.expire(now)) drop_removed(e);
}

void ControlPlane::poll_fibs(VirtualTime now) {
  ++counters_.polls;
  drain_syn1(now);
  drain_rest(now);
}

void ControlPlane::handle_close(const Signature& sig, CloseKind kind, VirtualTime at) {
  const CloseResult r = sct_.ingest_close(sig, kind, at);
  if (r.lifetime && sig.vip_id.value < registry_.size()) {
    registry_.at(sig.vip_id).stats.record_lifetime(to_seconds(*r.lifetime),
                                                   cfg_.lifetime_ewma_alpha);
  }
  if (r.removed) drop_removed(*r.removed);
}

void ControlPlane::drop_removed(const SctEntry& e) {
  if (e.in_mct) mct_.erase(e.signature);
}

void ControlPlane::probe_dead_connections(VirtualTime now) {
  ++counters_.probes;
  auto mean = [this](VipId vip) -> std::optional<double> {
    if (vip.value >= registry_.size()) return std::nullopt;
    return registry_.at(vip).stats.mean_lifetime();
  };
  // Connections found alive stay in the SCT only until the next cycle.
  std::unordered_set<std::uint64_t> alive;
  for (const ProbeResult& p : mct_.probe_and_clear()) {
    SctEntry* e = sct_.find(p.signature);
    if (p.probe_only) {
      mct_.erase(p.signature);
      if (!p.was_alive) {
        if (e != nullptr) sct_.erase(p.signature);
        ++counters_.probe_dead_removed;
      } else {
        if (e != nullptr) {
          e->in_mct = false;
          e->probing = false;
          if (e->state == SctState::kTest) e->state = SctState::kActive;
        }
        alive.insert(p.signature.packed());
        ++counters_.probe_alive;
      }
      continue;
    }
    if (p.was_alive || e == nullptr) continue;
    // A silent migrated entry that is also far past the expected lifetime.
    const auto m = mean(p.signature.vip_id);
    if (m && to_seconds(now - e->syn_time) > cfg_.suspect_multiplier * *m) {
      mct_.erase(p.signature);
      sct_.erase(p.signature);
      ++counters_.migrated_dead_removed;
    }
  }
  for (const Signature& sig : sct_.find_suspects(now, mean, cfg_.suspect_multiplier)) {
    if (alive.count(sig.packed()) != 0) continue;
    SctEntry* e = sct_.find(sig);
    if (mct_.insert(sig, e->dip, true) == InsertResult::kFull) {
      ++counters_.probe_skipped_full;
      break;
    }
    e->in_mct = true;
    e->probing = true;
    e->state = SctState::kTest;
    ++counters_.probe_inserted;
  }
}

std::vector<BinIndex> ControlPlane::choose_bins(VipId vip, const std::vector<BinIndex>& candidates,
                                                std::size_t n, VirtualTime now) {
  std::vector<CandidateBin> bins;
  bins.reserve(candidates.size());
  for (BinIndex b : candidates) {
    CandidateBin c;
    c.bin = b;
    if (const auto* members = sct_.bin_members(vip, b)) {
      for (std::uint64_t packed : *members) {
        const SctEntry* e = sct_.find(Signature::unpack(packed));
        if (e == nullptr || e->in_mct) continue;
        c.ages_s.push_back(to_seconds(now - e->syn_time));
      }
    }
    bins.push_back(std::move(c));
  }
  return select_bins(bins, n, policy_, registry_.at(vip).stats.mean_lifetime(), rng_);
}

void ControlPlane::on_trapped_syn(const Signature& sig, BinIndex bin, DipId dip,
                                  VirtualTime now) {
  ++counters_.trapped_syns;
  sct_.ingest_syn1(sig, dip, bin, now);
  SctEntry* e = sct_.find(sig);
  if (e == nullptr) return;
  const bool counts = active_ && active_->bin_active && active_->bin.vip == sig.vip_id &&
                      active_->bin.bin == bin;
  if (counts) {
    ++active_->bin.trapped_syns;
    if (!active_->bin.rounds.empty()) ++active_->bin.rounds.back().trapped_syns;
  }
  if (e->in_mct) return;
  if (mct_.insert(sig, e->dip) == InsertResult::kFull) {
    ++counters_.trap_mct_full;
    if (failures_.size() < kMaxRecordedFailures) {
      failures_.push_back("MCT full for trapped SYN " + to_string(sig));
    }
    return;
  }
  e->in_mct = true;
  ++counters_.migrated;
  if (counts) ++active_->bin.migrated;
}

void ControlPlane::on_learn_overflow(FibKind kind, const Signature& sig, VirtualTime now) {
  ++counters_.learn_overflow_handled;
  if (sig.vip_id.value >= registry_.size()) return;
  switch (kind) {
    case FibKind::kSyn1: {
      const VipState& v = registry_.at(sig.vip_id);
      const BinIndex bin = v.table.bin_of(sig);
      sct_.ingest_syn1(sig, v.table.dip_at(bin), bin, now);
      break;
    }
    case FibKind::kSyn2:
      sct_.ingest_syn2(sig, now);
      break;
    case FibKind::kFin1:
      handle_close(sig, CloseKind::kFin1, now);
      break;
    case FibKind::kFin2:
      handle_close(sig, CloseKind::kFin2, now);
      break;
    case FibKind::kRst1:
    case FibKind::kRst2:
      handle_close(sig, CloseKind::kRst, now);
      break;
  }
}

}  // namespace prism
