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

#include "prism/simulator.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>

#include <fmt/format.h>

#include "prism/bin_selection.hpp"
#include "prism/error.hpp"
#include "prism/hashing.hpp"
#include "prism/scenario_file.hpp"

namespace prism {
namespace {

// Updates still running at the end of the scenario get this long to finish.
constexpr VirtualTime kDrainLimit = std::chrono::seconds(120);

SimConfig effective_config(const Scenario& s) {
  SimConfig c = s.config;
  c.rng_seed = finalize64(c.rng_seed ^ (s.seed * 0x9e3779b97f4a7c15ULL));
  return c;
}

}  // namespace

std::optional<std::uint64_t> seed_from_env() {
  const char* v = std::getenv("PRISM_LAB_SEED");
  if (v == nullptr || *v == '\0') return std::nullopt;
  char* end = nullptr;
  const unsigned long long seed = std::strtoull(v, &end, 10);
  if (end == nullptr || *end != '\0') {
    throw Error(ErrorCode::kConfigError, fmt::format("PRISM_LAB_SEED is not a number: '{}'", v));
  }
  return seed;
}

Simulation::Simulation(Scenario scenario)
    : scenario_((scenario.validate(), std::move(scenario))),
      cfg_(effective_config(scenario_)),
      fibs_(cfg_),
      mct_(cfg_.mct_capacity, cfg_.rng_seed ^ 0x6d6374ULL, cfg_.cuckoo_slots_per_bucket,
           cfg_.cuckoo_max_kicks),
      sct_(cfg_),
      dataplane_(cfg_, registry_, fibs_, mct_),
      oracle_(registry_),
      generator_(scenario_) {
  for (std::size_t i = 0; i < scenario_.vips; ++i) {
    registry_.add_vip(vip_address(i), scenario_.dips_for(i), scenario_.ecmp_length_for(i));
  }
  control_ = std::make_unique<ControlPlane>(cfg_, registry_, fibs_, mct_, sct_, dataplane_,
                                            BinSelectionPolicy::parse(scenario_.policy),
                                            scenario_.seed ^ 0xc0ffeeULL);
  dataplane_.set_sink(control_.get());
  preload_hot_bins();
}

Simulation::~Simulation() = default;

void Simulation::preload_hot_bins() {
  const std::uint64_t mask = cfg_.signature_hash_bits >= 64
                                 ? ~std::uint64_t{0}
                                 : (std::uint64_t{1} << cfg_.signature_hash_bits) - 1;
  std::uint64_t counter = finalize64(scenario_.seed ^ 0x686f74ULL);
  for (const HotBin& h : scenario_.hot_bins) {
    const VipState& v = registry_.at(h.vip);
    const DipId dip = v.table.dip_at(h.bin);
    std::size_t placed = 0;
    while (placed < h.count) {
      const Signature sig{h.vip, finalize64(counter++) & mask};
      if (v.table.bin_of(sig) != h.bin || sct_.find(sig) != nullptr) continue;
      sct_.ingest_syn1(sig, dip, h.bin, VirtualTime::zero());
      sct_.ingest_syn2(sig, VirtualTime::zero());
      ++placed;
    }
  }
}

void Simulation::handle(const SimEvent& ev) {
  ++events_;
  if (const auto* pe = std::get_if<PacketEvent>(&ev.payload)) {
    if (pe->packet.direction == Direction::kServerToClient) {
      dataplane_.process_return(pe->packet);
    } else {
      const ForwardResult r = dataplane_.process_packet(pe->packet);
      if (r.via != ForwardVia::kDropped) {
        if (pe->opens) {
          oracle_.open(pe->connection, pe->packet.key, r.signature, r.dip, ev.time);
        } else {
          oracle_.observe(pe->connection, r.dip, ev.time);
        }
      }
    }
    if (pe->closes) oracle_.close(pe->connection);
  } else {
    ++updates_seen_;
    control_->submit(std::get<UpdateEvent>(ev.payload).cmd, ev.time);
  }
  cpu_wake_ = control_->advance(ev.time);
}

void Simulation::sample(VirtualTime now) {
  MetricsFrame f;
  f.time = now;
  f.active_connections = oracle_.active();
  f.mct_occupancy = mct_.size();
  f.mct_fraction = f.active_connections == 0
                       ? 0.0
                       : static_cast<double>(f.mct_occupancy) /
                             static_cast<double>(f.active_connections);
  f.sct_size = sct_.size();
  f.fib_depths = fibs_.depths();
  f.trapped_syns_cum = control_->counters().trapped_syns;
  f.migrated_cum = control_->counters().migrated;
  f.pcc_violations_cum = oracle_.totals().violations;
  f.broken_by_collision_cum = oracle_.totals().broken_by_collision;
  frames_.push_back(f);
}

RunResult Simulation::run() {
  constexpr VirtualTime kNever = VirtualTime::max();
  const VirtualTime duration = scenario_.duration;
  VirtualTime next_poll = cfg_.poll_interval;
  VirtualTime next_probe = cfg_.probe_interval > VirtualTime::zero() ? cfg_.probe_interval : kNever;
  VirtualTime next_sample = VirtualTime::zero();
  VirtualTime now = VirtualTime::zero();

  for (;;) {
    const VirtualTime gen = generator_.peek_time().value_or(kNever);
    const VirtualTime wake = cpu_wake_.value_or(kNever);
    const VirtualTime t = std::min({gen, wake, next_poll, next_probe, next_sample});

    const bool past_end = t > duration;
    if (scenario_.stop_when_idle && updates_seen_ >= scenario_.updates.size() &&
        !control_->updates_outstanding()) {
      break;
    }
    if (past_end && (!control_->updates_outstanding() || t > duration + kDrainLimit)) break;
    if (t == kNever) break;
    now = t;

    if (wake == t || next_poll == t || next_probe == t) {
      if (next_poll == t) {
        control_->request_poll();
        next_poll += cfg_.poll_interval;
      }
      if (next_probe == t) {
        control_->request_probe();
        next_probe += cfg_.probe_interval;
      }
      cpu_wake_ = control_->advance(t);
      continue;
    }
    if (gen == t) {
      handle(*generator_.next());
      continue;
    }
    sample(t);
    next_sample += scenario_.sample_interval;
  }
  return finish(now);
}

RunResult Simulation::finish(VirtualTime end) {
  RunResult r;
  r.frames = std::move(frames_);
  r.updates = control_->reports();
  r.end_time = end;
  r.events = events_;
  r.connections = generator_.connections_started();
  r.pcc_violations = oracle_.totals().violations;
  r.broken_by_collision = oracle_.totals().broken_by_collision;
  r.invariant_failures = control_->invariant_failures();

  std::size_t steady = 0;
  double frac = 0.0, occ = 0.0, active = 0.0;
  for (const auto& f : r.frames) {
    r.mct_integral += static_cast<double>(f.mct_occupancy) * to_seconds(scenario_.sample_interval);
    if (f.time < scenario_.warmup) continue;
    ++steady;
    frac += f.mct_fraction;
    occ += static_cast<double>(f.mct_occupancy);
    active += static_cast<double>(f.active_connections);
  }
  if (steady > 0) {
    r.mct_fraction_mean = frac / static_cast<double>(steady);
    r.mct_occupancy_mean = occ / static_cast<double>(steady);
    r.active_connections_mean = active / static_cast<double>(steady);
  }

  double migrated = 0.0, duration_ms = 0.0, second = 0.0;
  std::size_t bins = 0;
  for (const auto& u : r.updates) {
    if (u.aborted) r.mct_overflow = true;
    if (u.rejected || u.aborted) continue;
    ++r.completed_updates;
    migrated += static_cast<double>(u.migrated);
    duration_ms += to_millis(u.duration());
    r.max_rounds = std::max(r.max_rounds, u.max_rounds());
    for (const auto& b : u.bins) {
      if (b.rounds.empty()) continue;
      second += static_cast<double>(b.rounds.front().next_count);
      ++bins;
    }
  }
  if (r.completed_updates > 0) {
    r.migrated_per_update = migrated / static_cast<double>(r.completed_updates);
    r.mean_update_ms = duration_ms / static_cast<double>(r.completed_updates);
  }
  if (bins > 0) r.mean_second_round = second / static_cast<double>(bins);
  r.exit_status = (r.mct_overflow || !r.invariant_failures.empty()) ? 1 : 0;

  SummaryDocument& d = r.summary;
  d.section("run");
  d.set("status", r.mct_overflow ? "mct_overflow"
                  : !r.invariant_failures.empty() ? "invariant_failure"
                                                  : "ok");
  d.set("exit_status", static_cast<std::int64_t>(r.exit_status));
  d.set("seed", scenario_.seed);
  d.set("policy", control_->policy().name());
  d.set("virtual_end_ms", format_millis(end));
  d.set("events", r.events);
  d.set("connections", r.connections);
  d.set("frames", static_cast<std::uint64_t>(r.frames.size()));

  d.section("oracle");
  const PccTotals& o = oracle_.totals();
  d.set("pcc_violations", o.violations);
  d.set("broken_by_collision", o.broken_by_collision);
  d.set("violating_packets", o.violating_packets);
  d.set("packets_checked", o.packets_checked);
  d.set("connections_tracked", o.connections);
  d.set("colliding_connections", o.colliding_connections);
  d.set("first_dip_failed", o.first_dip_failed);
  d.set("active_at_end", static_cast<std::uint64_t>(oracle_.active()));
  for (std::size_t i = 0; i < oracle_.log().size() && i < 20; ++i) {
    const auto& v = oracle_.log()[i];
    d.set(fmt::format("violation.{}", i),
          fmt::format("{} {} expected={} actual={} collision={}", format_millis(v.time),
                      to_string(v.key), v.expected.value, v.actual.value, v.collision));
  }

  d.section("metrics");
  d.set("mct_fraction_normalization", "mct_occupancy / active_connections");
  d.set("warmup_ms", format_millis(scenario_.warmup));
  d.set("mct_fraction_mean", r.mct_fraction_mean);
  d.set("mct_occupancy_mean", r.mct_occupancy_mean);
  d.set("mct_integral", r.mct_integral);
  d.set("active_connections_mean", r.active_connections_mean);
  d.set("mct_size_at_end", static_cast<std::uint64_t>(mct_.size()));
  d.set("sct_size_at_end", static_cast<std::uint64_t>(sct_.size()));

  d.section("updates");
  d.set("submitted", static_cast<std::uint64_t>(r.updates.size()));
  d.set("completed", r.completed_updates);
  d.set("rejected", control_->counters().updates_rejected);
  d.set("aborted", control_->counters().mct_overflow_aborts);
  d.set("migrated_per_update", r.migrated_per_update);
  d.set("max_rounds", static_cast<std::uint64_t>(r.max_rounds));
  d.set("mean_second_round", r.mean_second_round);
  d.set("mean_duration_ms", r.mean_update_ms);

  const ControlPlaneCounters& c = control_->counters();
  d.section("control_plane");
  d.set("polls", c.polls);
  d.set("migration_polls", c.migration_polls);
  d.set("poll_entries", c.poll_entries);
  d.set("cpu_busy_ms", format_millis(c.cpu_busy));
  d.set("probes", c.probes);
  d.set("probe_inserted", c.probe_inserted);
  d.set("probe_alive", c.probe_alive);
  d.set("probe_dead_removed", c.probe_dead_removed);
  d.set("migrated_dead_removed", c.migrated_dead_removed);
  d.set("probe_skipped_full", c.probe_skipped_full);
  d.set("migrated", c.migrated);
  d.set("trapped_syns", c.trapped_syns);
  d.set("trap_mct_full", c.trap_mct_full);
  d.set("learn_overflow_handled", c.learn_overflow_handled);
  d.set("expansions", c.expansions);
  d.set("invariant_checks", c.invariant_checks);
  d.set("completeness_violations", c.completeness_violations);
  d.set("trap_violations", c.trap_violations);
  for (std::size_t i = 0; i < r.invariant_failures.size() && i < 20; ++i) {
    d.set(fmt::format("failure.{}", i), r.invariant_failures[i]);
  }

  const DataplaneCounters& dp = dataplane_.counters();
  d.section("dataplane");
  d.set("packets", dp.packets);
  d.set("mct_hits", dp.mct_hits);
  d.set("ecmp_forwards", dp.ecmp_forwards);
  d.set("trapped_syns", dp.trapped_syns);
  d.set("dropped_unknown_vip", dp.dropped_unknown_vip);
  d.set("learn_already_present", dp.learn_already_present);
  d.set("learn_overflow", dp.learn_overflow);
  d.set("return_packets", dp.return_packets);

  const SctCounters& sc = sct_.counters();
  d.section("sct");
  d.set("syn2_timeouts", sc.syn2_timeouts);
  d.set("orphan_pruned", sc.orphan_pruned);

  for (const auto& u : r.updates) {
    d.section(fmt::format("update.{}", u.id));
    d.set("kind", to_string(u.kind));
    d.set("vip", static_cast<std::uint64_t>(u.vip.value));
    d.set("submitted_ms", format_millis(u.submitted));
    d.set("started_ms", format_millis(u.started));
    d.set("finished_ms", format_millis(u.finished));
    d.set("duration_ms", format_millis(u.duration()));
    d.set("affected_bins", static_cast<std::uint64_t>(u.affected_bins));
    d.set("expansions", static_cast<std::uint64_t>(u.expansions));
    d.set("migrated", static_cast<std::uint64_t>(u.migrated));
    d.set("trapped_syns", static_cast<std::uint64_t>(u.trapped_syns));
    d.set("max_rounds", static_cast<std::uint64_t>(u.max_rounds()));
    d.set("aborted", u.aborted);
    d.set("rejected", u.rejected);
    if (!u.note.empty()) d.set("note", u.note);
    for (const auto& b : u.bins) {
      std::string rounds;
      for (const auto& rd : b.rounds) {
        if (!rounds.empty()) rounds += ';';
        rounds += fmt::format("{}:{}{}", rd.copy_count, rd.next_count, rd.trapped ? "t" : "");
      }
      d.set(fmt::format("bin.{}", b.bin),
            fmt::format("from={} to={} c1={} rounds={} migrated={} elapsed_ms={} counts={}",
                        b.from.value, b.to.value, b.initial_count, b.rounds.size(), b.migrated,
                        format_millis(b.elapsed()), rounds.empty() ? "-" : rounds));
    }
  }

  d.section("config");
  const std::string echo = render_scenario(scenario_);
  std::size_t start = 0;
  while (start < echo.size()) {
    const auto nl = echo.find('\n', start);
    const std::string line = echo.substr(start, nl - start);
    start = nl == std::string::npos ? echo.size() : nl + 1;
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) continue;
    d.set(line.substr(0, eq), line.substr(eq + 3));
  }

  r.csv = to_csv(r.frames);
  r.summary_text = d.render();
  return r;
}

RunResult run_scenario(const Scenario& scenario) {
  Simulation sim(scenario);
  return sim.run();
}

RunResult run_scenario(const Scenario& scenario, const std::filesystem::path& out_dir) {
  RunResult r = run_scenario(scenario);
  std::filesystem::create_directories(out_dir);
  write_file_atomic(out_dir / "metrics.csv", r.csv);
  write_file_atomic(out_dir / "summary.txt", r.summary_text);
  return r;
}

}  // namespace prism
