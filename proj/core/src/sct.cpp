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

#include "prism/sct.hpp"

#include <algorithm>

#include "prism/hashing.hpp"

namespace prism {

const char* to_string(SctState s) {
  switch (s) {
    case SctState::kHalfOpen: return "HalfOpen";
    case SctState::kActive: return "Active";
    case SctState::kHalfClosed: return "HalfClosed";
    case SctState::kOnlyFinReceived: return "OnlyFinReceived";
    case SctState::kTest: return "Test";
  }
  return "Unknown";
}

const char* to_string(SynOutcome o) {
  switch (o) {
    case SynOutcome::kNew: return "New";
    case SynOutcome::kRetransmit: return "Retransmit";
    case SynOutcome::kNewCollidingConnection: return "NewCollidingConnection";
  }
  return "Unknown";
}

const char* to_string(CloseOutcome o) {
  switch (o) {
    case CloseOutcome::kHalfClosed: return "HalfClosed";
    case CloseOutcome::kDecremented: return "Decremented";
    case CloseOutcome::kRemoved: return "Removed";
    case CloseOutcome::kOrphanFin: return "OrphanFin";
  }
  return "Unknown";
}

Sct::Sct(const SimConfig& cfg)
    : delta_(cfg.delta_window),
      syn2_timeout_(cfg.syn2_timeout),
      orphan_timeout_(cfg.poll_interval) {}

void Sct::index_add(const SctEntry& e) {
  by_bin_[bin_key(e.signature.vip_id, e.bin)].insert(e.signature.packed());
}

void Sct::index_remove(const SctEntry& e) {
  auto it = by_bin_.find(bin_key(e.signature.vip_id, e.bin));
  if (it == by_bin_.end()) return;
  it->second.erase(e.signature.packed());
  if (it->second.empty()) by_bin_.erase(it);
}

SynOutcome Sct::ingest_syn1(const Signature& sig, DipId dip, BinIndex bin, VirtualTime now) {
  const std::uint64_t key = sig.packed();
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    SctEntry e;
    e.signature = sig;
    e.dip = dip;
    e.bin = bin;
    e.syn_time = now;
    e.state = SctState::kHalfOpen;
    e.ref_count = 1;
    entries_.emplace(key, e);
    index_add(e);
    half_open_.push(Deadline{now + syn2_timeout_, key, now});
    ++counters_.syn_new;
    return SynOutcome::kNew;
  }
  SctEntry& e = it->second;
  if (e.state == SctState::kOnlyFinReceived) {
    // A FIN was seen before this SYN was ingested. Order by record time.
    ++counters_.orphan_resolved;
    const bool syn_first = now <= e.fin_time;
    const bool closed = e.fin1_seen && e.fin2_seen;
    if (syn_first && closed) {
      entries_.erase(it);
      return SynOutcome::kNew;
    }
    e.dip = dip;
    e.bin = bin;
    e.syn_time = now;
    e.ref_count = 1;
    if (syn_first) {
      e.state = SctState::kHalfClosed;
    } else {
      e.state = SctState::kHalfOpen;
      e.fin1_seen = e.fin2_seen = false;
      half_open_.push(Deadline{now + syn2_timeout_, key, now});
    }
    index_add(e);
    return SynOutcome::kNew;
  }
  if (now - e.syn_time < delta_) {
    ++counters_.syn_retransmit;
    return SynOutcome::kRetransmit;
  }
  ++e.ref_count;
  e.syn_time = now;
  if (e.state == SctState::kHalfOpen) half_open_.push(Deadline{now + syn2_timeout_, key, now});
  ++counters_.syn_colliding;
  return SynOutcome::kNewCollidingConnection;
}

bool Sct::ingest_syn2(const Signature& sig, VirtualTime /*now*/) {
  auto it = entries_.find(sig.packed());
  if (it == entries_.end() || it->second.state == SctState::kOnlyFinReceived) {
    ++counters_.syn2_unknown;
    return false;
  }
  if (it->second.state == SctState::kHalfOpen) it->second.state = SctState::kActive;
  return true;
}

CloseResult Sct::decrement(SctEntry& e, VirtualTime now) {
  CloseResult r;
  r.lifetime = now - e.syn_time;
  e.fin1_seen = e.fin2_seen = false;
  if (e.ref_count > 0) --e.ref_count;
  if (e.ref_count == 0) {
    r.outcome = CloseOutcome::kRemoved;
    r.removed = e;
    index_remove(e);
    entries_.erase(e.signature.packed());
    return r;
  }
  if (e.state != SctState::kTest) e.state = SctState::kActive;
  r.outcome = CloseOutcome::kDecremented;
  return r;
}

CloseResult Sct::ingest_close(const Signature& sig, CloseKind kind, VirtualTime now) {
  const std::uint64_t key = sig.packed();
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    SctEntry e;
    e.signature = sig;
    e.state = SctState::kOnlyFinReceived;
    e.fin1_seen = kind != CloseKind::kFin2;
    e.fin2_seen = kind != CloseKind::kFin1;
    e.fin_time = now;
    entries_.emplace(key, e);
    orphans_.push(Deadline{now + orphan_timeout_, key, now});
    ++counters_.orphan_fins;
    return CloseResult{CloseOutcome::kOrphanFin, std::nullopt, std::nullopt};
  }
  SctEntry& e = it->second;
  if (e.state == SctState::kOnlyFinReceived) {
    e.fin1_seen = e.fin1_seen || kind != CloseKind::kFin2;
    e.fin2_seen = e.fin2_seen || kind != CloseKind::kFin1;
    return CloseResult{CloseOutcome::kOrphanFin, std::nullopt, std::nullopt};
  }
  if (kind == CloseKind::kRst) return decrement(e, now);
  bool& mine = kind == CloseKind::kFin1 ? e.fin1_seen : e.fin2_seen;
  const bool other = kind == CloseKind::kFin1 ? e.fin2_seen : e.fin1_seen;
  if (other) return decrement(e, now);
  mine = true;
  e.fin_time = now;
  if (e.state != SctState::kTest) e.state = SctState::kHalfClosed;
  return CloseResult{CloseOutcome::kHalfClosed, std::nullopt, std::nullopt};
}

std::vector<SctEntry> Sct::expire(VirtualTime now) {
  std::vector<SctEntry> removed;
  while (!half_open_.empty() && half_open_.top().at <= now) {
    const Deadline d = half_open_.top();
    half_open_.pop();
    auto it = entries_.find(d.key);
    if (it == entries_.end() || it->second.state != SctState::kHalfOpen ||
        it->second.syn_time != d.stamp) {
      continue;
    }
    removed.push_back(it->second);
    index_remove(it->second);
    entries_.erase(it);
    ++counters_.syn2_timeouts;
  }
  while (!orphans_.empty() && orphans_.top().at <= now) {
    const Deadline d = orphans_.top();
    orphans_.pop();
    auto it = entries_.find(d.key);
    if (it == entries_.end() || it->second.state != SctState::kOnlyFinReceived ||
        it->second.fin_time != d.stamp) {
      continue;
    }
    removed.push_back(it->second);
    entries_.erase(it);
    ++counters_.orphan_pruned;
  }
  return removed;
}

std::vector<Signature> Sct::find_suspects(
    VirtualTime now, const std::function<std::optional<double>(VipId)>& mean_lifetime,
    double multiplier) const {
  std::vector<Signature> out;
  std::unordered_map<std::uint16_t, std::optional<double>> cache;
  for (const auto& [key, e] : entries_) {
    if (e.state != SctState::kActive || e.in_mct) continue;
    auto c = cache.find(e.signature.vip_id.value);
    if (c == cache.end()) {
      c = cache.emplace(e.signature.vip_id.value, mean_lifetime(e.signature.vip_id)).first;
    }
    if (!c->second) continue;
    if (to_seconds(now - e.syn_time) > multiplier * *c->second) out.push_back(e.signature);
  }
  std::sort(out.begin(), out.end());
  return out;
}

SctEntry* Sct::find(const Signature& sig) {
  auto it = entries_.find(sig.packed());
  return it == entries_.end() ? nullptr : &it->second;
}

const SctEntry* Sct::find(const Signature& sig) const {
  auto it = entries_.find(sig.packed());
  return it == entries_.end() ? nullptr : &it->second;
}

std::optional<SctEntry> Sct::erase(const Signature& sig) {
  auto it = entries_.find(sig.packed());
  if (it == entries_.end()) return std::nullopt;
  SctEntry e = it->second;
  if (e.state != SctState::kOnlyFinReceived) index_remove(e);
  entries_.erase(it);
  return e;
}

const std::unordered_set<std::uint64_t>* Sct::bin_members(VipId vip, BinIndex bin) const {
  auto it = by_bin_.find(bin_key(vip, bin));
  return it == by_bin_.end() ? nullptr : &it->second;
}

void Sct::rebin(VipId vip, std::size_t table_len) {
  for (auto& [key, e] : entries_) {
    if (e.signature.vip_id != vip || e.state == SctState::kOnlyFinReceived) continue;
    index_remove(e);
    e.bin = ecmp_hash(e.signature, table_len);
    index_add(e);
  }
}

}  // namespace prism
