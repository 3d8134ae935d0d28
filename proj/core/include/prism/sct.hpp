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
#include <functional>
#include <optional>
#include <queue>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "prism/config.hpp"
#include "prism/types.hpp"

namespace prism {

enum class SctState : std::uint8_t { kHalfOpen, kActive, kHalfClosed, kOnlyFinReceived, kTest };

const char* to_string(SctState s);

struct SctEntry {
  Signature signature;
  DipId dip;
  BinIndex bin = 0;
  VirtualTime syn_time{};
  SctState state = SctState::kHalfOpen;
  std::uint32_t ref_count = 0;
  bool in_mct = false;
  bool probing = false;  // MCT copy is a liveness probe, not a migration
  bool fin1_seen = false;
  bool fin2_seen = false;
  VirtualTime fin_time{};
};

enum class SynOutcome { kNew, kRetransmit, kNewCollidingConnection };
enum class CloseKind { kFin1, kFin2, kRst };
enum class CloseOutcome { kHalfClosed, kDecremented, kRemoved, kOrphanFin };

const char* to_string(SynOutcome o);
const char* to_string(CloseOutcome o);

struct CloseResult {
  CloseOutcome outcome = CloseOutcome::kOrphanFin;
  std::optional<VirtualTime> lifetime;  // set when a connection closed
  std::optional<SctEntry> removed;      // the entry, when it left the table
};

struct SctCounters {
  std::uint64_t syn_new = 0;
  std::uint64_t syn_retransmit = 0;
  std::uint64_t syn_colliding = 0;
  std::uint64_t syn2_unknown = 0;
  std::uint64_t orphan_fins = 0;
  std::uint64_t orphan_resolved = 0;
  std::uint64_t syn2_timeouts = 0;
  std::uint64_t orphan_pruned = 0;
};

// Software connection table keyed by signature, with a per-bin index.
class Sct {
 public:
  explicit Sct(const SimConfig& cfg);

  SynOutcome ingest_syn1(const Signature& sig, DipId dip, BinIndex bin, VirtualTime now);
  // Returns false when the signature is unknown.
  bool ingest_syn2(const Signature& sig, VirtualTime now);
  CloseResult ingest_close(const Signature& sig, CloseKind kind, VirtualTime now);

  // Removes half-open entries past syn2_timeout and orphan FINs past one poll
  // interval. Returns what was removed.
  std::vector<SctEntry> expire(VirtualTime now);

  // Active entries not in the MCT older than multiplier x the VIP's mean lifetime.
  std::vector<Signature> find_suspects(
      VirtualTime now, const std::function<std::optional<double>(VipId)>& mean_lifetime,
      double multiplier) const;

  SctEntry* find(const Signature& sig);
  const SctEntry* find(const Signature& sig) const;
  std::optional<SctEntry> erase(const Signature& sig);

  // Signatures currently mapped to (vip, bin). Null when empty.
  const std::unordered_set<std::uint64_t>* bin_members(VipId vip, BinIndex bin) const;
  // Recomputes every entry's bin for a VIP whose table length changed.
  void rebin(VipId vip, std::size_t table_len);

  std::size_t size() const { return entries_.size(); }
  const SctCounters& counters() const { return counters_; }

  template <class F>
  void for_each(F&& f) const {
    for (const auto& [k, e] : entries_) f(e);
  }

 private:
  struct Deadline {
    VirtualTime at;
    std::uint64_t key;
    VirtualTime stamp;  // syn_time or fin_time the deadline was armed for
    bool operator>(const Deadline& o) const { return at > o.at; }
  };
  using DeadlineQueue =
      std::priority_queue<Deadline, std::vector<Deadline>, std::greater<Deadline>>;

  static std::uint64_t bin_key(VipId vip, BinIndex bin) {
    return (static_cast<std::uint64_t>(vip.value) << 32) | bin;
  }
  void index_add(const SctEntry& e);
  void index_remove(const SctEntry& e);
  CloseResult decrement(SctEntry& e, VirtualTime now);

  VirtualTime delta_;
  VirtualTime syn2_timeout_;
  VirtualTime orphan_timeout_;
  std::unordered_map<std::uint64_t, SctEntry> entries_;
  std::unordered_map<std::uint64_t, std::unordered_set<std::uint64_t>> by_bin_;
  DeadlineQueue half_open_;
  DeadlineQueue orphans_;
  SctCounters counters_;
};

}  // namespace prism
