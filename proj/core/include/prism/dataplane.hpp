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
#include <optional>
#include <unordered_map>

#include "prism/config.hpp"
#include "prism/fib_table.hpp"
#include "prism/mct.hpp"
#include "prism/types.hpp"
#include "prism/vip_registry.hpp"

namespace prism {

enum class PacketFlag : std::uint8_t { kSyn, kSynAck, kFin, kRst, kData };
enum class Direction : std::uint8_t { kClientToServer, kServerToClient };

struct Packet {
  ConnectionKey key;
  PacketFlag flag = PacketFlag::kData;
  Direction direction = Direction::kClientToServer;
  VirtualTime arrival{};
  std::optional<DipId> source_dip;  // set on the return path
};

enum class ForwardVia : std::uint8_t { kMctHit, kEcmpBin, kTrappedToSoftware, kDropped };

const char* to_string(ForwardVia via);

struct ForwardResult {
  DipId dip;
  ForwardVia via = ForwardVia::kDropped;
  BinIndex bin = 0;
  Signature signature;
  VirtualTime delay{};  // extra forwarding latency for trapped SYNs
};

// Receives the packets the hardware hands to software.
class SoftwareSink {
 public:
  virtual ~SoftwareSink() = default;
  // A SYN for a bin in trap mode. `dip` is the bin's current (old) DIP.
  virtual void on_trapped_syn(const Signature& sig, BinIndex bin, DipId dip,
                              VirtualTime now) = 0;
  // A learn that found its FIB table full.
  virtual void on_learn_overflow(FibKind kind, const Signature& sig, VirtualTime now) = 0;
};

struct DataplaneCounters {
  std::uint64_t packets = 0;
  std::uint64_t mct_hits = 0;
  std::uint64_t ecmp_forwards = 0;
  std::uint64_t trapped_syns = 0;
  std::uint64_t dropped_unknown_vip = 0;
  std::uint64_t learn_already_present = 0;
  std::uint64_t learn_overflow = 0;
  std::uint64_t return_packets = 0;
};

class Dataplane {
 public:
  Dataplane(const SimConfig& cfg, VipRegistry& registry, FibSet& fibs, Mct& mct);

  void set_sink(SoftwareSink* sink) { sink_ = sink; }

  ForwardResult process_packet(const Packet& pkt);
  void process_return(const Packet& pkt);

  // Trap mode for one bin, tagged with the migration that owns it.
  void enable_trap(VipId vip, BinIndex bin, std::uint64_t token);
  void disable_trap(VipId vip, BinIndex bin, std::uint64_t token);
  bool trapped(VipId vip, BinIndex bin) const;

  const DataplaneCounters& counters() const { return counters_; }

 private:
  void learn(FibKind kind, const Signature& sig, VirtualTime now);
  static std::uint64_t bin_key(VipId vip, BinIndex bin) {
    return (static_cast<std::uint64_t>(vip.value) << 32) | bin;
  }

  const SimConfig& cfg_;
  VipRegistry& registry_;
  FibSet& fibs_;
  Mct& mct_;
  SoftwareSink* sink_ = nullptr;
  std::unordered_map<std::uint64_t, std::uint64_t> traps_;
  DataplaneCounters counters_;
};

}  // namespace prism
