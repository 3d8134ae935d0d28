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

#include "prism/dataplane.hpp"

#include "prism/hashing.hpp"

namespace prism {

const char* to_string(ForwardVia via) {
  switch (via) {
    case ForwardVia::kMctHit: return "MctHit";
    case ForwardVia::kEcmpBin: return "EcmpBin";
    case ForwardVia::kTrappedToSoftware: return "TrappedToSoftware";
    case ForwardVia::kDropped: return "Dropped";
  }
  return "Unknown";
}

Dataplane::Dataplane(const SimConfig& cfg, VipRegistry& registry, FibSet& fibs, Mct& mct)
    : cfg_(cfg), registry_(registry), fibs_(fibs), mct_(mct) {}

void Dataplane::learn(FibKind kind, const Signature& sig, VirtualTime now) {
  switch (fibs_[kind].learn(sig, now)) {
    case InsertResult::kInserted:
      break;
    case InsertResult::kAlreadyPresent:
      ++counters_.learn_already_present;
      break;
    case InsertResult::kFull:
      ++counters_.learn_overflow;
      if (sink_ != nullptr) sink_->on_learn_overflow(kind, sig, now);
      break;
  }
}

ForwardResult Dataplane::process_packet(const Packet& pkt) {
  ++counters_.packets;
  ForwardResult out;
  const auto vip = registry_.find(pkt.key.dst_ip);
  if (!vip || (pkt.flag == PacketFlag::kSyn && !registry_.at(*vip).accepting)) {
    ++counters_.dropped_unknown_vip;
    return out;
  }
  const VipState& state = registry_.at(*vip);
  out.signature = make_signature(*vip, key_digest(pkt.key), cfg_.signature_hash_bits);
  out.bin = state.table.bin_of(out.signature);

  const bool trap = pkt.flag == PacketFlag::kSyn && trapped(*vip, out.bin);
  switch (pkt.flag) {
    case PacketFlag::kSyn:
      learn(FibKind::kSyn1, out.signature, pkt.arrival);
      break;
    case PacketFlag::kFin:
      learn(FibKind::kFin1, out.signature, pkt.arrival);
      break;
    case PacketFlag::kRst:
      learn(FibKind::kRst1, out.signature, pkt.arrival);
      break;
    case PacketFlag::kSynAck:
    case PacketFlag::kData:
      break;
  }

  if (trap) {
    // The software pins the connection before the bin is rewritten.
    const DipId old_dip = state.table.dip_at(out.bin);
    ++counters_.trapped_syns;
    if (sink_ != nullptr) sink_->on_trapped_syn(out.signature, out.bin, old_dip, pkt.arrival);
    if (auto hit = mct_.lookup_and_touch(out.signature)) {
      out.dip = *hit;
    } else {
      out.dip = old_dip;
    }
    out.via = ForwardVia::kTrappedToSoftware;
    out.delay = cfg_.trap_delay;
    return out;
  }

  if (auto hit = mct_.lookup_and_touch(out.signature)) {
    ++counters_.mct_hits;
    out.dip = *hit;
    out.via = ForwardVia::kMctHit;
    return out;
  }
  ++counters_.ecmp_forwards;
  out.dip = state.table.dip_at(out.bin);
  out.via = ForwardVia::kEcmpBin;
  return out;
}

void Dataplane::process_return(const Packet& pkt) {
  ++counters_.return_packets;
  const auto vip = registry_.find(pkt.key.dst_ip);
  if (!vip) return;
  const Signature sig = make_signature(*vip, key_digest(pkt.key), cfg_.signature_hash_bits);
  switch (pkt.flag) {
    case PacketFlag::kSynAck:
      learn(FibKind::kSyn2, sig, pkt.arrival);
      break;
    case PacketFlag::kFin:
      learn(FibKind::kFin2, sig, pkt.arrival);
      break;
    case PacketFlag::kRst:
      learn(FibKind::kRst2, sig, pkt.arrival);
      break;
    case PacketFlag::kSyn:
    case PacketFlag::kData:
      break;
  }
}

void Dataplane::enable_trap(VipId vip, BinIndex bin, std::uint64_t token) {
  traps_[bin_key(vip, bin)] = token;
}

void Dataplane::disable_trap(VipId vip, BinIndex bin, std::uint64_t token) {
  auto it = traps_.find(bin_key(vip, bin));
  if (it != traps_.end() && it->second == token) traps_.erase(it);
}

bool Dataplane::trapped(VipId vip, BinIndex bin) const {
  return !traps_.empty() && traps_.count(bin_key(vip, bin)) != 0;
}

}  // namespace prism
