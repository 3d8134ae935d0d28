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

#include "prism/vip_registry.hpp"

#include <string>

#include "prism/error.hpp"
#include "prism/hashing.hpp"

namespace prism {

void VipStats::record_lifetime(double seconds, double alpha) {
  if (lifetime_samples == 0) {
    mean_lifetime_s = seconds;
  } else {
    mean_lifetime_s += alpha * (seconds - mean_lifetime_s);
  }
  ++lifetime_samples;
}

void VipStats::record_syn_rate(double per_second, double alpha) {
  if (!has_syn_rate) {
    syn_rate = per_second;
    has_syn_rate = true;
  } else {
    syn_rate += alpha * (per_second - syn_rate);
  }
}

VipId VipRegistry::add_vip(std::uint32_t address, std::size_t dip_count,
                           std::size_t ecmp_length) {
  if (vips_.size() >= kMaxVips) {
    throw Error(ErrorCode::kCapacityExceeded, "VIP id space exhausted");
  }
  if (by_address_.count(address) != 0) {
    throw Error(ErrorCode::kAlreadyPresent, "VIP address already registered");
  }
  if (dip_count == 0) throw Error(ErrorCode::kEmptyTable, "VIP needs at least one DIP");
  auto state = std::make_unique<VipState>();
  state->id = VipId{static_cast<std::uint16_t>(vips_.size())};
  state->address = address;
  std::vector<DipId> dips;
  for (std::size_t i = 0; i < dip_count; ++i) dips.push_back(allocate_dip());
  state->ordinals = dips;
  state->pool = DipPool::equal(dips);
  state->table = build_table(state->id, state->pool, ecmp_length);
  const VipId id = state->id;
  by_address_[address] = id;
  vips_.push_back(std::move(state));
  return id;
}

void VipRegistry::remove_vip(VipId vip) { at(vip).accepting = false; }

std::optional<VipId> VipRegistry::find(std::uint32_t address) const {
  auto it = by_address_.find(address);
  if (it == by_address_.end()) return std::nullopt;
  return it->second;
}

VipState& VipRegistry::at(VipId vip) {
  if (vip.value >= vips_.size()) {
    throw Error(ErrorCode::kUnknownVip, "VIP id " + std::to_string(vip.value));
  }
  return *vips_[vip.value];
}

const VipState& VipRegistry::at(VipId vip) const {
  if (vip.value >= vips_.size()) {
    throw Error(ErrorCode::kUnknownVip, "VIP id " + std::to_string(vip.value));
  }
  return *vips_[vip.value];
}

Signature compute_signature(const ConnectionKey& key, const VipRegistry& registry,
                            const SimConfig& cfg) {
  const auto vip = registry.find(key.dst_ip);
  if (!vip) throw Error(ErrorCode::kUnknownVip, "destination is not a registered VIP");
  return make_signature(*vip, key_digest(key), cfg.signature_hash_bits);
}

}  // namespace prism
