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
#include <memory>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "prism/config.hpp"
#include "prism/ecmp.hpp"
#include "prism/types.hpp"

namespace prism {

// Running per-VIP statistics gathered by the control plane.
struct VipStats {
  double mean_lifetime_s = 0.0;
  std::uint64_t lifetime_samples = 0;
  double syn_rate = 0.0;  // SYNs per second, smoothed
  bool has_syn_rate = false;

  void record_lifetime(double seconds, double alpha);
  void record_syn_rate(double per_second, double alpha);
  std::optional<double> mean_lifetime() const {
    if (lifetime_samples == 0) return std::nullopt;
    return mean_lifetime_s;
  }
};

struct VipState {
  VipId id;
  std::uint32_t address = 0;
  EcmpTable table;
  DipPool pool;
  VipStats stats;
  bool accepting = true;
  std::vector<DipId> ordinals;  // every DIP ever created for this VIP, in order
};

class VipRegistry {
 public:
  static constexpr std::size_t kMaxVips = std::size_t{1} << 16;

  // Registers a VIP with a fresh pool of `dip_count` equally weighted DIPs.
  VipId add_vip(std::uint32_t address, std::size_t dip_count, std::size_t ecmp_length);
  // New SYNs for the VIP are rejected afterwards; existing state stays.
  void remove_vip(VipId vip);

  std::optional<VipId> find(std::uint32_t address) const;
  VipState& at(VipId vip);
  const VipState& at(VipId vip) const;
  std::size_t size() const { return vips_.size(); }

  DipId allocate_dip() { return DipId{next_dip_++}; }
  bool dip_alive(DipId dip) const { return failed_.count(dip.value) == 0; }
  void mark_failed(DipId dip) { failed_.insert(dip.value); }

  template <class F>
  void for_each(F&& f) {
    for (auto& v : vips_) f(*v);
  }
  template <class F>
  void for_each(F&& f) const {
    for (const auto& v : vips_) f(*v);
  }

 private:
  std::vector<std::unique_ptr<VipState>> vips_;
  std::unordered_map<std::uint32_t, VipId> by_address_;
  std::unordered_set<std::uint32_t> failed_;
  std::uint32_t next_dip_ = 1;
};

// Throws Error(kUnknownVip) when key.dst_ip is not registered.
Signature compute_signature(const ConnectionKey& key, const VipRegistry& registry,
                            const SimConfig& cfg);

}  // namespace prism
