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

#include "prism/pcc_oracle.hpp"

#include <algorithm>

namespace prism {

void PccOracle::mark_collided(Record& r) {
  if (r.collided) return;
  r.collided = true;
  ++totals_.colliding_connections;
}

void PccOracle::open(std::uint64_t connection, const ConnectionKey& key, const Signature& sig,
                     DipId dip, VirtualTime) {
  Record r{key, sig.packed(), dip, false, false};
  auto& peers = by_signature_[r.signature];
  if (!peers.empty()) {
    for (std::uint64_t other : peers) mark_collided(live_.at(other));
    mark_collided(r);
  }
  peers.push_back(connection);
  live_.emplace(connection, r);
  ++totals_.connections;
}

void PccOracle::observe(std::uint64_t connection, DipId dip, VirtualTime now) {
  auto it = live_.find(connection);
  if (it == live_.end()) return;
  Record& r = it->second;
  ++totals_.packets_checked;
  if (dip == r.dip) return;
  if (!registry_.dip_alive(r.dip)) {
    ++totals_.first_dip_failed;
    return;
  }
  ++totals_.violating_packets;
  if (r.broken) return;
  r.broken = true;
  ++totals_.violations;
  if (r.collided) ++totals_.broken_by_collision;
  if (log_.size() < kMaxLogged) log_.push_back(PccViolation{now, r.key, r.dip, dip, r.collided});
}

void PccOracle::close(std::uint64_t connection) {
  auto it = live_.find(connection);
  if (it == live_.end()) return;
  auto peers = by_signature_.find(it->second.signature);
  auto& ids = peers->second;
  ids.erase(std::find(ids.begin(), ids.end(), connection));
  if (ids.empty()) by_signature_.erase(peers);
  live_.erase(it);
}

}  // namespace prism
