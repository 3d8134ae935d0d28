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
#include <unordered_map>
#include <vector>

#include "prism/types.hpp"
#include "prism/vip_registry.hpp"

namespace prism {

struct PccViolation {
  VirtualTime time{};
  ConnectionKey key;
  DipId expected;
  DipId actual;
  bool collision = false;  // the connection shared its signature with another live one
};

struct PccTotals {
  std::uint64_t connections = 0;
  std::uint64_t packets_checked = 0;
  std::uint64_t violations = 0;           // broken connections, counted once each
  std::uint64_t broken_by_collision = 0;  // subset of violations
  std::uint64_t violating_packets = 0;
  std::uint64_t colliding_connections = 0;
  std::uint64_t first_dip_failed = 0;     // packets exempt because their DIP failed
};

// Ground truth for per-connection consistency. Remembers the DIP that received
// each connection's first packet and flags any later packet sent elsewhere
// while that DIP is alive.
class PccOracle {
 public:
  explicit PccOracle(const VipRegistry& registry) : registry_(registry) {}

  void open(std::uint64_t connection, const ConnectionKey& key, const Signature& sig, DipId dip,
            VirtualTime now);
  void observe(std::uint64_t connection, DipId dip, VirtualTime now);
  void close(std::uint64_t connection);

  std::size_t active() const { return live_.size(); }
  const PccTotals& totals() const { return totals_; }
  const std::vector<PccViolation>& log() const { return log_; }

  static constexpr std::size_t kMaxLogged = 1000;

 private:
  struct Record {
    ConnectionKey key;
    std::uint64_t signature = 0;
    DipId dip;
    bool collided = false;
    bool broken = false;
  };

  void mark_collided(Record& r);

  const VipRegistry& registry_;
  std::unordered_map<std::uint64_t, Record> live_;
  std::unordered_map<std::uint64_t, std::vector<std::uint64_t>> by_signature_;
  PccTotals totals_;
  std::vector<PccViolation> log_;
};

}  // namespace prism
