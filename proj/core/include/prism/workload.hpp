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
#include <array>
#include <optional>
#include <queue>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "prism/config.hpp"
#include "prism/control_plane.hpp"
#include "prism/dataplane.hpp"
#include "prism/random.hpp"
#include "prism/types.hpp"

namespace prism {

struct LifetimeDist {
  enum class Kind { kUniform, kLogNormal, kFixed };
  Kind kind = Kind::kUniform;
  double a = 1.0;  // uniform low, lognormal mu, fixed value
  double b = 10.0; // uniform high, lognormal sigma

  double mean() const;
  double sample(Rng& rng) const;
  // Same shape, new mean.
  LifetimeDist with_mean(double mean_s) const;
  std::string describe() const;
  // "uniform a b", "lognormal mu sigma" or "fixed x", in seconds.
  static LifetimeDist parse(std::string_view text);
};

struct ScheduledUpdate {
  VirtualTime at{};
  PoolUpdateCommand cmd;
};

// Synthetic signatures injected into one bin before the run starts.
struct HotBin {
  VipId vip;
  BinIndex bin = 0;
  std::size_t count = 0;
};

struct Scenario {
  std::size_t vips = 1;
  std::vector<std::size_t> dips_per_vip{10};  // one value applies to every VIP
  std::optional<std::size_t> ecmp_length;     // default: next power of two of K * dips
  double arrival_rate = 1000.0;               // SYNs per second over all VIPs
  std::vector<double> vip_arrival_rates;      // per-VIP rates; overrides arrival_rate
  LifetimeDist lifetime;
  double data_packet_rate = 1.0;              // per connection, per second
  VirtualTime rtt = from_millis(1);
  double rst_fraction = 0.0;
  double dead_client_fraction = 0.0;
  double syn_retx_fraction = 0.0;       // duplicate SYN inside the delta window
  double syn_retx_late_fraction = 0.0;  // duplicate SYN after the delta window
  VirtualTime duration = from_seconds(10);
  std::uint64_t seed = 1;

  double update_rate = 0.0;  // random pool updates per second
  std::vector<UpdateKind> update_kinds{UpdateKind::kReplace};
  std::vector<ScheduledUpdate> updates;

  std::string policy = "expected_load";
  VirtualTime warmup{};
  std::vector<HotBin> hot_bins;
  bool stop_when_idle = false;
  VirtualTime sample_interval = from_millis(100);

  SimConfig config;

  std::size_t dips_for(std::size_t vip) const;
  std::size_t ecmp_length_for(std::size_t vip) const;
  double rate_for(std::size_t vip) const;
  double total_rate() const;
  // Throws Error(kConfigError).
  void validate() const;
};

// 10.100.0.0 plus the VIP index.
constexpr std::uint32_t vip_address(std::size_t index) {
  return 0x0A640000u + static_cast<std::uint32_t>(index);
}

struct PacketEvent {
  Packet packet;
  std::uint64_t connection = 0;
  bool opens = false;   // first packet of the connection
  bool closes = false;  // last packet of the connection
};

struct UpdateEvent {
  PoolUpdateCommand cmd;
};

struct SimEvent {
  VirtualTime time{};
  std::uint64_t seq = 0;
  std::variant<PacketEvent, UpdateEvent> payload;
};

// Lazily merges every connection's packet schedule, the arrival process and
// the update schedule into one time-ordered stream.
class TrafficGenerator {
 public:
  explicit TrafficGenerator(const Scenario& scenario);

  std::optional<SimEvent> next();
  std::optional<VirtualTime> peek_time() const;

  std::uint64_t connections_started() const { return next_connection_; }
  std::uint64_t events_emitted() const { return seq_; }

 private:
  enum class Milestone : std::uint8_t { kSyn, kSynAck, kSynRetx, kFinClient, kFinServer, kRst };
  static constexpr std::size_t kMaxMilestones = 6;

  struct Connection {
    ConnectionKey key;
    std::uint64_t id = 0;
    std::array<std::pair<VirtualTime, Milestone>, kMaxMilestones> milestones{};
    std::uint8_t count = 0;
    std::uint8_t cursor = 0;
    VirtualTime next_data{};
    VirtualTime data_interval{};
    VirtualTime data_end{};
    bool live = false;
  };

  enum class Source : std::uint8_t { kConnection, kArrival, kRandomUpdate, kScheduledUpdate };

  struct Item {
    VirtualTime at;
    std::uint64_t order;
    Source source;
    std::uint32_t index;
    bool operator>(const Item& o) const {
      if (at != o.at) return at > o.at;
      return order > o.order;
    }
  };

  void push(VirtualTime at, Source source, std::uint32_t index);
  std::uint32_t open_connection(VirtualTime now, std::size_t vip);
  std::optional<VirtualTime> next_time(const Connection& c) const;
  SimEvent emit_connection_event(std::uint32_t slot, VirtualTime at);
  std::size_t pick_vip();

  const Scenario scenario_;
  Rng rng_;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap_;
  std::vector<Connection> slab_;
  std::vector<std::uint32_t> free_;
  std::vector<double> cumulative_rates_;
  double total_rate_ = 0.0;
  std::uint64_t key_offset_ = 0;  // keys stay injective below 2^40 connections
  std::uint64_t order_ = 0;
  std::uint64_t seq_ = 0;
  std::uint64_t next_connection_ = 0;
};

}  // namespace prism
