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

#include "prism/workload.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "prism/error.hpp"

namespace prism {

double LifetimeDist::mean() const {
  switch (kind) {
    case Kind::kUniform:
      return (a + b) / 2.0;
    case Kind::kLogNormal:
      return std::exp(a + b * b / 2.0);
    case Kind::kFixed:
      return a;
  }
  return a;
}

double LifetimeDist::sample(Rng& rng) const {
  switch (kind) {
    case Kind::kUniform:
      return rng.uniform(a, b);
    case Kind::kLogNormal:
      return std::exp(a + b * rng.normal());
    case Kind::kFixed:
      return a;
  }
  return a;
}

LifetimeDist LifetimeDist::with_mean(double mean_s) const {
  LifetimeDist d = *this;
  const double m = mean();
  switch (kind) {
    case Kind::kUniform:
      d.a = a * mean_s / m;
      d.b = b * mean_s / m;
      break;
    case Kind::kLogNormal:
      d.a = a + std::log(mean_s / m);
      break;
    case Kind::kFixed:
      d.a = mean_s;
      break;
  }
  return d;
}

std::string LifetimeDist::describe() const {
  switch (kind) {
    case Kind::kUniform:
      return fmt::format("uniform {} {}", a, b);
    case Kind::kLogNormal:
      return fmt::format("lognormal {} {}", a, b);
    case Kind::kFixed:
      return fmt::format("fixed {}", a);
  }
  return "";
}

LifetimeDist LifetimeDist::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string name;
  in >> name;
  LifetimeDist d;
  if (name == "uniform") {
    d.kind = Kind::kUniform;
    if (!(in >> d.a >> d.b) || d.a < 0.0 || d.b < d.a) {
      throw Error(ErrorCode::kConfigError, "uniform needs 0 <= a <= b");
    }
  } else if (name == "lognormal") {
    d.kind = Kind::kLogNormal;
    if (!(in >> d.a >> d.b) || d.b < 0.0) {
      throw Error(ErrorCode::kConfigError, "lognormal needs mu and sigma >= 0");
    }
  } else if (name == "fixed") {
    d.kind = Kind::kFixed;
    if (!(in >> d.a) || d.a < 0.0) throw Error(ErrorCode::kConfigError, "fixed needs x >= 0");
    d.b = 0.0;
  } else {
    throw Error(ErrorCode::kConfigError, "unknown lifetime distribution '" + name + "'");
  }
  std::string extra;
  if (in >> extra) throw Error(ErrorCode::kConfigError, "trailing text in lifetime: " + extra);
  return d;
}

std::size_t Scenario::dips_for(std::size_t vip) const {
  return dips_per_vip.size() == 1 ? dips_per_vip[0] : dips_per_vip.at(vip);
}

std::size_t Scenario::ecmp_length_for(std::size_t vip) const {
  if (ecmp_length) return *ecmp_length;
  std::size_t want = std::max<std::size_t>(1, config.bins_per_dip * dips_for(vip));
  std::size_t len = 1;
  while (len < want) len <<= 1;
  return len;
}

double Scenario::rate_for(std::size_t vip) const {
  if (!vip_arrival_rates.empty()) return vip_arrival_rates.at(vip);
  return vips == 0 ? 0.0 : arrival_rate / static_cast<double>(vips);
}

double Scenario::total_rate() const {
  double sum = 0.0;
  for (std::size_t i = 0; i < vips; ++i) sum += rate_for(i);
  return sum;
}

void Scenario::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kConfigError, msg); };
  if (vips == 0) fail("vips must be positive");
  if (vips > 0xFFFF) fail("too many VIPs");
  if (dips_per_vip.empty()) fail("dips_per_vip is empty");
  if (dips_per_vip.size() != 1 && dips_per_vip.size() != vips) {
    fail("dips_per_vip needs one value or one per VIP");
  }
  for (std::size_t i = 0; i < vips; ++i) {
    if (dips_for(i) == 0) fail("every VIP needs at least one DIP");
    const std::size_t len = ecmp_length_for(i);
    if ((len & (len - 1)) != 0) fail("ecmp_length must be a power of two");
    if (len < dips_for(i)) fail("ecmp_length is smaller than the DIP pool");
  }
  if (!vip_arrival_rates.empty() && vip_arrival_rates.size() != vips) {
    fail("vip_arrival_rates needs one value per VIP");
  }
  if (arrival_rate < 0.0) fail("arrival_rate must be non-negative");
  for (double r : vip_arrival_rates) {
    if (r < 0.0) fail("vip_arrival_rates must be non-negative");
  }
  if (data_packet_rate < 0.0) fail("data_packet_rate must be non-negative");
  if (update_rate < 0.0) fail("update_rate must be non-negative");
  if (duration <= VirtualTime::zero()) fail("duration must be positive");
  if (rtt < VirtualTime::zero()) fail("rtt must be non-negative");
  if (sample_interval <= VirtualTime::zero()) fail("sample_interval must be positive");
  for (double f : {rst_fraction, dead_client_fraction, syn_retx_fraction, syn_retx_late_fraction}) {
    if (f < 0.0 || f > 1.0) fail("fractions must lie in [0, 1]");
  }
  if (rst_fraction + dead_client_fraction > 1.0) fail("rst and dead-client fractions exceed 1");
  if (update_rate > 0.0 && update_kinds.empty()) fail("update_kinds is empty");
  for (const auto& u : updates) {
    if (u.at < VirtualTime::zero()) fail("update time must be non-negative");
    if (u.cmd.vip.value >= vips) fail("update names an unknown VIP");
  }
  for (const auto& h : hot_bins) {
    if (h.vip.value >= vips) fail("hot_bin names an unknown VIP");
    if (h.bin >= ecmp_length_for(h.vip.value)) fail("hot_bin index is out of range");
  }
  if (stop_when_idle && updates.empty()) fail("stop_when_idle needs scheduled updates");
  config.validate();
}

TrafficGenerator::TrafficGenerator(const Scenario& scenario)
    : scenario_(scenario), rng_(scenario.seed ^ 0x5ca1ab1e0ddba11ULL) {
  double acc = 0.0;
  for (std::size_t i = 0; i < scenario_.vips; ++i) {
    acc += scenario_.rate_for(i);
    cumulative_rates_.push_back(acc);
  }
  total_rate_ = acc;
  key_offset_ = rng_.next() >> 32;
  if (total_rate_ > 0.0) {
    push(from_seconds(rng_.exponential(total_rate_)), Source::kArrival, 0);
  }
  if (scenario_.update_rate > 0.0) {
    push(from_seconds(rng_.exponential(scenario_.update_rate)), Source::kRandomUpdate, 0);
  }
  for (std::size_t i = 0; i < scenario_.updates.size(); ++i) {
    push(scenario_.updates[i].at, Source::kScheduledUpdate, static_cast<std::uint32_t>(i));
  }
}

void TrafficGenerator::push(VirtualTime at, Source source, std::uint32_t index) {
  heap_.push(Item{at, order_++, source, index});
}

std::optional<VirtualTime> TrafficGenerator::peek_time() const {
  if (heap_.empty()) return std::nullopt;
  return heap_.top().at;
}

std::size_t TrafficGenerator::pick_vip() {
  if (cumulative_rates_.size() == 1) return 0;
  const double x = rng_.uniform() * total_rate_;
  auto it = std::upper_bound(cumulative_rates_.begin(), cumulative_rates_.end(), x);
  if (it == cumulative_rates_.end()) --it;
  return static_cast<std::size_t>(it - cumulative_rates_.begin());
}

std::uint32_t TrafficGenerator::open_connection(VirtualTime now, std::size_t vip) {
  std::uint32_t slot;
  if (!free_.empty()) {
    slot = free_.back();
    free_.pop_back();
  } else {
    slot = static_cast<std::uint32_t>(slab_.size());
    slab_.emplace_back();
  }
  Connection& c = slab_[slot];
  c = Connection{};
  c.live = true;
  c.id = next_connection_++;
  const std::uint64_t n = c.id + key_offset_;
  c.key.src_ip = 0x0B000000u | static_cast<std::uint32_t>((n >> 16) & 0xFFFFFF);
  c.key.src_port = static_cast<std::uint16_t>(n & 0xFFFF);
  c.key.dst_ip = vip_address(vip);
  c.key.dst_port = 80;
  c.key.protocol = 6;

  const VirtualTime life = from_seconds(scenario_.lifetime.sample(rng_));
  const VirtualTime rtt = scenario_.rtt;
  const VirtualTime delta = scenario_.config.delta_window;
  const double fate = rng_.uniform();
  const bool rst = fate < scenario_.rst_fraction;
  const bool dead = !rst && fate < scenario_.rst_fraction + scenario_.dead_client_fraction;

  auto add = [&c](VirtualTime t, Milestone m) { c.milestones[c.count++] = {t, m}; };
  add(now, Milestone::kSyn);
  add(now + rtt, Milestone::kSynAck);
  if (rng_.uniform() < scenario_.syn_retx_fraction) {
    const double span = std::min(to_seconds(delta), to_seconds(life + rtt)) * 0.9;
    add(now + from_seconds(rng_.uniform(0.0, span)), Milestone::kSynRetx);
  }
  const VirtualTime end = now + rtt + life;
  if (rng_.uniform() < scenario_.syn_retx_late_fraction && end - now > delta) {
    add(now + delta + from_seconds(rng_.uniform(0.0, 1.0) * to_seconds(end - now - delta)),
        Milestone::kSynRetx);
  }
  if (rst) {
    add(end, Milestone::kRst);
  } else if (!dead) {
    add(end, Milestone::kFinClient);
    add(end + rtt, Milestone::kFinServer);
  }
  std::stable_sort(c.milestones.begin(), c.milestones.begin() + c.count,
                   [](const auto& x, const auto& y) { return x.first < y.first; });

  c.data_end = end;
  if (scenario_.data_packet_rate > 0.0) {
    c.data_interval = from_seconds(1.0 / scenario_.data_packet_rate);
    if (c.data_interval <= VirtualTime::zero()) c.data_interval = VirtualTime(1);
    c.next_data = now + rtt + from_seconds(rng_.uniform() / scenario_.data_packet_rate);
  } else {
    c.next_data = end;
  }
  return slot;
}

std::optional<VirtualTime> TrafficGenerator::next_time(const Connection& c) const {
  std::optional<VirtualTime> t;
  if (c.cursor < c.count) t = c.milestones[c.cursor].first;
  if (c.data_interval > VirtualTime::zero() && c.next_data < c.data_end) {
    if (!t || c.next_data < *t) t = c.next_data;
  }
  return t;
}

SimEvent TrafficGenerator::emit_connection_event(std::uint32_t slot, VirtualTime at) {
  Connection& c = slab_[slot];
  PacketEvent pe;
  pe.connection = c.id;
  pe.packet.key = c.key;
  pe.packet.arrival = at;
  const bool milestone = c.cursor < c.count && c.milestones[c.cursor].first == at;
  if (milestone) {
    const Milestone m = c.milestones[c.cursor].second;
    ++c.cursor;
    pe.opens = m == Milestone::kSyn;
    switch (m) {
      case Milestone::kSyn:
      case Milestone::kSynRetx:
        pe.packet.flag = PacketFlag::kSyn;
        break;
      case Milestone::kSynAck:
        pe.packet.flag = PacketFlag::kSynAck;
        pe.packet.direction = Direction::kServerToClient;
        break;
      case Milestone::kFinClient:
        pe.packet.flag = PacketFlag::kFin;
        break;
      case Milestone::kFinServer:
        pe.packet.flag = PacketFlag::kFin;
        pe.packet.direction = Direction::kServerToClient;
        break;
      case Milestone::kRst:
        pe.packet.flag = PacketFlag::kRst;
        break;
    }
  } else {
    pe.packet.flag = PacketFlag::kData;
    c.next_data += c.data_interval;
  }
  const auto following = next_time(c);
  if (following) {
    push(*following, Source::kConnection, slot);
  } else {
    pe.closes = true;
    c.live = false;
    free_.push_back(slot);
  }
  return SimEvent{at, seq_++, std::move(pe)};
}

std::optional<SimEvent> TrafficGenerator::next() {
  while (!heap_.empty()) {
    const Item item = heap_.top();
    switch (item.source) {
      case Source::kConnection:
        heap_.pop();
        return emit_connection_event(item.index, item.at);
      case Source::kArrival: {
        heap_.pop();
        if (item.at >= scenario_.duration) continue;
        push(item.at + from_seconds(rng_.exponential(total_rate_)), Source::kArrival, 0);
        const std::uint32_t slot = open_connection(item.at, pick_vip());
        return emit_connection_event(slot, item.at);
      }
      case Source::kRandomUpdate: {
        heap_.pop();
        if (item.at >= scenario_.duration) continue;
        push(item.at + from_seconds(rng_.exponential(scenario_.update_rate)),
             Source::kRandomUpdate, 0);
        UpdateEvent ue;
        ue.cmd.vip = VipId{static_cast<std::uint16_t>(rng_.below(scenario_.vips))};
        ue.cmd.kind = scenario_.update_kinds[rng_.below(scenario_.update_kinds.size())];
        ue.cmd.pick = rng_.next();
        return SimEvent{item.at, seq_++, std::move(ue)};
      }
      case Source::kScheduledUpdate: {
        heap_.pop();
        UpdateEvent ue{scenario_.updates[item.index].cmd};
        return SimEvent{item.at, seq_++, std::move(ue)};
      }
    }
  }
  return std::nullopt;
}

}  // namespace prism
