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

#include <array>
#include <chrono>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>

namespace prism {

// Virtual simulation time with nanosecond resolution.
using VirtualTime = std::chrono::duration<std::int64_t, std::nano>;

inline VirtualTime from_seconds(double s) {
  return VirtualTime{static_cast<std::int64_t>(std::llround(s * 1e9))};
}
inline VirtualTime from_millis(double ms) {
  return VirtualTime{static_cast<std::int64_t>(std::llround(ms * 1e6))};
}
inline VirtualTime from_micros(double us) {
  return VirtualTime{static_cast<std::int64_t>(std::llround(us * 1e3))};
}
inline double to_seconds(VirtualTime t) { return static_cast<double>(t.count()) * 1e-9; }
inline double to_millis(VirtualTime t) { return static_cast<double>(t.count()) * 1e-6; }

struct VipId {
  std::uint16_t value = 0;
  friend constexpr auto operator<=>(const VipId&, const VipId&) = default;
};

struct DipId {
  std::uint32_t value = 0;
  friend constexpr auto operator<=>(const DipId&, const DipId&) = default;
};

using BinIndex = std::uint32_t;

// The TCP/UDP 5-tuple. dst_ip is the VIP address.
struct ConnectionKey {
  std::uint32_t src_ip = 0;
  std::uint32_t dst_ip = 0;
  std::uint16_t src_port = 0;
  std::uint16_t dst_port = 0;
  std::uint8_t protocol = 6;

  friend constexpr auto operator<=>(const ConnectionKey&, const ConnectionKey&) = default;

  // Big-endian encoding in field order: src_ip, dst_ip, src_port, dst_port, protocol.
  std::array<std::uint8_t, 13> encode() const;
};

// 16-bit VIP id in the high bits and a 48-bit key hash in the low bits.
struct Signature {
  static constexpr int kHashBits = 48;
  static constexpr std::uint64_t kHashMask = (std::uint64_t{1} << kHashBits) - 1;

  VipId vip_id;
  std::uint64_t key_hash = 0;

  constexpr std::uint64_t packed() const {
    return (static_cast<std::uint64_t>(vip_id.value) << kHashBits) | (key_hash & kHashMask);
  }
  static constexpr Signature unpack(std::uint64_t v) {
    return Signature{VipId{static_cast<std::uint16_t>(v >> kHashBits)}, v & kHashMask};
  }

  friend constexpr auto operator<=>(const Signature&, const Signature&) = default;
};

std::string to_string(const ConnectionKey& key);
std::string to_string(const Signature& sig);

}  // namespace prism

template <>
struct std::hash<prism::VipId> {
  std::size_t operator()(prism::VipId v) const noexcept { return v.value; }
};

template <>
struct std::hash<prism::DipId> {
  std::size_t operator()(prism::DipId d) const noexcept { return d.value; }
};

template <>
struct std::hash<prism::Signature> {
  std::size_t operator()(const prism::Signature& s) const noexcept;
};

template <>
struct std::hash<prism::ConnectionKey> {
  std::size_t operator()(const prism::ConnectionKey& k) const noexcept;
};
