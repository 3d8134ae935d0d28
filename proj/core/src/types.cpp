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

#include "prism/types.hpp"

#include <fmt/format.h>

#include "prism/error.hpp"
#include "prism/hashing.hpp"

namespace prism {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownVip: return "UnknownVip";
    case ErrorCode::kEmptyTable: return "EmptyTable";
    case ErrorCode::kTooSmall: return "TooSmall";
    case ErrorCode::kPoolWouldBeEmpty: return "PoolWouldBeEmpty";
    case ErrorCode::kAlreadyPresent: return "AlreadyPresent";
    case ErrorCode::kNotInPool: return "NotInPool";
    case ErrorCode::kCapacityExceeded: return "CapacityExceeded";
    case ErrorCode::kInsufficientBins: return "InsufficientBins";
    case ErrorCode::kMctOverflow: return "MctOverflow";
    case ErrorCode::kDomainError: return "DomainError";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

std::array<std::uint8_t, 13> ConnectionKey::encode() const {
  std::array<std::uint8_t, 13> out{};
  auto put = [&out](std::size_t at, std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) {
      out[at + i] = static_cast<std::uint8_t>(v >> (8 * (bytes - 1 - i)));
    }
  };
  put(0, src_ip, 4);
  put(4, dst_ip, 4);
  put(8, src_port, 2);
  put(10, dst_port, 2);
  put(12, protocol, 1);
  return out;
}

std::string to_string(const ConnectionKey& key) {
  auto ip = [](std::uint32_t a) {
    return fmt::format("{}.{}.{}.{}", a >> 24, (a >> 16) & 0xff, (a >> 8) & 0xff, a & 0xff);
  };
  return fmt::format("{}:{}->{}:{}/{}", ip(key.src_ip), key.src_port, ip(key.dst_ip),
                     key.dst_port, key.protocol);
}

std::string to_string(const Signature& sig) {
  return fmt::format("{:016x}", sig.packed());
}

}  // namespace prism

std::size_t std::hash<prism::Signature>::operator()(const prism::Signature& s) const noexcept {
  return static_cast<std::size_t>(prism::fmix64(s.packed()));
}

std::size_t std::hash<prism::ConnectionKey>::operator()(
    const prism::ConnectionKey& k) const noexcept {
  std::uint64_t a = (static_cast<std::uint64_t>(k.src_ip) << 32) | k.dst_ip;
  std::uint64_t b = (static_cast<std::uint64_t>(k.src_port) << 24) |
                    (static_cast<std::uint64_t>(k.dst_port) << 8) | k.protocol;
  return static_cast<std::size_t>(prism::fmix64(a ^ prism::fmix64(b)));
}
