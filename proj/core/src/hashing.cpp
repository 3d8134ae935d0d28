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

#include "prism/hashing.hpp"

#include "prism/error.hpp"

namespace prism {

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t key_digest(const ConnectionKey& key) {
  const auto bytes = key.encode();
  return finalize64(fnv1a64(bytes));
}

Signature make_signature(VipId vip, std::uint64_t digest, int hash_bits) {
  if (hash_bits < 1 || hash_bits > Signature::kHashBits) {
    throw Error(ErrorCode::kConfigError, "signature_hash_bits must be in [1, 48]");
  }
  const std::uint64_t mask = (std::uint64_t{1} << hash_bits) - 1;
  return Signature{vip, digest & mask};
}

BinIndex ecmp_hash(const Signature& sig, std::size_t table_len) {
  if (table_len == 0) throw Error(ErrorCode::kEmptyTable, "ECMP table has no bins");
  constexpr std::uint64_t kSalt = 0x9e3779b97f4a7c15ULL;
  return static_cast<BinIndex>(fmix64(sig.packed() + kSalt) % table_len);
}

}  // namespace prism
