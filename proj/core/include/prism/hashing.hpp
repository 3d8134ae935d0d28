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
#include <span>

#include "prism/types.hpp"

namespace prism {

// 64-bit FNV-1a over a byte string.
std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes);

// splitmix64 finalizer. Used on top of FNV-1a for the signature hash.
constexpr std::uint64_t finalize64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

// MurmurHash3 fmix64. Independent of finalize64; used for bin selection and
// for the per-section cuckoo hashes.
constexpr std::uint64_t fmix64(std::uint64_t k) {
  k ^= k >> 33;
  k *= 0xff51afd7ed558ccdULL;
  k ^= k >> 33;
  k *= 0xc4ceb9fe1a85ec53ULL;
  k ^= k >> 33;
  return k;
}

// Full 64-bit digest of a connection key, before truncation.
std::uint64_t key_digest(const ConnectionKey& key);

// Builds a signature keeping the low `hash_bits` bits of `digest`.
Signature make_signature(VipId vip, std::uint64_t digest, int hash_bits);

// Maps a signature to a bin of a table with `table_len` entries.
// Throws Error(kEmptyTable) when table_len is zero.
BinIndex ecmp_hash(const Signature& sig, std::size_t table_len);

}  // namespace prism
