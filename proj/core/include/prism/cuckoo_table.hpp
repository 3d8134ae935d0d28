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
#include <random>
#include <utility>
#include <vector>

#include "prism/error.hpp"
#include "prism/hashing.hpp"
#include "prism/types.hpp"

namespace prism {

enum class InsertResult { kInserted, kAlreadyPresent, kFull };

const char* to_string(InsertResult r);

// Fixed-capacity multi-section cuckoo hash table keyed by signature.
// Each section has its own hash seed; a key lives in exactly one bucket of
// one section. Inserts that cannot find room after max_kicks relocations
// return kFull and leave the table unchanged.
template <class Value>
class CuckooTable {
 public:
  CuckooTable(std::size_t capacity, std::uint64_t seed, std::size_t sections = 2,
              std::size_t slots_per_bucket = 4, std::size_t max_kicks = 32)
      : sections_(sections),
        slots_per_bucket_(slots_per_bucket),
        max_kicks_(max_kicks),
        rng_(seed) {
    if (sections < 2 || slots_per_bucket < 1) {
      throw Error(ErrorCode::kInvalidArgument, "cuckoo table needs >= 2 sections");
    }
    buckets_per_section_ = capacity / (sections * slots_per_bucket);
    if (buckets_per_section_ == 0) {
      throw Error(ErrorCode::kInvalidArgument, "cuckoo capacity too small");
    }
    slots_.resize(buckets_per_section_ * sections * slots_per_bucket);
    std::mt19937_64 seeder(seed ^ 0x6a09e667f3bcc909ULL);
    for (std::size_t s = 0; s < sections; ++s) seeds_.push_back(seeder());
  }

  std::size_t capacity() const { return slots_.size(); }
  std::size_t size() const { return size_; }
  std::size_t sections() const { return sections_; }
  double load_factor() const { return static_cast<double>(size_) / capacity(); }

  InsertResult insert(const Signature& sig, const Value& value) {
    const std::uint64_t key = sig.packed();
    if (locate(key) != kNone) return InsertResult::kAlreadyPresent;
    for (std::size_t s = 0; s < sections_; ++s) {
      if (std::size_t pos = free_slot(s, key); pos != kNone) {
        place(pos, key, value);
        ++size_;
        return InsertResult::kInserted;
      }
    }
    return kick_insert(key, value);
  }

  Value* find(const Signature& sig) {
    const std::size_t pos = locate(sig.packed());
    return pos == kNone ? nullptr : &slots_[pos].value;
  }
  const Value* find(const Signature& sig) const {
    const std::size_t pos = locate(sig.packed());
    return pos == kNone ? nullptr : &slots_[pos].value;
  }
  bool contains(const Signature& sig) const { return locate(sig.packed()) != kNone; }

  bool erase(const Signature& sig) {
    const std::size_t pos = locate(sig.packed());
    if (pos == kNone) return false;
    slots_[pos].used = false;
    slots_[pos].value = Value{};
    --size_;
    return true;
  }

  void clear() {
    for (auto& s : slots_) s = Slot{};
    size_ = 0;
  }

  // Visits entries in slot order: f(Signature, Value&).
  template <class F>
  void for_each(F&& f) {
    for (auto& s : slots_) {
      if (s.used) f(Signature::unpack(s.key), s.value);
    }
  }
  template <class F>
  void for_each(F&& f) const {
    for (const auto& s : slots_) {
      if (s.used) f(Signature::unpack(s.key), s.value);
    }
  }

  // Full scan: each key appears once and sits in a bucket its section hashes to.
  bool check_invariants() const {
    std::size_t count = 0;
    for (std::size_t pos = 0; pos < slots_.size(); ++pos) {
      if (!slots_[pos].used) continue;
      ++count;
      const std::size_t section = pos / section_span();
      if (bucket_start(section, slots_[pos].key) !=
          pos - pos % slots_per_bucket_) {
        return false;
      }
      for (std::size_t s = 0; s < sections_; ++s) {
        const std::size_t b = bucket_start(s, slots_[pos].key);
        for (std::size_t j = 0; j < slots_per_bucket_; ++j) {
          if (b + j != pos && slots_[b + j].used && slots_[b + j].key == slots_[pos].key) {
            return false;
          }
        }
      }
    }
    return count == size_;
  }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

  struct Slot {
    std::uint64_t key = 0;
    Value value{};
    bool used = false;
  };

  std::size_t section_span() const { return buckets_per_section_ * slots_per_bucket_; }

  std::size_t bucket_start(std::size_t section, std::uint64_t key) const {
    const std::size_t bucket = fmix64(key ^ seeds_[section]) % buckets_per_section_;
    return section * section_span() + bucket * slots_per_bucket_;
  }

  std::size_t locate(std::uint64_t key) const {
    for (std::size_t s = 0; s < sections_; ++s) {
      const std::size_t b = bucket_start(s, key);
      for (std::size_t j = 0; j < slots_per_bucket_; ++j) {
        if (slots_[b + j].used && slots_[b + j].key == key) return b + j;
      }
    }
    return kNone;
  }

  std::size_t free_slot(std::size_t section, std::uint64_t key) const {
    const std::size_t b = bucket_start(section, key);
    for (std::size_t j = 0; j < slots_per_bucket_; ++j) {
      if (!slots_[b + j].used) return b + j;
    }
    return kNone;
  }

  void place(std::size_t pos, std::uint64_t key, const Value& value) {
    slots_[pos].key = key;
    slots_[pos].value = value;
    slots_[pos].used = true;
  }

  // Random-walk relocation. Swaps are undone if the walk fails.
  InsertResult kick_insert(std::uint64_t key, const Value& value) {
    Slot carry{key, value, true};
    std::vector<std::size_t> path;
    path.reserve(max_kicks_);
    std::size_t from_section = sections_;
    for (std::size_t kick = 0; kick < max_kicks_; ++kick) {
      std::size_t section = rng_() % sections_;
      if (section == from_section) section = (section + 1 + rng_() % (sections_ - 1)) % sections_;
      const std::size_t pos = bucket_start(section, carry.key) + rng_() % slots_per_bucket_;
      std::swap(carry, slots_[pos]);
      path.push_back(pos);
      from_section = section;
      for (std::size_t s = 0; s < sections_; ++s) {
        if (s == section) continue;
        if (std::size_t free = free_slot(s, carry.key); free != kNone) {
          slots_[free] = carry;
          ++size_;
          return InsertResult::kInserted;
        }
      }
    }
    for (auto it = path.rbegin(); it != path.rend(); ++it) std::swap(carry, slots_[*it]);
    return InsertResult::kFull;
  }

  std::size_t sections_;
  std::size_t slots_per_bucket_;
  std::size_t max_kicks_;
  std::size_t buckets_per_section_ = 0;
  std::vector<std::uint64_t> seeds_;
  std::vector<Slot> slots_;
  std::size_t size_ = 0;
  std::mt19937_64 rng_;
};

}  // namespace prism
