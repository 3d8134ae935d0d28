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
#include <cstddef>
#include <cstdint>
#include <deque>
#include <vector>

#include "prism/config.hpp"
#include "prism/cuckoo_table.hpp"
#include "prism/types.hpp"

namespace prism {

struct FibEntry {
  Signature signature;
  VirtualTime record_time{};
};

// A learning table: the data plane records signatures, the control plane
// drains them in insertion order.
class FibTable {
 public:
  FibTable(std::size_t capacity, std::uint64_t seed, std::size_t slots_per_bucket = 4,
           std::size_t max_kicks = 32);

  InsertResult learn(const Signature& sig, VirtualTime now);
  // Removes and returns up to `budget` of the oldest entries.
  std::vector<FibEntry> drain(std::size_t budget);
  std::vector<FibEntry> drain_all() { return drain(order_.size()); }

  bool contains(const Signature& sig) const { return table_.contains(sig); }
  std::size_t size() const { return order_.size(); }
  std::size_t capacity() const { return table_.capacity(); }
  const std::deque<FibEntry>& pending() const { return order_; }
  bool check_invariants() const;

 private:
  CuckooTable<VirtualTime> table_;
  std::deque<FibEntry> order_;
};

enum class FibKind : std::uint8_t { kSyn1, kSyn2, kFin1, kFin2, kRst1, kRst2 };
inline constexpr std::size_t kFibKinds = 6;
const char* to_string(FibKind kind);

// The six learning tables of one switch.
class FibSet {
 public:
  explicit FibSet(const SimConfig& cfg);

  FibTable& operator[](FibKind k) { return tables_[static_cast<std::size_t>(k)]; }
  const FibTable& operator[](FibKind k) const { return tables_[static_cast<std::size_t>(k)]; }
  std::size_t total_size() const;
  std::array<std::size_t, kFibKinds> depths() const;

 private:
  std::vector<FibTable> tables_;
};

}  // namespace prism
