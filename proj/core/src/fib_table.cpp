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

#include "prism/fib_table.hpp"

#include <algorithm>

namespace prism {

const char* to_string(InsertResult r) {
  switch (r) {
    case InsertResult::kInserted: return "Inserted";
    case InsertResult::kAlreadyPresent: return "AlreadyPresent";
    case InsertResult::kFull: return "Full";
  }
  return "Unknown";
}

const char* to_string(FibKind kind) {
  switch (kind) {
    case FibKind::kSyn1: return "syn1";
    case FibKind::kSyn2: return "syn2";
    case FibKind::kFin1: return "fin1";
    case FibKind::kFin2: return "fin2";
    case FibKind::kRst1: return "rst1";
    case FibKind::kRst2: return "rst2";
  }
  return "unknown";
}

FibTable::FibTable(std::size_t capacity, std::uint64_t seed, std::size_t slots_per_bucket,
                   std::size_t max_kicks)
    : table_(capacity, seed, 2, slots_per_bucket, max_kicks) {}

InsertResult FibTable::learn(const Signature& sig, VirtualTime now) {
  const InsertResult r = table_.insert(sig, now);
  if (r == InsertResult::kInserted) order_.push_back(FibEntry{sig, now});
  return r;
}

std::vector<FibEntry> FibTable::drain(std::size_t budget) {
  const std::size_t n = std::min(budget, order_.size());
  std::vector<FibEntry> out(order_.begin(), order_.begin() + static_cast<std::ptrdiff_t>(n));
  order_.erase(order_.begin(), order_.begin() + static_cast<std::ptrdiff_t>(n));
  for (const auto& e : out) table_.erase(e.signature);
  return out;
}

bool FibTable::check_invariants() const {
  if (order_.size() != table_.size()) return false;
  for (const auto& e : order_) {
    if (!table_.contains(e.signature)) return false;
  }
  return table_.check_invariants();
}

FibSet::FibSet(const SimConfig& cfg) {
  tables_.reserve(kFibKinds);
  for (std::size_t i = 0; i < kFibKinds; ++i) {
    tables_.emplace_back(cfg.fib_capacity, cfg.rng_seed * 0x9e3779b97f4a7c15ULL + i + 1,
                         cfg.cuckoo_slots_per_bucket, cfg.cuckoo_max_kicks);
  }
}

std::size_t FibSet::total_size() const {
  std::size_t n = 0;
  for (const auto& t : tables_) n += t.size();
  return n;
}

std::array<std::size_t, kFibKinds> FibSet::depths() const {
  std::array<std::size_t, kFibKinds> out{};
  for (std::size_t i = 0; i < kFibKinds; ++i) out[i] = tables_[i].size();
  return out;
}

}  // namespace prism
