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
#include <optional>
#include <utility>
#include <vector>

#include "prism/cuckoo_table.hpp"
#include "prism/types.hpp"

namespace prism {

struct MctEntry {
  DipId dip;
  bool keep_alive = false;
  bool probe_only = false;
};

struct ProbeResult {
  Signature signature;
  bool was_alive = false;
  bool probe_only = false;
};

// Migrated connection table. Consulted by the data plane before ECMP.
class Mct {
 public:
  Mct(std::size_t capacity, std::uint64_t seed, std::size_t slots_per_bucket = 4,
      std::size_t max_kicks = 32)
      : table_(capacity, seed, 2, slots_per_bucket, max_kicks) {}

  InsertResult insert(const Signature& sig, DipId dip, bool probe_only = false) {
    return table_.insert(sig, MctEntry{dip, false, probe_only});
  }

  // Data-plane lookup. A hit sets the keep-alive bit.
  std::optional<DipId> lookup_and_touch(const Signature& sig) {
    MctEntry* e = table_.find(sig);
    if (e == nullptr) return std::nullopt;
    e->keep_alive = true;
    return e->dip;
  }

  MctEntry* find(const Signature& sig) { return table_.find(sig); }
  const MctEntry* find(const Signature& sig) const { return table_.find(sig); }
  bool erase(const Signature& sig) { return table_.erase(sig); }
  std::size_t size() const { return table_.size(); }
  std::size_t capacity() const { return table_.capacity(); }
  bool check_invariants() const { return table_.check_invariants(); }

  // Reports and clears every keep-alive bit, in slot order.
  std::vector<ProbeResult> probe_and_clear() {
    std::vector<ProbeResult> out;
    out.reserve(table_.size());
    table_.for_each([&out](const Signature& sig, MctEntry& e) {
      out.push_back(ProbeResult{sig, e.keep_alive, e.probe_only});
      e.keep_alive = false;
    });
    return out;
  }

  template <class F>
  void for_each(F&& f) const {
    table_.for_each(std::forward<F>(f));
  }

 private:
  CuckooTable<MctEntry> table_;
};

}  // namespace prism
