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

#include "prism/types.hpp"

namespace prism {

// Tunables shared by the data plane, the control plane and the simulator.
struct SimConfig {
  VirtualTime poll_interval = from_millis(10);
  double mct_write_rate = 25'000.0;      // rho, entries per second
  double fib_read_rate = 10'000'000.0;   // entries per second
  VirtualTime fib_poll_overhead = from_micros(400);
  VirtualTime delta_window = from_seconds(5);
  VirtualTime syn2_timeout = from_millis(50);
  VirtualTime t_limit = from_millis(5000);
  std::uint64_t rng_seed = 1;
  int signature_hash_bits = 48;

  std::size_t fib_capacity = 524'288;
  std::size_t mct_capacity = 65'536;
  std::size_t cuckoo_slots_per_bucket = 4;
  std::size_t cuckoo_max_kicks = 32;

  VirtualTime probe_interval = from_seconds(1);  // zero disables probing
  double suspect_multiplier = 3.0;
  double lifetime_ewma_alpha = 0.05;
  double syn_rate_ewma_alpha = 0.2;

  std::size_t bins_per_dip = 10;         // K
  std::size_t max_ecmp_length = 1 << 20;
  VirtualTime trap_delay = from_millis(1);
  bool check_invariants = true;

  // Throws Error(kConfigError) on the first invalid field.
  void validate() const;
};

}  // namespace prism
