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

#include "prism/config.hpp"

#include <string>

#include "prism/error.hpp"

namespace prism {
namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::kConfigError, what);
}

bool is_pow2(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

}  // namespace

void SimConfig::validate() const {
  require(poll_interval.count() > 0, "poll_interval must be positive");
  require(mct_write_rate > 0, "mct_write_rate must be positive");
  require(fib_read_rate > 0, "fib_read_rate must be positive");
  require(fib_poll_overhead.count() >= 0, "fib_poll_overhead must be non-negative");
  require(delta_window.count() > 0, "delta_window must be positive");
  require(syn2_timeout.count() > 0, "syn2_timeout must be positive");
  require(t_limit.count() > 0, "t_limit must be positive");
  require(signature_hash_bits >= 1 && signature_hash_bits <= 48,
          "signature_hash_bits must be in [1, 48]");
  require(fib_capacity >= cuckoo_slots_per_bucket * 2, "fib_capacity too small");
  require(mct_capacity >= cuckoo_slots_per_bucket * 2, "mct_capacity too small");
  require(cuckoo_slots_per_bucket >= 1, "cuckoo_slots_per_bucket must be positive");
  require(probe_interval.count() >= 0, "probe_interval must be non-negative");
  require(suspect_multiplier > 0, "suspect_multiplier must be positive");
  require(lifetime_ewma_alpha > 0 && lifetime_ewma_alpha <= 1,
          "lifetime_ewma_alpha must be in (0, 1]");
  require(syn_rate_ewma_alpha > 0 && syn_rate_ewma_alpha <= 1,
          "syn_rate_ewma_alpha must be in (0, 1]");
  require(bins_per_dip >= 1, "bins_per_dip must be positive");
  require(is_pow2(max_ecmp_length), "max_ecmp_length must be a power of two");
  require(trap_delay.count() >= 0, "trap_delay must be non-negative");
}

}  // namespace prism
