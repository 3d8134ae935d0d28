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
#include <string_view>
#include <vector>

namespace prism::analysis {

// Probability that n draws from d equally likely values contain a repeat.
// exact: 1 - prod_{k=1}^{n-1} (1 - k/d) in log space.
// approximate: 1 - exp(-n^2 / 2d).
// Throws kDomainError when n > d or d <= 0.
double birthday_collision_prob(double n, double d, bool exact);

// window / p(n; d): mean time between windows that contain a collision,
// counting one Bernoulli trial per window. Returns +inf when p is 0.
double time_between_collisions(double n, double d, double window_s = 1.0);

// 1 - ((s-1)/s)^m: chance that a signature's bin moves during its lifetime
// when m single-DIP updates hit a pool of s DIPs.
double migration_prob(double m, double s);

// Hours between connection losses given the mean time between collisions.
double expected_loss_interval_hours(double between_collisions_s, double m, double s);

struct RoundsForecast {
  std::size_t rounds = 0;        // smallest i with (delta/rho)^i * C_1 < 1
  std::vector<double> counts;    // C_1 .. C_{rounds+1}
  std::vector<double> times_s;   // T_1 .. T_rounds
  double copy_time_s = 0.0;      // sum of T_i
};

// Geometric round model: C_{i+1} = (delta/rho) C_i, T_i = C_i / rho.
// Throws kNoConvergence when rho <= delta.
RoundsForecast expected_rounds_and_times(double c1, double rho, double delta);

// Expected wall time of one bin migration including the FIB reads between
// rounds. Rounds continue while the expected count is at least one, then a
// final trapped round copies the residual expectation.
double expected_migration_time(double c1, double rho, double delta, double fib_arrivals_per_s,
                               double fib_read_rate, double poll_overhead_s);

// Rate of SYN pairs that share a signature and arrive within delta_s of each
// other, for Poisson arrivals at syn_rate into a space of d signatures.
// Uses pairs/window = -ln(1 - p(n; d)) with n = syn_rate * delta_s; each
// window of length delta_s holds half of the pairs a sliding window sees.
double collision_pair_rate(double syn_rate, double delta_s, double d);

// Expected broken connections per second: colliding pairs whose bin moves.
double predicted_collision_break_rate(double syn_rate, double delta_s, double d, double m,
                                      double s);

// Parses "1000", "2.5e6", "2^48" or "10^6".
double parse_quantity(std::string_view text);

}  // namespace prism::analysis
