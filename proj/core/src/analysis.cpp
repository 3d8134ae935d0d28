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

#include "prism/analysis.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "prism/error.hpp"

namespace prism::analysis {
namespace {

void check_domain(double n, double d) {
  if (!(d > 0.0)) throw Error(ErrorCode::kDomainError, "signature space must be positive");
  if (n < 0.0) throw Error(ErrorCode::kDomainError, "n must be non-negative");
  if (n > d) throw Error(ErrorCode::kDomainError, "n exceeds the signature space");
}

// sum_{k=1}^{n-1} log(1 - k/d)
double log_no_collision(double n, double d) {
  const auto count = static_cast<std::uint64_t>(std::floor(n));
  double acc = 0.0;
  for (std::uint64_t k = 1; k < count; ++k) acc += std::log1p(-static_cast<double>(k) / d);
  return acc;
}

}  // namespace

double birthday_collision_prob(double n, double d, bool exact) {
  check_domain(n, d);
  if (n < 2.0) return 0.0;
  if (exact) return -std::expm1(log_no_collision(n, d));
  return -std::expm1(-(n * n) / (2.0 * d));
}

double time_between_collisions(double n, double d, double window_s) {
  const double p = birthday_collision_prob(n, d, false);
  if (p <= 0.0) return std::numeric_limits<double>::infinity();
  return window_s / p;
}

double migration_prob(double m, double s) {
  if (s < 1.0) throw Error(ErrorCode::kDomainError, "s must be at least 1");
  if (m < 0.0) throw Error(ErrorCode::kDomainError, "m must be non-negative");
  if (s == 1.0) return m > 0.0 ? 1.0 : 0.0;
  return -std::expm1(m * std::log1p(-1.0 / s));
}

double expected_loss_interval_hours(double between_collisions_s, double m, double s) {
  const double p = migration_prob(m, s);
  if (p <= 0.0) return std::numeric_limits<double>::infinity();
  return between_collisions_s / p / 3600.0;
}

RoundsForecast expected_rounds_and_times(double c1, double rho, double delta) {
  if (!(rho > delta)) throw Error(ErrorCode::kNoConvergence, "rho must exceed delta");
  if (delta < 0.0 || c1 < 0.0) throw Error(ErrorCode::kDomainError, "negative input");
  RoundsForecast f;
  if (c1 < 1.0) {
    f.counts.push_back(c1);
    return f;
  }
  const double ratio = delta / rho;
  double c = c1;
  while (c >= 1.0) {
    f.counts.push_back(c);
    f.times_s.push_back(c / rho);
    f.copy_time_s += c / rho;
    ++f.rounds;
    c *= ratio;
  }
  f.counts.push_back(c);
  return f;
}

double expected_migration_time(double c1, double rho, double delta, double fib_arrivals_per_s,
                               double fib_read_rate, double poll_overhead_s) {
  const RoundsForecast f = expected_rounds_and_times(c1, rho, delta);
  if (f.rounds == 0) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < f.counts.size(); ++i) {
    const double t = f.counts[i] / rho;
    total += t;
    if (i + 1 < f.counts.size()) {
      total += fib_arrivals_per_s * t / fib_read_rate + poll_overhead_s;
    }
  }
  return total;
}

double collision_pair_rate(double syn_rate, double delta_s, double d) {
  if (!(delta_s > 0.0)) throw Error(ErrorCode::kDomainError, "delta must be positive");
  const double n = syn_rate * delta_s;
  const double p = birthday_collision_prob(n, d, false);
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  return 2.0 * -std::log1p(-p) / delta_s;
}

double predicted_collision_break_rate(double syn_rate, double delta_s, double d, double m,
                                      double s) {
  return collision_pair_rate(syn_rate, delta_s, d) * migration_prob(m, s);
}

double parse_quantity(std::string_view text) {
  const std::string s(text);
  try {
    if (auto caret = s.find('^'); caret != std::string::npos) {
      const double base = std::stod(s.substr(0, caret));
      const double exp = std::stod(s.substr(caret + 1));
      return std::pow(base, exp);
    }
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kInvalidArgument, "cannot parse number '" + s + "'");
  }
}

}  // namespace prism::analysis
