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

#include "prism/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include <fmt/format.h>

#include "prism/metrics.hpp"
#include "prism/scenario_file.hpp"
#include "prism/simulator.hpp"

namespace prism {

std::vector<SweepRow> sweep(const Scenario& base, const std::string& parameter,
                            const std::vector<std::string>& values, const SweepOptions& options) {
  const std::size_t seeds = std::max<std::size_t>(1, options.seeds);
  std::vector<Scenario> jobs;
  jobs.reserve(values.size() * seeds);
  for (const auto& v : values) {
    Scenario s = base;
    apply_setting(s, parameter, v);
    s.validate();
    for (std::size_t k = 0; k < seeds; ++k) {
      Scenario run = s;
      run.seed = base.seed + k;
      jobs.push_back(std::move(run));
    }
  }

  std::vector<RunResult> results(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        results[i] = run_scenario(jobs[i]);
        results[i].frames.clear();
        results[i].frames.shrink_to_fit();
        results[i].csv.clear();
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::size_t threads = options.threads == 0 ? std::thread::hardware_concurrency() : options.threads;
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(1, jobs.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);

  std::vector<SweepRow> rows;
  for (std::size_t vi = 0; vi < values.size(); ++vi) {
    SweepRow row;
    row.value = values[vi];
    for (std::size_t k = 0; k < seeds; ++k) {
      const RunResult& r = results[vi * seeds + k];
      ++row.runs;
      row.mct_fraction_mean += r.mct_fraction_mean;
      row.mct_integral_mean += r.mct_integral;
      row.migrated_per_update_mean += r.migrated_per_update;
      row.max_rounds = std::max(row.max_rounds, r.max_rounds);
      row.second_round_mean += r.mean_second_round;
      row.update_ms_mean += r.mean_update_ms;
      row.pcc_violations += r.pcc_violations;
      row.broken_by_collision += r.broken_by_collision;
      if (r.exit_status != 0) ++row.failed_runs;
    }
    const double n = static_cast<double>(row.runs);
    row.mct_fraction_mean /= n;
    row.mct_integral_mean /= n;
    row.migrated_per_update_mean /= n;
    row.second_round_mean /= n;
    row.update_ms_mean /= n;
    rows.push_back(row);
  }
  return rows;
}

std::string sweep_csv(const std::string& parameter, const std::vector<SweepRow>& rows) {
  std::string out = fmt::format(
      "{},runs,mct_fraction_mean,mct_integral_mean,migrated_per_update_mean,max_rounds,"
      "second_round_mean,update_ms_mean,pcc_violations,broken_by_collision,failed_runs\n",
      parameter);
  for (const auto& r : rows) {
    out += fmt::format("{},{},{:.9f},{},{},{},{},{},{},{},{}\n", r.value, r.runs,
                       r.mct_fraction_mean, format_double(r.mct_integral_mean),
                       format_double(r.migrated_per_update_mean), r.max_rounds,
                       format_double(r.second_round_mean), format_double(r.update_ms_mean),
                       r.pcc_violations, r.broken_by_collision, r.failed_runs);
  }
  return out;
}

}  // namespace prism
