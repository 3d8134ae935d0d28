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

#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "prism/analysis.hpp"
#include "prism/bin_selection.hpp"
#include "prism/error.hpp"
#include "prism/invariant_suite.hpp"
#include "prism/metrics.hpp"
#include "prism/scenario_file.hpp"
#include "prism/simulator.hpp"
#include "prism/sweep.hpp"

namespace {

using namespace prism;

Scenario load_with_overrides(const std::string& file, std::optional<std::uint64_t> seed,
                             const std::string& policy) {
  Scenario s = load_scenario(file);
  if (auto env = seed_from_env()) s.seed = *env;
  if (seed) s.seed = *seed;
  if (!policy.empty()) s.policy = BinSelectionPolicy::parse(policy).name();
  s.validate();
  return s;
}

int cmd_simulate(const std::string& file, const std::string& out, std::optional<std::uint64_t> seed,
                 const std::string& policy) {
  const Scenario s = load_with_overrides(file, seed, policy);
  const RunResult r = run_scenario(s, out);
  fmt::print("status={} connections={} updates={} pcc_violations={} broken_by_collision={} "
             "mct_fraction_mean={} out={}\n",
             r.summary.get("run", "status"), r.connections, r.updates.size(), r.pcc_violations,
             r.broken_by_collision, format_double(r.mct_fraction_mean), out);
  return r.exit_status;
}

int cmd_sweep(const std::string& file, const std::string& param,
              const std::vector<std::string>& values, std::size_t seeds, std::size_t threads,
              const std::string& out, std::optional<std::uint64_t> seed) {
  const Scenario s = load_with_overrides(file, seed, "");
  const auto rows = sweep(s, param, values, SweepOptions{seeds, threads});
  const std::string csv = sweep_csv(param, rows);
  if (out.empty()) {
    fmt::print("{}", csv);
  } else {
    write_file_atomic(out, csv);
    fmt::print("wrote {}\n", out);
  }
  for (const auto& r : rows) {
    if (r.failed_runs > 0) return 1;
  }
  return 0;
}

int cmd_selftest(std::size_t count, std::uint64_t first_seed) {
  std::size_t failed = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const InvariantCheck c = check_scenario(random_scenario(first_seed + i));
    fmt::print("{} seed={} policy={} connections={} updates={} checks={} pcc_violations={}\n",
               c.passed() ? "PASS" : "FAIL", c.seed, c.policy, c.connections, c.updates,
               c.invariant_checks, c.pcc_violations);
    for (const auto& f : c.failures) fmt::print("  {}\n", f);
    if (!c.passed()) ++failed;
  }
  fmt::print("{}/{} scenarios passed\n", count - failed, count);
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prism L4 load balancer simulator and analysis toolkit"};
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "Run one scenario");
  std::string sim_file, sim_out = "out", sim_policy;
  std::optional<std::uint64_t> sim_seed;
  sim->add_option("scenario", sim_file, "Scenario file")->required()->check(CLI::ExistingFile);
  sim->add_option("--out", sim_out, "Output directory")->capture_default_str();
  sim->add_option("--seed", sim_seed, "Seed override");
  sim->add_option("--policy", sim_policy, "Bin selection policy");

  auto* sw = app.add_subcommand("sweep", "Run a scenario over parameter values");
  std::string sw_file, sw_param, sw_out;
  std::vector<std::string> sw_values;
  std::size_t sw_seeds = 1, sw_threads = 1;
  std::optional<std::uint64_t> sw_seed;
  sw->add_option("scenario", sw_file, "Scenario file")->required()->check(CLI::ExistingFile);
  sw->add_option("--param", sw_param, "Parameter name")->required();
  sw->add_option("--values", sw_values, "Comma-separated values")->required()->delimiter(',');
  sw->add_option("--seeds", sw_seeds, "Runs per value")->capture_default_str();
  sw->add_option("--threads", sw_threads, "Worker threads, 0 for all cores")->capture_default_str();
  sw->add_option("--out", sw_out, "CSV output file");
  sw->add_option("--seed", sw_seed, "Base seed override");

  auto* an = app.add_subcommand("analyze", "Closed-form formulas");
  an->require_subcommand(1);
  auto* bday = an->add_subcommand("birthday", "Collision probability and time between collisions");
  std::string b_n, b_d = "2^48";
  double b_window = 1.0;
  bool b_exact = false;
  bday->add_option("--n", b_n, "Draws, e.g. 5e6")->required();
  bday->add_option("--d", b_d, "Signature space, e.g. 2^48")->capture_default_str();
  bday->add_option("--window", b_window, "Seconds per trial")->capture_default_str();
  bday->add_flag("--exact", b_exact, "Use the product form");

  auto* rounds = an->add_subcommand("rounds", "Expected migration rounds and times");
  double r_c1 = 0, r_rho = 25'000, r_delta = 10, r_fib_rate = 0, r_read = 1e7, r_overhead = 400e-6;
  rounds->add_option("--c1", r_c1, "Connections in the bin")->required();
  rounds->add_option("--rho", r_rho, "MCT write rate per second")->capture_default_str();
  rounds->add_option("--delta", r_delta, "New connections per second in the bin")
      ->capture_default_str();
  rounds->add_option("--fib-rate", r_fib_rate, "FIB arrivals per second between rounds")
      ->capture_default_str();
  rounds->add_option("--read-rate", r_read, "FIB read rate")->capture_default_str();
  rounds->add_option("--overhead", r_overhead, "Poll overhead in seconds")->capture_default_str();

  auto* mig = an->add_subcommand("migration", "Migration probability and loss interval");
  double m_m = 0, m_s = 0;
  std::string m_n, m_d = "2^48";
  mig->add_option("--m", m_m, "Updates during a connection lifetime")->required();
  mig->add_option("--s", m_s, "DIP pool size")->required();
  mig->add_option("--n", m_n, "Connections per window for the loss interval");
  mig->add_option("--d", m_d, "Signature space")->capture_default_str();

  auto* st = app.add_subcommand("selftest", "Run the randomized invariant suite");
  std::size_t st_count = 10;
  std::uint64_t st_seed = 1;
  st->add_option("--count", st_count, "Scenarios")->capture_default_str();
  st->add_option("--seed", st_seed, "First seed")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) return cmd_simulate(sim_file, sim_out, sim_seed, sim_policy);
    if (*sw) return cmd_sweep(sw_file, sw_param, sw_values, sw_seeds, sw_threads, sw_out, sw_seed);
    if (*bday) {
      const double n = analysis::parse_quantity(b_n);
      const double d = analysis::parse_quantity(b_d);
      const double p = analysis::birthday_collision_prob(n, d, b_exact);
      fmt::print("p = {:.6f}\ntime_between = {:.3f}\n", p,
                 analysis::time_between_collisions(n, d, b_window));
      return 0;
    }
    if (*rounds) {
      const auto f = analysis::expected_rounds_and_times(r_c1, r_rho, r_delta);
      fmt::print("rounds = {}\n", f.rounds);
      for (std::size_t i = 0; i < f.counts.size(); ++i) {
        fmt::print("C_{} = {:.6f}", i + 1, f.counts[i]);
        if (i < f.times_s.size()) fmt::print("  T_{} = {:.6f} ms", i + 1, f.times_s[i] * 1e3);
        fmt::print("\n");
      }
      fmt::print("copy_time = {:.6f} ms\n", f.copy_time_s * 1e3);
      fmt::print("total_time = {:.6f} ms\n",
                 analysis::expected_migration_time(r_c1, r_rho, r_delta, r_fib_rate, r_read,
                                                   r_overhead) * 1e3);
      return 0;
    }
    if (*mig) {
      fmt::print("migration_prob = {:.6f}\n", analysis::migration_prob(m_m, m_s));
      if (!m_n.empty()) {
        const double between = analysis::time_between_collisions(
            analysis::parse_quantity(m_n), analysis::parse_quantity(m_d));
        fmt::print("loss_interval_hours = {:.4f}\n",
                   analysis::expected_loss_interval_hours(between, m_m, m_s));
      }
      return 0;
    }
    if (*st) return cmd_selftest(st_count, st_seed);
  } catch (const prism::Error& e) {
    fmt::print(stderr, "error: {}: {}\n", prism::to_string(e.code()), e.what());
    return 2;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  }
  return 0;
}
