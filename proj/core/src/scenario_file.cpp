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

#include "prism/scenario_file.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "prism/bin_selection.hpp"
#include "prism/error.hpp"
#include "prism/metrics.hpp"

namespace prism {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad(std::string_view key, std::string_view value) {
  throw Error(ErrorCode::kConfigError, fmt::format("bad value '{}' for {}", value, key));
}

double to_double(std::string_view key, std::string_view v) {
  const std::string s(trim(v));
  try {
    std::size_t used = 0;
    const double d = std::stod(s, &used);
    if (used != s.size()) bad(key, v);
    return d;
  } catch (const std::logic_error&) {
    bad(key, v);
  }
}

std::uint64_t to_uint(std::string_view key, std::string_view v) {
  v = trim(v);
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) bad(key, v);
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  v = trim(v);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad(key, v);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    const auto p = s.find(sep);
    const auto part = trim(s.substr(0, p));
    if (!part.empty()) out.push_back(part);
    if (p == std::string_view::npos) break;
    s = s.substr(p + 1);
  }
  return out;
}

std::vector<std::string_view> words(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

std::string render_duration(VirtualTime t) {
  const auto ns = t.count();
  if (ns % 1'000'000'000 == 0) return fmt::format("{}s", ns / 1'000'000'000);
  if (ns % 1'000'000 == 0) return fmt::format("{}ms", ns / 1'000'000);
  if (ns % 1'000 == 0) return fmt::format("{}us", ns / 1'000);
  return fmt::format("{}ns", ns);
}

std::string render_number(double v) { return fmt::format("{}", v); }

ScheduledUpdate parse_update(std::string_view value) {
  const auto w = words(value);
  if (w.size() < 3) bad("update", value);
  ScheduledUpdate u;
  u.at = from_seconds(to_double("update", w[0]) / 1000.0);
  const auto vip = to_uint("update", w[1]);
  if (vip > 0xFFFF) bad("update", value);
  u.cmd.vip = VipId{static_cast<std::uint16_t>(vip)};
  u.cmd.kind = parse_update_kind(w[2]);
  for (std::size_t i = 3; i < w.size(); ++i) {
    const auto eq = w[i].find('=');
    if (eq == std::string_view::npos) bad("update", w[i]);
    const auto k = w[i].substr(0, eq);
    const auto v = w[i].substr(eq + 1);
    if (k == "dip") {
      u.cmd.dip_ordinal = to_uint("update dip", v);
    } else if (k == "weight") {
      u.cmd.weight = Rational::parse(v);
    } else if (k == "weights") {
      for (auto part : split(v, ',')) u.cmd.weights.push_back(Rational::parse(part));
    } else if (k == "count") {
      u.cmd.count = to_uint("update count", v);
    } else if (k == "bins") {
      for (auto part : split(v, ',')) {
        u.cmd.bins.push_back(static_cast<BinIndex>(to_uint("update bins", part)));
      }
    } else if (k == "pick") {
      u.cmd.pick = to_uint("update pick", v);
    } else {
      bad("update", w[i]);
    }
  }
  return u;
}

std::string render_update(const ScheduledUpdate& u) {
  std::string out = fmt::format("{} {} {}", format_millis(u.at), u.cmd.vip.value, to_string(u.cmd.kind));
  if (u.cmd.dip_ordinal) out += fmt::format(" dip={}", *u.cmd.dip_ordinal);
  if (u.cmd.weight) out += " weight=" + u.cmd.weight->to_string();
  if (!u.cmd.weights.empty()) {
    out += " weights=";
    for (std::size_t i = 0; i < u.cmd.weights.size(); ++i) {
      if (i) out += ',';
      out += u.cmd.weights[i].to_string();
    }
  }
  if (u.cmd.count != 1) out += fmt::format(" count={}", u.cmd.count);
  if (!u.cmd.bins.empty()) {
    out += " bins=";
    for (std::size_t i = 0; i < u.cmd.bins.size(); ++i) {
      if (i) out += ',';
      out += std::to_string(u.cmd.bins[i]);
    }
  }
  if (u.cmd.pick != 0) out += fmt::format(" pick={}", u.cmd.pick);
  return out;
}

using Setter = std::function<void(Scenario&, std::string_view, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = [] {
    std::map<std::string, Setter, std::less<>> t;
    auto dur = [&t](const char* key, auto member) {
      t[key] = [member](Scenario& s, std::string_view, std::string_view v) {
        s.config.*member = parse_duration(v);
      };
    };
    auto real = [&t](const char* key, auto member) {
      t[key] = [member](Scenario& s, std::string_view k, std::string_view v) {
        s.config.*member = to_double(k, v);
      };
    };
    auto count = [&t](const char* key, auto member) {
      t[key] = [member](Scenario& s, std::string_view k, std::string_view v) {
        s.config.*member = to_uint(k, v);
      };
    };
    dur("poll_interval", &SimConfig::poll_interval);
    real("mct_write_rate", &SimConfig::mct_write_rate);
    t["rho"] = t["mct_write_rate"];
    real("fib_read_rate", &SimConfig::fib_read_rate);
    dur("fib_poll_overhead", &SimConfig::fib_poll_overhead);
    dur("delta_window", &SimConfig::delta_window);
    dur("syn2_timeout", &SimConfig::syn2_timeout);
    dur("t_limit", &SimConfig::t_limit);
    count("rng_seed", &SimConfig::rng_seed);
    t["signature_hash_bits"] = [](Scenario& s, std::string_view k, std::string_view v) {
      s.config.signature_hash_bits = static_cast<int>(to_uint(k, v));
    };
    count("fib_capacity", &SimConfig::fib_capacity);
    count("mct_capacity", &SimConfig::mct_capacity);
    count("cuckoo_slots_per_bucket", &SimConfig::cuckoo_slots_per_bucket);
    count("cuckoo_max_kicks", &SimConfig::cuckoo_max_kicks);
    dur("probe_interval", &SimConfig::probe_interval);
    real("suspect_multiplier", &SimConfig::suspect_multiplier);
    real("lifetime_ewma_alpha", &SimConfig::lifetime_ewma_alpha);
    real("syn_rate_ewma_alpha", &SimConfig::syn_rate_ewma_alpha);
    count("bins_per_dip", &SimConfig::bins_per_dip);
    count("max_ecmp_length", &SimConfig::max_ecmp_length);
    dur("trap_delay", &SimConfig::trap_delay);
    t["check_invariants"] = [](Scenario& s, std::string_view k, std::string_view v) {
      s.config.check_invariants = to_bool(k, v);
    };

    t["vips"] = [](Scenario& s, std::string_view k, std::string_view v) { s.vips = to_uint(k, v); };
    t["dips_per_vip"] = [](Scenario& s, std::string_view k, std::string_view v) {
      s.dips_per_vip.clear();
      for (auto part : split(v, ',')) s.dips_per_vip.push_back(to_uint(k, part));
    };
    t["ecmp_length"] = [](Scenario& s, std::string_view k, std::string_view v) {
      s.ecmp_length = to_uint(k, v);
    };
    t["arrival_rate"] = [](Scenario& s, std::string_view k, std::string_view v) {
      s.arrival_rate = to_double(k, v);
    };
    t["vip_arrival_rates"] = [](Scenario& s, std::string_view k, std::string_view v) {
      s.vip_arrival_rates.clear();
      for (auto part : split(v, ',')) s.vip_arrival_rates.push_back(to_double(k, part));
    };
    t["lifetime"] = [](Scenario& s, std::string_view, std::string_view v) {
      s.lifetime = LifetimeDist::parse(v);
    };
    t["lifetime_mean"] = [](Scenario& s, std::string_view k, std::string_view v) {
      const double m = to_double(k, v);
      if (!(m > 0.0)) bad(k, v);
      s.lifetime = s.lifetime.with_mean(m);
    };
    t["data_packet_rate"] = [](Scenario& s, std::string_view k, std::string_view v) {
      s.data_packet_rate = to_double(k, v);
    };
    t["rtt"] = [](Scenario& s, std::string_view, std::string_view v) { s.rtt = parse_duration(v); };
    t["rst_fraction"] = [](Scenario& s, std::string_view k, std::string_view v) {
      s.rst_fraction = to_double(k, v);
    };
    t["dead_client_fraction"] = [](Scenario& s, std::string_view k, std::string_view v) {
      s.dead_client_fraction = to_double(k, v);
    };
    t["syn_retx_fraction"] = [](Scenario& s, std::string_view k, std::string_view v) {
      s.syn_retx_fraction = to_double(k, v);
    };
    t["syn_retx_late_fraction"] = [](Scenario& s, std::string_view k, std::string_view v) {
      s.syn_retx_late_fraction = to_double(k, v);
    };
    t["duration"] = [](Scenario& s, std::string_view, std::string_view v) {
      s.duration = parse_duration(v);
    };
    t["seed"] = [](Scenario& s, std::string_view k, std::string_view v) { s.seed = to_uint(k, v); };
    t["update_rate"] = [](Scenario& s, std::string_view k, std::string_view v) {
      s.update_rate = to_double(k, v);
    };
    t["update_kinds"] = [](Scenario& s, std::string_view, std::string_view v) {
      s.update_kinds.clear();
      for (auto part : split(v, ',')) s.update_kinds.push_back(parse_update_kind(part));
    };
    t["update"] = [](Scenario& s, std::string_view, std::string_view v) {
      s.updates.push_back(parse_update(v));
    };
    t["policy"] = [](Scenario& s, std::string_view, std::string_view v) {
      s.policy = BinSelectionPolicy::parse(trim(v)).name();
    };
    t["warmup"] = [](Scenario& s, std::string_view, std::string_view v) {
      s.warmup = parse_duration(v);
    };
    t["hot_bin"] = [](Scenario& s, std::string_view k, std::string_view v) {
      const auto w = words(v);
      if (w.size() != 3) bad(k, v);
      const auto vip = to_uint(k, w[0]);
      if (vip > 0xFFFF) bad(k, v);
      s.hot_bins.push_back(HotBin{VipId{static_cast<std::uint16_t>(vip)},
                                  static_cast<BinIndex>(to_uint(k, w[1])), to_uint(k, w[2])});
    };
    t["stop_when_idle"] = [](Scenario& s, std::string_view k, std::string_view v) {
      s.stop_when_idle = to_bool(k, v);
    };
    t["sample_interval"] = [](Scenario& s, std::string_view, std::string_view v) {
      s.sample_interval = parse_duration(v);
    };
    return t;
  }();
  return table;
}

}  // namespace

VirtualTime parse_duration(std::string_view text) {
  text = trim(text);
  struct Unit {
    std::string_view suffix;
    double scale;
  };
  static constexpr Unit kUnits[] = {{"ns", 1e-9}, {"us", 1e-6}, {"ms", 1e-3}, {"s", 1.0}};
  for (const auto& u : kUnits) {
    if (text.size() > u.suffix.size() && text.substr(text.size() - u.suffix.size()) == u.suffix) {
      const auto number = text.substr(0, text.size() - u.suffix.size());
      const double v = to_double("duration", number);
      if (v < 0.0) bad("duration", text);
      if (u.suffix == "ns") return VirtualTime(static_cast<std::int64_t>(std::llround(v)));
      return from_seconds(v * u.scale);
    }
  }
  const double v = to_double("duration", text);
  if (v < 0.0) bad("duration", text);
  return from_seconds(v);
}

void apply_setting(Scenario& s, std::string_view key, std::string_view value) {
  const auto& table = setters();
  auto it = table.find(key);
  if (it == table.end()) {
    throw Error(ErrorCode::kConfigError, fmt::format("unknown key '{}'", key));
  }
  it->second(s, key, value);
}

Scenario parse_scenario(std::string_view text, std::string_view origin) {
  Scenario s;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    try {
      if (eq == std::string_view::npos) {
        throw Error(ErrorCode::kConfigError, "expected 'key = value'");
      }
      apply_setting(s, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const Error& e) {
      throw Error(ErrorCode::kConfigError, fmt::format("{}:{}: {}", origin, line_no, e.what()));
    }
  }
  try {
    s.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfigError, fmt::format("{}: {}", origin, e.what()));
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kConfigError, "cannot read scenario " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.string());
}

std::string render_scenario(const Scenario& s) {
  std::string out;
  auto kv = [&out](std::string_view k, const std::string& v) {
    out += fmt::format("{} = {}\n", k, v);
  };
  auto join = [](const auto& values, auto fn) {
    std::string r;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) r += ',';
      r += fn(values[i]);
    }
    return r;
  };
  kv("vips", std::to_string(s.vips));
  kv("dips_per_vip", join(s.dips_per_vip, [](std::size_t d) { return std::to_string(d); }));
  if (s.ecmp_length) kv("ecmp_length", std::to_string(*s.ecmp_length));
  kv("arrival_rate", render_number(s.arrival_rate));
  if (!s.vip_arrival_rates.empty()) {
    kv("vip_arrival_rates", join(s.vip_arrival_rates, render_number));
  }
  kv("lifetime", s.lifetime.describe());
  kv("data_packet_rate", render_number(s.data_packet_rate));
  kv("rtt", render_duration(s.rtt));
  kv("rst_fraction", render_number(s.rst_fraction));
  kv("dead_client_fraction", render_number(s.dead_client_fraction));
  kv("syn_retx_fraction", render_number(s.syn_retx_fraction));
  kv("syn_retx_late_fraction", render_number(s.syn_retx_late_fraction));
  kv("duration", render_duration(s.duration));
  kv("seed", std::to_string(s.seed));
  kv("update_rate", render_number(s.update_rate));
  kv("update_kinds", join(s.update_kinds, [](UpdateKind k) { return std::string(to_string(k)); }));
  for (const auto& u : s.updates) kv("update", render_update(u));
  kv("policy", s.policy);
  kv("warmup", render_duration(s.warmup));
  for (const auto& h : s.hot_bins) kv("hot_bin", fmt::format("{} {} {}", h.vip.value, h.bin, h.count));
  kv("stop_when_idle", s.stop_when_idle ? "true" : "false");
  kv("sample_interval", render_duration(s.sample_interval));

  const SimConfig& c = s.config;
  kv("poll_interval", render_duration(c.poll_interval));
  kv("mct_write_rate", render_number(c.mct_write_rate));
  kv("fib_read_rate", render_number(c.fib_read_rate));
  kv("fib_poll_overhead", render_duration(c.fib_poll_overhead));
  kv("delta_window", render_duration(c.delta_window));
  kv("syn2_timeout", render_duration(c.syn2_timeout));
  kv("t_limit", render_duration(c.t_limit));
  kv("rng_seed", std::to_string(c.rng_seed));
  kv("signature_hash_bits", std::to_string(c.signature_hash_bits));
  kv("fib_capacity", std::to_string(c.fib_capacity));
  kv("mct_capacity", std::to_string(c.mct_capacity));
  kv("cuckoo_slots_per_bucket", std::to_string(c.cuckoo_slots_per_bucket));
  kv("cuckoo_max_kicks", std::to_string(c.cuckoo_max_kicks));
  kv("probe_interval", render_duration(c.probe_interval));
  kv("suspect_multiplier", render_number(c.suspect_multiplier));
  kv("lifetime_ewma_alpha", render_number(c.lifetime_ewma_alpha));
  kv("syn_rate_ewma_alpha", render_number(c.syn_rate_ewma_alpha));
  kv("bins_per_dip", std::to_string(c.bins_per_dip));
  kv("max_ecmp_length", std::to_string(c.max_ecmp_length));
  kv("trap_delay", render_duration(c.trap_delay));
  kv("check_invariants", c.check_invariants ? "true" : "false");
  return out;
}

}  // namespace prism
