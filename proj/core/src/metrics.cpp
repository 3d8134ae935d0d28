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

#include "prism/metrics.hpp"

#include <cmath>
#include <fstream>
#include <system_error>

#include <fmt/format.h>

#include "prism/error.hpp"

namespace prism {

const char* metrics_csv_header() {
  return "time,active_connections,mct_occupancy,mct_fraction,sct_size,fib_depths,"
         "trapped_syns_cum,migrated_cum,pcc_violations_cum,broken_by_collision_cum";
}

std::string to_csv_row(const MetricsFrame& f) {
  std::string depths;
  for (std::size_t i = 0; i < f.fib_depths.size(); ++i) {
    if (i) depths += ';';
    depths += std::to_string(f.fib_depths[i]);
  }
  return fmt::format("{:.3f},{},{},{:.9f},{},{},{},{},{},{}", to_seconds(f.time),
                     f.active_connections, f.mct_occupancy, f.mct_fraction, f.sct_size, depths,
                     f.trapped_syns_cum, f.migrated_cum, f.pcc_violations_cum,
                     f.broken_by_collision_cum);
}

std::string to_csv(const std::vector<MetricsFrame>& frames) {
  std::string out = metrics_csv_header();
  out += '\n';
  for (const auto& f : frames) {
    out += to_csv_row(f);
    out += '\n';
  }
  return out;
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return fmt::format("{:.6f}", v);
}

std::string format_millis(VirtualTime t) {
  const auto ns = t.count();
  const char* sign = ns < 0 ? "-" : "";
  const auto mag = ns < 0 ? -ns : ns;
  return fmt::format("{}{}.{:06d}", sign, mag / 1'000'000, mag % 1'000'000);
}

void SummaryDocument::section(std::string name) { sections_.emplace_back(std::move(name), Section{}); }

void SummaryDocument::set(std::string key, std::string value) {
  if (sections_.empty()) section("run");
  sections_.back().second.emplace_back(std::move(key), std::move(value));
}

void SummaryDocument::set(std::string key, std::uint64_t value) {
  set(std::move(key), std::to_string(value));
}

void SummaryDocument::set(std::string key, std::int64_t value) {
  set(std::move(key), std::to_string(value));
}

void SummaryDocument::set(std::string key, double value) {
  set(std::move(key), format_double(value));
}

void SummaryDocument::set(std::string key, bool value) {
  set(std::move(key), std::string(value ? "true" : "false"));
}

std::string SummaryDocument::render() const {
  std::string out;
  for (const auto& [name, entries] : sections_) {
    out += "section: " + name + "\n";
    for (const auto& [k, v] : entries) out += k + " = " + v + "\n";
    out += "\n";
  }
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

SummaryDocument SummaryDocument::parse(std::string_view text) {
  SummaryDocument doc;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty()) continue;
    if (line.substr(0, 8) == "section:") {
      doc.section(std::string(trim(line.substr(8))));
      continue;
    }
    const auto eq = line.find(" = ");
    if (eq == std::string_view::npos || doc.sections_.empty()) {
      throw Error(ErrorCode::kConfigError, fmt::format("summary line {}: malformed", line_no));
    }
    doc.set(std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 3))));
  }
  return doc;
}

bool SummaryDocument::has(std::string_view section, std::string_view key) const {
  for (const auto& [name, entries] : sections_) {
    if (name != section) continue;
    for (const auto& [k, v] : entries) {
      if (k == key) return true;
    }
  }
  return false;
}

const std::string& SummaryDocument::get(std::string_view section, std::string_view key) const {
  for (const auto& [name, entries] : sections_) {
    if (name != section) continue;
    for (const auto& [k, v] : entries) {
      if (k == key) return v;
    }
  }
  throw Error(ErrorCode::kInvalidArgument,
              fmt::format("summary has no key '{}' in section '{}'", key, section));
}

double SummaryDocument::get_double(std::string_view section, std::string_view key) const {
  const std::string& v = get(section, key);
  if (v == "inf") return HUGE_VAL;
  return std::stod(v);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kConfigError, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(ErrorCode::kConfigError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kConfigError, "rename failed for " + path.string());
}

}  // namespace prism
