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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "prism/fib_table.hpp"
#include "prism/types.hpp"

namespace prism {

struct MetricsFrame {
  VirtualTime time{};
  std::size_t active_connections = 0;
  std::size_t mct_occupancy = 0;
  double mct_fraction = 0.0;  // mct_occupancy / active_connections
  std::size_t sct_size = 0;
  std::array<std::size_t, kFibKinds> fib_depths{};
  std::uint64_t trapped_syns_cum = 0;
  std::uint64_t migrated_cum = 0;
  std::uint64_t pcc_violations_cum = 0;
  std::uint64_t broken_by_collision_cum = 0;
};

const char* metrics_csv_header();
std::string to_csv_row(const MetricsFrame& f);
std::string to_csv(const std::vector<MetricsFrame>& frames);

// Ordered `section:` / `key = value` text document.
class SummaryDocument {
 public:
  using Section = std::vector<std::pair<std::string, std::string>>;

  void section(std::string name);
  void set(std::string key, std::string value);
  void set(std::string key, std::uint64_t value);
  void set(std::string key, std::int64_t value);
  void set(std::string key, double value);
  void set(std::string key, bool value);
  void set(std::string key, const char* value) { set(std::move(key), std::string(value)); }

  std::string render() const;
  // Throws Error(kConfigError) on malformed input.
  static SummaryDocument parse(std::string_view text);

  bool has(std::string_view section, std::string_view key) const;
  const std::string& get(std::string_view section, std::string_view key) const;
  double get_double(std::string_view section, std::string_view key) const;
  const std::vector<std::pair<std::string, Section>>& sections() const { return sections_; }

 private:
  std::vector<std::pair<std::string, Section>> sections_;
};

// Fixed-precision rendering used by every output file.
std::string format_double(double v);
std::string format_millis(VirtualTime t);

// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace prism
