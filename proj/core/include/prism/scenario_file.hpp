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

#include <filesystem>
#include <string>
#include <string_view>

#include "prism/workload.hpp"

namespace prism {

// Flat `key = value` scenario files. `#` starts a comment. Durations take a
// unit suffix (ns, us, ms, s); a bare number means seconds. Updates are
// repeated `update = <t_ms> <vip> <kind> [dip=N] [weight=a/b] [weights=w,..]
// [count=N] [bins=b,..] [pick=N]` lines and hot bins are
// `hot_bin = <vip> <bin> <count>` lines.
//
// Errors are Error(kConfigError) carrying `<origin>:<line>: <reason>`.
Scenario parse_scenario(std::string_view text, std::string_view origin = "<scenario>");
Scenario load_scenario(const std::filesystem::path& path);

// Applies one setting. Throws Error(kConfigError) without location.
void apply_setting(Scenario& s, std::string_view key, std::string_view value);

// Canonical text that parses back to an equivalent scenario.
std::string render_scenario(const Scenario& s);

VirtualTime parse_duration(std::string_view text);

}  // namespace prism
