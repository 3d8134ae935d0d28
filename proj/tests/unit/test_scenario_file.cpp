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

#include <filesystem>
#include <string>

#include <gtest/gtest.h>

#include "prism/error.hpp"

namespace prism {
namespace {

std::string error_of(std::string_view text) {
  try {
    parse_scenario(text, "t.scn");
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfigError);
    return e.what();
  }
  ADD_FAILURE() << "parsed without error";
  return {};
}

TEST(ScenarioFile, ParsesKeysAndComments) {
  const auto s = parse_scenario(R"(
# comment line
vips = 3          # trailing comment
dips_per_vip = 4,5,6
arrival_rate = 2500
lifetime = lognormal 1.0 0.5
duration = 1500ms
delta_window = 2s
poll_interval = 5ms
rho = 30000
policy = blended:0.3
update_kinds = take_down, add_dip
)");
  EXPECT_EQ(s.vips, 3u);
  EXPECT_EQ(s.dips_for(1), 5u);
  EXPECT_EQ(s.arrival_rate, 2500.0);
  EXPECT_EQ(s.lifetime.kind, LifetimeDist::Kind::kLogNormal);
  EXPECT_EQ(s.duration, from_millis(1500));
  EXPECT_EQ(s.config.delta_window, from_seconds(2));
  EXPECT_EQ(s.config.poll_interval, from_millis(5));
  EXPECT_EQ(s.config.mct_write_rate, 30000.0);
  EXPECT_EQ(s.policy, "blended:0.3");
  ASSERT_EQ(s.update_kinds.size(), 2u);
  EXPECT_EQ(s.update_kinds[1], UpdateKind::kAddDip);
}

TEST(ScenarioFile, Durations) {
  EXPECT_EQ(parse_duration("5"), from_seconds(5));
  EXPECT_EQ(parse_duration("2.5s"), from_millis(2500));
  EXPECT_EQ(parse_duration("10ms"), from_millis(10));
  EXPECT_EQ(parse_duration("400us"), from_micros(400));
  EXPECT_EQ(parse_duration("7ns"), VirtualTime{7});
  EXPECT_THROW(parse_duration("fast"), Error);
  EXPECT_THROW(parse_duration("5h"), Error);
}

TEST(ScenarioFile, UpdatesAndHotBins) {
  const auto s = parse_scenario(R"(
vips = 2
dips_per_vip = 4
ecmp_length = 64
update = 50 0 move_bin bins=3,9
update = 1000 1 add_dip weight=1/5
update = 2000 1 reweight weights=1,1,2,2
update = 3000 0 take_down dip=2
update = 4000 0 rebin count=4 pick=11
hot_bin = 0 3 500
stop_when_idle = true
)");
  ASSERT_EQ(s.updates.size(), 5u);
  EXPECT_EQ(s.updates[0].at, from_millis(50));
  EXPECT_EQ(s.updates[0].cmd.kind, UpdateKind::kMoveBin);
  EXPECT_EQ(s.updates[0].cmd.bins, (std::vector<BinIndex>{3, 9}));
  EXPECT_EQ(s.updates[1].cmd.vip, VipId{1});
  EXPECT_EQ(*s.updates[1].cmd.weight, Rational(1, 5));
  EXPECT_EQ(s.updates[2].cmd.weights.size(), 4u);
  EXPECT_EQ(*s.updates[3].cmd.dip_ordinal, 2u);
  EXPECT_EQ(s.updates[4].cmd.count, 4u);
  EXPECT_EQ(s.updates[4].cmd.pick, 11u);
  ASSERT_EQ(s.hot_bins.size(), 1u);
  EXPECT_EQ(s.hot_bins[0].count, 500u);
  EXPECT_TRUE(s.stop_when_idle);
}

TEST(ScenarioFile, ErrorsCarryLocation) {
  EXPECT_NE(error_of("vips = 1\narrival_rate = fast\n").find("t.scn:2:"), std::string::npos);
  EXPECT_NE(error_of("bogus_key = 1\n").find("t.scn:1:"), std::string::npos);
  EXPECT_NE(error_of("vips 3\n").find("t.scn:1:"), std::string::npos);
  EXPECT_NE(error_of("ecmp_length = 100\n").find("power of two"), std::string::npos);
  EXPECT_NE(error_of("stop_when_idle = true\n").find("scheduled updates"), std::string::npos);
  EXPECT_NE(error_of("update = 5 4 replace\n").find("unknown VIP"), std::string::npos);
  EXPECT_NE(error_of("update = 5 0 explode\n").find("t.scn:1:"), std::string::npos);
  EXPECT_NE(error_of("signature_hash_bits = 60\n").find("t.scn"), std::string::npos);
}

TEST(ScenarioFile, RenderRoundTrips) {
  Scenario s = parse_scenario(R"(
vips = 2
dips_per_vip = 4,6
vip_arrival_rates = 100,300
lifetime = fixed 3
rtt = 250us
update = 125 1 replace dip=1
hot_bin = 1 2 10
warmup = 2s
sample_interval = 50ms
check_invariants = false
)");
  const std::string text = render_scenario(s);
  const Scenario back = parse_scenario(text);
  EXPECT_EQ(render_scenario(back), text);
  EXPECT_EQ(back.rtt, from_micros(250));
  EXPECT_EQ(back.total_rate(), 400.0);
  EXPECT_FALSE(back.config.check_invariants);
}

TEST(ScenarioFile, LifetimeMeanRescales) {
  const auto s = parse_scenario("lifetime = uniform 1 9\nlifetime_mean = 10\n");
  EXPECT_NEAR(s.lifetime.mean(), 10.0, 1e-12);
  EXPECT_EQ(s.lifetime.kind, LifetimeDist::Kind::kUniform);
}

TEST(ScenarioFile, ShippedScenariosLoad) {
  const std::filesystem::path dir = PRISM_SCENARIO_DIR;
  std::size_t count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".scn") continue;
    EXPECT_NO_THROW(load_scenario(entry.path())) << entry.path();
    ++count;
  }
  EXPECT_GE(count, 5u);
}

TEST(ScenarioFile, MissingFile) {
  EXPECT_THROW(load_scenario("/nonexistent/x.scn"), Error);
}

}  // namespace
}  // namespace prism
