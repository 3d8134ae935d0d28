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

#include "prism/pcc_oracle.hpp"

#include <gtest/gtest.h>

namespace prism {
namespace {

class PccOracleTest : public ::testing::Test {
 protected:
  PccOracleTest() : oracle(registry) {}

  ConnectionKey key(std::uint16_t port) const { return ConnectionKey{1, 2, port, 80, 6}; }

  VipRegistry registry;
  PccOracle oracle;
};

TEST_F(PccOracleTest, ConsistentConnectionHasNoViolation) {
  oracle.open(1, key(1), Signature{VipId{0}, 10}, DipId{3}, VirtualTime{});
  for (int i = 0; i < 5; ++i) oracle.observe(1, DipId{3}, from_millis(i));
  oracle.close(1);
  EXPECT_EQ(oracle.totals().violations, 0u);
  EXPECT_EQ(oracle.totals().packets_checked, 5u);
  EXPECT_EQ(oracle.active(), 0u);
}

TEST_F(PccOracleTest, ViolationCountedOncePerConnection) {
  oracle.open(1, key(1), Signature{VipId{0}, 10}, DipId{3}, VirtualTime{});
  oracle.observe(1, DipId{4}, from_millis(1));
  oracle.observe(1, DipId{4}, from_millis(2));
  EXPECT_EQ(oracle.totals().violations, 1u);
  EXPECT_EQ(oracle.totals().violating_packets, 2u);
  ASSERT_EQ(oracle.log().size(), 1u);
  EXPECT_EQ(oracle.log()[0].expected, DipId{3});
  EXPECT_EQ(oracle.log()[0].actual, DipId{4});
  EXPECT_FALSE(oracle.log()[0].collision);
}

TEST_F(PccOracleTest, CollisionAttribution) {
  const Signature shared{VipId{0}, 99};
  oracle.open(1, key(1), shared, DipId{3}, VirtualTime{});
  oracle.open(2, key(2), shared, DipId{3}, from_seconds(6));
  EXPECT_EQ(oracle.totals().colliding_connections, 2u);
  oracle.observe(2, DipId{5}, from_seconds(7));
  EXPECT_EQ(oracle.totals().broken_by_collision, 1u);
  EXPECT_TRUE(oracle.log()[0].collision);
}

TEST_F(PccOracleTest, FailedFirstDipIsExempt) {
  oracle.open(1, key(1), Signature{VipId{0}, 10}, DipId{3}, VirtualTime{});
  registry.mark_failed(DipId{3});
  oracle.observe(1, DipId{4}, from_millis(1));
  EXPECT_EQ(oracle.totals().violations, 0u);
  EXPECT_EQ(oracle.totals().first_dip_failed, 1u);
}

TEST_F(PccOracleTest, ClosedConnectionsAreIgnored) {
  oracle.open(1, key(1), Signature{VipId{0}, 10}, DipId{3}, VirtualTime{});
  oracle.close(1);
  oracle.observe(1, DipId{4}, from_millis(1));
  oracle.close(1);
  EXPECT_EQ(oracle.totals().violations, 0u);
  // A later connection with the same signature does not inherit a collision.
  oracle.open(2, key(2), Signature{VipId{0}, 10}, DipId{3}, from_millis(2));
  EXPECT_EQ(oracle.totals().colliding_connections, 0u);
}

}  // namespace
}  // namespace prism
