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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "prism/error.hpp"

namespace prism {
namespace {

TEST(Metrics, CsvRowFormat) {
  MetricsFrame f;
  f.time = from_millis(1500);
  f.active_connections = 200;
  f.mct_occupancy = 3;
  f.mct_fraction = 0.015;
  f.sct_size = 201;
  f.fib_depths = {1, 2, 3, 4, 5, 6};
  f.trapped_syns_cum = 7;
  f.migrated_cum = 8;
  f.pcc_violations_cum = 9;
  f.broken_by_collision_cum = 10;
  EXPECT_EQ(to_csv_row(f), "1.500,200,3,0.015000000,201,1;2;3;4;5;6,7,8,9,10");
  const std::string csv = to_csv({f, f});
  EXPECT_EQ(csv.rfind(metrics_csv_header(), 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}

TEST(Metrics, FormatHelpers) {
  EXPECT_EQ(format_double(0.1), "0.100000");
  EXPECT_EQ(format_double(1.0 / 0.0), "inf");
  EXPECT_EQ(format_millis(VirtualTime{44'040'000}), "44.040000");
  EXPECT_EQ(format_millis(VirtualTime{1}), "0.000001");
  EXPECT_EQ(format_millis(VirtualTime{-2'500'000}), "-2.500000");
}

TEST(Summary, RenderParseRoundTrip) {
  SummaryDocument doc;
  doc.section("run");
  doc.set("status", "ok");
  doc.set("events", std::uint64_t{42});
  doc.set("offset", std::int64_t{-3});
  doc.section("metrics");
  doc.set("mean", 0.25);
  doc.set("flag", true);
  const std::string text = doc.render();
  EXPECT_EQ(text,
            "section: run\nstatus = ok\nevents = 42\noffset = -3\n\n"
            "section: metrics\nmean = 0.250000\nflag = true\n\n");
  const auto back = SummaryDocument::parse(text);
  EXPECT_EQ(back.render(), text);
  EXPECT_TRUE(back.has("run", "events"));
  EXPECT_FALSE(back.has("run", "missing"));
  EXPECT_EQ(back.get("run", "status"), "ok");
  EXPECT_DOUBLE_EQ(back.get_double("metrics", "mean"), 0.25);
}

TEST(Summary, MalformedInputThrows) {
  EXPECT_THROW(SummaryDocument::parse("status = ok\n"), Error);
  EXPECT_THROW(SummaryDocument::parse("section: run\nnot a pair\n"), Error);
}

TEST(Summary, MissingKeyThrows) {
  SummaryDocument doc;
  doc.section("run");
  EXPECT_THROW(doc.get("run", "nope"), Error);
}

TEST(Metrics, AtomicWriteReplacesFile) {
  const auto dir = std::filesystem::temp_directory_path() / "prism_metrics_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "out.txt";
  write_file_atomic(path, "first\n");
  write_file_atomic(path, "second\n");
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  EXPECT_EQ(buf.str(), "second\n");
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    (void)e;
    ++files;
  }
  EXPECT_EQ(files, 1u);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace prism
