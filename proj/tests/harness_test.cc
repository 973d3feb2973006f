// Copyright 2026 The psu-align Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <unistd.h>

#include <fstream>
#include <sstream>

#include "gtest/gtest.h"

#include "psu/error.h"
#include "psu/harness.h"

namespace psu {
namespace {

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("psu_harness_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

void Write(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary | std::ios::trunc) << text;
}

std::string Read(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInvalidConfig;
}

std::string ConfigJson(int parties, const std::string& extra = "") {
  std::string ds;
  for (int k = 0; k < parties; ++k) {
    if (k) ds += ",";
    ds += R"({"path": "d)" + std::to_string(k) +
          R"(.csv", "id_columns": ["name", "city"]})";
  }
  return R"({"parties": )" + std::to_string(parties) +
         R"(, "group": "test-512", "seed": 7,
  "match": {"lambda": 1, "features": [{"name": "name", "length": 8, "ngram": 3},
                                      {"name": "city", "length": 6, "ngram": 2}]},
  "datasets": [)" + ds + "]" + extra + "}";
}

TEST(CsvTest, QuotingRoundTrip) {
  CsvTable t;
  t.header = {"a", "b"};
  t.rows = {{"plain", "with,comma"}, {"say \"hi\"", "two\nlines"}, {"", "x"}};
  auto text = FormatCsv(t, ',');
  auto back = ParseCsv(text, ',', true);
  EXPECT_EQ(back.header, t.header);
  EXPECT_EQ(back.rows, t.rows);
  auto crlf = ParseCsv("a;b\r\n1;2\r\n", ';', true);
  EXPECT_EQ(crlf.rows, (std::vector<std::vector<std::string>>{{"1", "2"}}));
  EXPECT_EQ(CodeOf([] { ParseCsv("a\n\"open", ',', true); }), ErrorCode::kDatasetError);
}

TEST(ConfigTest, ParsesAndRejects) {
  TempDir dir;
  auto cfg = ParseConfig(ConfigJson(2), dir.path());
  EXPECT_EQ(cfg.parties, 2);
  EXPECT_EQ(cfg.match.features.size(), 2u);
  EXPECT_EQ(cfg.datasets[1].path, dir.path() / "d1.csv");
  EXPECT_EQ(cfg.seed, std::optional<uint64_t>(7));

  EXPECT_EQ(CodeOf([&] { ParseConfig("{", dir.path()); }), ErrorCode::kConfigError);
  EXPECT_EQ(CodeOf([&] { ParseConfig(ConfigJson(2, R"(, "bogus": 1)"), dir.path()); }),
            ErrorCode::kConfigError);
  EXPECT_EQ(CodeOf([&] { ParseConfig(ConfigJson(2, R"(, "production": true)"), dir.path()); }),
            ErrorCode::kConfigError);
  EXPECT_EQ(CodeOf([&] { ParseConfig(ConfigJson(2, R"(, "variant": "fuzzy")"), dir.path()); }),
            ErrorCode::kConfigError);
  EXPECT_EQ(CodeOf([&] { ParseConfig(ConfigJson(2, R"(, "bloom": {"bits": 1000})"), dir.path()); }),
            ErrorCode::kConfigError);
  auto wrong_group = ConfigJson(2);
  wrong_group.replace(wrong_group.find("test-512"), 8, "test-999");
  EXPECT_EQ(CodeOf([&] { ParseConfig(wrong_group, dir.path()); }), ErrorCode::kConfigError);
  // Three datasets declared for two parties.
  auto mismatch = ConfigJson(3);
  mismatch.replace(mismatch.find("\"parties\": 3"), 12, "\"parties\": 2");
  EXPECT_EQ(CodeOf([&] { ParseConfig(mismatch, dir.path()); }), ErrorCode::kConfigError);
}

TEST(SimulateTest, ToyUnionAndSharedIndex) {
  TempDir dir;
  Write(dir.path() / "d0.csv", "id,name,city\n1,alice,paris\n2,bob,rome\n3,carol,oslo\n");
  Write(dir.path() / "d1.csv", "id,name,city\n9,dave,bern\n8,bob,rome\n7,erin,kyiv\n");
  Write(dir.path() / "cfg.json", ConfigJson(2));
  auto cfg = LoadConfig(dir.path() / "cfg.json");
  auto report = Simulate(cfg, dir.path() / "out");
  EXPECT_EQ(report.n_protocol, 5u);
  EXPECT_EQ(report.n_oracle, 5u);
  EXPECT_EQ(report.e1_false_negatives, 0u);
  EXPECT_EQ(report.e2_false_positives, 0u);
  EXPECT_EQ(report.precision, 1.0);
  EXPECT_EQ(report.recall, 1.0);
  EXPECT_EQ(report.true_pairs, 1u);
  EXPECT_TRUE(report.wall_time_s.has_value());

  auto a = ParseCsv(Read(dir.path() / "out" / "party_0.csv"), ',', true);
  auto b = ParseCsv(Read(dir.path() / "out" / "party_1.csv"), ',', true);
  EXPECT_EQ(a.header.back(), "universal_index");
  EXPECT_EQ(a.rows[1].back(), b.rows[1].back());
  // Only own rows plus the index column.
  EXPECT_EQ(a.rows[0][1], "alice");
  EXPECT_EQ(a.rows[0].size(), 4u);
  EXPECT_TRUE(fs::exists(dir.path() / "out" / "report.json"));

  // evaluate on the same outputs reproduces the report minus timing.
  auto again = Evaluate(cfg, dir.path() / "out");
  EXPECT_FALSE(again.wall_time_s.has_value());
  report.wall_time_s.reset();
  EXPECT_EQ(ReportJson(again), ReportJson(report));
}

TEST(SimulateTest, IdenticalDatasetsAndMissingColumn) {
  TempDir dir;
  for (int k = 0; k < 3; ++k) {
    Write(dir.path() / ("d" + std::to_string(k) + ".csv"), "name,city\na,b\nc,d\n");
  }
  Write(dir.path() / "cfg.json", ConfigJson(3));
  auto cfg = LoadConfig(dir.path() / "cfg.json");
  auto report = Simulate(cfg, dir.path() / "out");
  EXPECT_EQ(report.n_protocol, 2u);
  EXPECT_EQ(report.true_pairs, 6u);
  EXPECT_EQ(report.correct_pairs, 6u);

  Write(dir.path() / "d1.csv", "name,town\na,b\n");
  try {
    Simulate(cfg, dir.path() / "out2");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDatasetError);
    EXPECT_NE(std::string(e.what()).find("city"), std::string::npos);
  }
}

TEST(EvaluateTest, EmptyDatasetsAndMissingOutput) {
  TempDir dir;
  Write(dir.path() / "d0.csv", "name,city\n");
  Write(dir.path() / "d1.csv", "name,city\n");
  Write(dir.path() / "cfg.json", ConfigJson(2));
  auto cfg = LoadConfig(dir.path() / "cfg.json");
  EXPECT_EQ(CodeOf([&] { Evaluate(cfg, dir.path() / "nothing"); }), ErrorCode::kMissingOutput);
  auto report = Simulate(cfg, dir.path() / "out");
  EXPECT_EQ(report.n_protocol, 0u);
  EXPECT_EQ(report.true_pairs, 0u);
  EXPECT_EQ(report.reported_pairs, 0u);
  EXPECT_EQ(report.precision, 1.0);
  EXPECT_EQ(report.recall, 1.0);
}

TEST(GenCorpusTest, RandomIdentifiersAreLettersAndDigits) {
  TempDir dir;
  CorpusSpec spec;
  spec.sizes = {20, 20};
  spec.random_identifiers = true;
  spec.seed = 5;
  GenerateCorpus(spec, dir.path() / "a");
  GenerateCorpus(spec, dir.path() / "b");
  EXPECT_EQ(Read(dir.path() / "a" / "data_1.csv"), Read(dir.path() / "b" / "data_1.csv"));
  auto t = ReadCsv(dir.path() / "a" / "data_0.csv", ',', true);
  ASSERT_EQ(t.rows.size(), 20u);
  for (const auto& r : t.rows) {
    EXPECT_LE(r[1].size(), spec.field_length);
    EXPECT_EQ(r[1].find_first_not_of("abcdefghijklmnopqrstuvwxyz "), std::string::npos);
    EXPECT_EQ(r[2].find_first_not_of("abcdefghijklmnopqrstuvwxyz0123456789 "),
              std::string::npos);
  }
}

TEST(GenCorpusTest, OverlapTypoAndDeterminism) {
  TempDir dir;
  CorpusSpec spec;
  spec.sizes = {50, 50};
  spec.overlap = 0.3;
  spec.seed = 1;
  auto summary = GenerateCorpus(spec, dir.path() / "a");
  EXPECT_EQ(summary.shared_entities, 15u);
  auto cfg = LoadConfig(dir.path() / "a" / "config.json");
  auto d0 = ReadCsv(cfg.datasets[0].path, ',', true);
  auto d1 = ReadCsv(cfg.datasets[1].path, ',', true);
  ASSERT_EQ(d0.rows.size(), 50u);
  std::set<std::pair<std::string, std::string>> s0, s1;
  for (auto& r : d0.rows) s0.insert({r[1], r[2]});
  for (auto& r : d1.rows) s1.insert({r[1], r[2]});
  size_t common = 0;
  for (auto& e : s0) common += s1.count(e);
  EXPECT_EQ(common, 15u);

  GenerateCorpus(spec, dir.path() / "b");
  EXPECT_EQ(Read(dir.path() / "a" / "data_0.csv"), Read(dir.path() / "b" / "data_0.csv"));
  EXPECT_EQ(Read(dir.path() / "a" / "provenance.csv"),
            Read(dir.path() / "b" / "provenance.csv"));

  spec.typo = 0.2;
  spec.sizes = {33, 17};
  auto typo = GenerateCorpus(spec, dir.path() / "c");
  EXPECT_EQ(typo.corrupted_rows, (std::vector<size_t>{7, 4}));
  auto prov = ReadCsv(dir.path() / "c" / "provenance.csv", ',', true);
  size_t flagged = 0;
  for (auto& r : prov.rows) flagged += r[3] == "1";
  EXPECT_EQ(flagged, 11u);
}

TEST(AssignFreshTest, TrailingIndicesAreDisjointAcrossParties) {
  UniversalIndexMap m0, m1;
  m0.phi = {0, std::nullopt, 2, std::nullopt};
  m0.unmatched = {1, 3};
  m1.phi = {std::nullopt, 1};
  m1.unmatched = {0};
  EXPECT_EQ(IndexColumn(m0, 3, 0, 2, false),
            (std::vector<std::string>{"0", "", "2", ""}));
  auto c0 = IndexColumn(m0, 3, 0, 2, true);
  auto c1 = IndexColumn(m1, 3, 1, 2, true);
  EXPECT_EQ(c0, (std::vector<std::string>{"0", "3", "2", "5"}));
  EXPECT_EQ(c1, (std::vector<std::string>{"4", "1"}));
}

TEST(ExitCodeTest, Mapping) {
  EXPECT_EQ(ExitCodeFor(ErrorCode::kConfigError), 2);
  EXPECT_EQ(ExitCodeFor(ErrorCode::kDatasetError), 2);
  EXPECT_EQ(ExitCodeFor(ErrorCode::kProtocolAbort), 3);
  EXPECT_EQ(ExitCodeFor(ErrorCode::kConfigDigestMismatch), 3);
  EXPECT_EQ(ExitCodeFor(ErrorCode::kTimeout), 3);
  EXPECT_EQ(ExitCodeFor(ErrorCode::kMissingOutput), 4);
}

}  // namespace
}  // namespace psu
