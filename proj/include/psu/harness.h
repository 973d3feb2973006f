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

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "psu/bloom_filter.h"
#include "psu/commcrypt.h"
#include "psu/matching.h"
#include "psu/session.h"
#include "psu/tokenizer.h"
#include "psu/transport.h"

namespace psu {

namespace fs = std::filesystem;

struct DatasetSpec {
  fs::path path;
  // Column names, or 0-based column numbers when the file has no header.
  std::vector<std::string> id_columns;
  char delimiter = ',';
  bool has_header = true;
};

struct HarnessConfig {
  int parties = 2;
  std::string group = std::string(kDefaultGroupPreset);
  EncryptionMode variant = EncryptionMode::kOrdered;
  MatchConfig match;
  std::vector<DatasetSpec> datasets;
  std::optional<uint64_t> seed;
  bool production = false;
  BloomOptions bloom;
  bool assign_fresh = false;
  std::vector<std::string> addresses;
  std::chrono::milliseconds timeout{30000};
  // Ground truth for noisy corpora (party,row,entity,corrupted).
  std::optional<fs::path> provenance;

  SessionConfig Session(int self) const;
};

// Relative paths are resolved against the config file's directory. Throws
// ConfigError.
HarnessConfig LoadConfig(const fs::path& path);
HarnessConfig ParseConfig(std::string_view json_text, const fs::path& base_dir);

// RFC-4180 style: quoted fields may hold delimiters, doubled quotes and line
// breaks.
struct CsvTable {
  std::vector<std::string> header;  // empty when the file has none
  std::vector<std::vector<std::string>> rows;
};

CsvTable ParseCsv(std::string_view text, char delimiter, bool has_header);
CsvTable ReadCsv(const fs::path& path, char delimiter, bool has_header);
std::string FormatCsv(const CsvTable& table, char delimiter);
void WriteCsv(const fs::path& path, const CsvTable& table, char delimiter);

// The identifying columns of every row, in feature order. Throws DatasetError
// naming the missing column.
std::vector<std::vector<std::string>> ProjectIdentifiers(
    const CsvTable& table, const DatasetSpec& spec);

struct PairStats {
  uint64_t true_pairs = 0;
  uint64_t correct_pairs = 0;
  double recall = 1.0;
};

struct EvaluationReport {
  uint64_t n_protocol = 0;
  uint64_t n_oracle = 0;
  uint64_t true_pairs = 0;
  uint64_t reported_pairs = 0;
  uint64_t correct_pairs = 0;
  uint64_t e1_false_negatives = 0;
  uint64_t e2_false_positives = 0;
  double precision = 1.0;
  double recall = 1.0;
  // True pairs with exactly one corrupted side; only with provenance.
  std::optional<PairStats> corrupted_vs_clean;
  MessageCounts message_counts;
  std::optional<double> wall_time_s;
};

std::string ReportJson(const EvaluationReport& report);

// Runs all parties in-process and writes party_<k>.csv, run_<k>.json and
// report.json into out_dir.
EvaluationReport Simulate(const HarnessConfig& cfg, const fs::path& out_dir,
                          const InProcessOptions& network = {});

// One party over TCP; writes party_<k>.csv and run_<k>.json only.
void RunParty(const HarnessConfig& cfg, int self, const fs::path& out_dir);

// Recomputes the true cross-party links from the plaintext datasets and
// scores the universal_index columns in out_dir. Throws MissingOutput.
EvaluationReport Evaluate(const HarnessConfig& cfg, const fs::path& out_dir);

struct CorpusSpec {
  std::vector<size_t> sizes;
  double overlap = 0.0;
  double typo = 0.0;
  uint64_t seed = 1;
  // Values are cut to this many characters and kept distinct after the cut.
  size_t field_length = 12;
  size_t ngram = 3;
  // Random letter strings instead of word-list names and addresses.
  bool random_identifiers = false;
  std::string lambda = "0.7";
  EncryptionMode variant = EncryptionMode::kUnordered;
  std::string group = "test-512";
};

struct CorpusSummary {
  size_t shared_entities = 0;
  std::vector<size_t> corrupted_rows;  // per party
};

// Writes data_<k>.csv, provenance.csv and a ready-to-run config.json.
CorpusSummary GenerateCorpus(const CorpusSpec& spec, const fs::path& out_dir);

// The universal_index column of one party: empty for unmatched rows, or
// n + party + parties * j for the j-th unmatched row with assign_fresh.
std::vector<std::string> IndexColumn(const UniversalIndexMap& map, uint64_t n,
                                     int party, int parties, bool assign_fresh);

// Exit status for an error code: 2 config, 3 protocol, 4 evaluation.
int ExitCodeFor(ErrorCode code);

}  // namespace psu
