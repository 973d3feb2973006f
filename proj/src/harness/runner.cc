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

#include <chrono>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

#include "psu/error.h"
#include "psu/harness.h"
#include "psu/hasher.h"

namespace psu {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr std::string_view kIndexColumn = "universal_index";

fs::path PartyCsv(const fs::path& dir, int k) {
  return dir / ("party_" + std::to_string(k) + ".csv");
}
fs::path PartyRun(const fs::path& dir, int k) {
  return dir / ("run_" + std::to_string(k) + ".json");
}

ordered_json CountsJson(const MessageCounts& counts) {
  ordered_json out = ordered_json::object();
  for (size_t t = 1; t < kMessageTypeCount; ++t) {
    auto type = static_cast<MessageType>(t);
    out[std::string(MessageTypeName(type))] = counts[type];
  }
  return out;
}

MessageCounts CountsFromJson(const ordered_json& j) {
  MessageCounts counts;
  for (size_t t = 1; t < kMessageTypeCount; ++t) {
    auto type = static_cast<MessageType>(t);
    std::string name(MessageTypeName(type));
    if (j.contains(name)) counts[type] = j.at(name).get<uint64_t>();
  }
  return counts;
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  PSU_ENFORCE(out.good(), ErrorCode::kConfigError,
              "cannot write " + path.string());
  out << text;
}

std::string ReadText(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  PSU_ENFORCE(in.good(), ErrorCode::kMissingOutput,
              "missing output " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<HashedIdentifier> HashDataset(
    const std::vector<std::vector<std::string>>& ids, const MatchConfig& match,
    const GroupParams& g) {
  std::vector<HashedIdentifier> out;
  out.reserve(ids.size());
  for (const auto& row : ids) {
    out.push_back(HashIdentifier(TokenizeRecord(row, match), g));
  }
  return out;
}

// Writes the aligned CSV and the run metadata of party k.
void WritePartyOutputs(const HarnessConfig& cfg, int k, CsvTable table,
                       const PartyResult& result, double wall_time_s,
                       const fs::path& dir) {
  const auto& spec = cfg.datasets[k];
  const auto& map = result.map;
  const uint64_t n = result.union_table.size();
  auto column = IndexColumn(map, n, k, cfg.parties, cfg.assign_fresh);
  if (spec.has_header) table.header.emplace_back(kIndexColumn);
  for (size_t i = 0; i < table.rows.size(); ++i) {
    table.rows[i].push_back(column[i]);
  }
  WriteCsv(PartyCsv(dir, k), table, spec.delimiter);

  ordered_json run;
  run["party"] = k;
  run["parties"] = cfg.parties;
  run["variant"] =
      cfg.variant == EncryptionMode::kOrdered ? "ordered" : "unordered";
  run["union_size"] = n;
  run["records"] = map.phi.size();
  run["unmatched"] = map.unmatched.size();
  run["message_counts"] = CountsJson(result.sent);
  run["wall_time_s"] = wall_time_s;
  WriteText(PartyRun(dir, k), run.dump(2) + "\n");
}

std::string JoinKey(const std::vector<std::string>& parts) {
  std::string key;
  for (const auto& p : parts) {
    key += p;
    key.push_back('\x1f');
  }
  return key;
}

struct Provenance {
  // party -> row -> (entity, corrupted)
  std::vector<std::vector<std::pair<std::string, bool>>> rows;
};

Provenance LoadProvenance(const fs::path& path, int parties) {
  CsvTable t;
  try {
    t = ReadCsv(path, ',', true);
  } catch (const Error& e) {
    throw Error(ErrorCode::kMissingOutput, e.what());
  }
  DatasetSpec spec;
  spec.path = path;
  spec.id_columns = {"party", "row", "entity", "corrupted"};
  std::vector<std::vector<std::string>> cols;
  try {
    cols = ProjectIdentifiers(t, spec);
  } catch (const Error& e) {
    throw Error(ErrorCode::kMissingOutput, e.what());
  }
  Provenance prov;
  prov.rows.resize(parties);
  for (const auto& c : cols) {
    size_t party = 0;
    size_t row = 0;
    try {
      party = std::stoul(c[0]);
      row = std::stoul(c[1]);
    } catch (const std::exception&) {
      throw Error(ErrorCode::kMissingOutput, "bad provenance row in " +
                                                 path.string());
    }
    PSU_ENFORCE(party < prov.rows.size(), ErrorCode::kMissingOutput,
                "provenance names unknown party " + c[0]);
    auto& v = prov.rows[party];
    if (v.size() <= row) v.resize(row + 1);
    v[row] = {c[2], c[3] == "1" || c[3] == "true"};
  }
  return prov;
}

// n choose 2 summed over parties, given per-party counts.
uint64_t CrossPairs(const std::vector<uint64_t>& per_party) {
  uint64_t total = 0;
  uint64_t squares = 0;
  for (uint64_t c : per_party) {
    total += c;
    squares += c * c;
  }
  return (total * total - squares) / 2;
}

uint64_t MixedPairs(const std::vector<uint64_t>& clean,
                    const std::vector<uint64_t>& corrupted) {
  uint64_t cl = 0;
  uint64_t co = 0;
  uint64_t same = 0;
  for (size_t a = 0; a < clean.size(); ++a) {
    cl += clean[a];
    co += corrupted[a];
    same += clean[a] * corrupted[a];
  }
  return cl * co - same;
}

double Ratio(uint64_t num, uint64_t den) {
  return den == 0 ? 1.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::vector<std::string> IndexColumn(const UniversalIndexMap& map, uint64_t n,
                                     int party, int parties, bool assign_fresh) {
  std::vector<std::string> column(map.phi.size());
  for (size_t i = 0; i < map.phi.size(); ++i) {
    if (map.phi[i]) column[i] = std::to_string(*map.phi[i]);
  }
  if (assign_fresh) {
    // Disjoint across parties without coordination.
    for (size_t j = 0; j < map.unmatched.size(); ++j) {
      column[map.unmatched[j]] =
          std::to_string(n + static_cast<uint64_t>(party) +
                         static_cast<uint64_t>(parties) * j);
    }
  }
  return column;
}

std::string ReportJson(const EvaluationReport& r) {
  ordered_json j;
  j["N_protocol"] = r.n_protocol;
  j["N_oracle"] = r.n_oracle;
  j["true_pairs"] = r.true_pairs;
  j["reported_pairs"] = r.reported_pairs;
  j["correct_pairs"] = r.correct_pairs;
  j["e1_false_negatives"] = r.e1_false_negatives;
  j["e2_false_positives"] = r.e2_false_positives;
  j["precision"] = r.precision;
  j["recall"] = r.recall;
  if (r.corrupted_vs_clean) {
    j["corrupted_vs_clean"] = {
        {"true_pairs", r.corrupted_vs_clean->true_pairs},
        {"correct_pairs", r.corrupted_vs_clean->correct_pairs},
        {"recall", r.corrupted_vs_clean->recall}};
  }
  j["message_counts"] = CountsJson(r.message_counts);
  if (r.wall_time_s) j["wall_time_s"] = *r.wall_time_s;
  return j.dump(2) + "\n";
}

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMissingOutput:
      return 4;
    case ErrorCode::kPhaseViolation:
    case ErrorCode::kTransportFailure:
    case ErrorCode::kNoMatchInUnion:
    case ErrorCode::kPeerUnreachable:
    case ErrorCode::kFramingError:
    case ErrorCode::kConfigDigestMismatch:
    case ErrorCode::kTimeout:
    case ErrorCode::kProtocolAbort:
    case ErrorCode::kRngFailure:
      return 3;
    default:
      return 2;
  }
}

EvaluationReport Simulate(const HarnessConfig& cfg, const fs::path& out_dir,
                          const InProcessOptions& network) {
  GroupParams g = MakeGroupParams(cfg.group);
  std::vector<CsvTable> tables;
  LocalSessionOptions opts;
  opts.session = cfg.Session(0);
  opts.network = network;
  opts.timeout = cfg.timeout;
  for (int k = 0; k < cfg.parties; ++k) {
    const auto& spec = cfg.datasets[k];
    tables.push_back(ReadCsv(spec.path, spec.delimiter, spec.has_header));
    auto ids = ProjectIdentifiers(tables.back(), spec);
    opts.data.push_back(HashDataset(ids, cfg.match, g));
    opts.rngs.push_back(PartyRng(cfg.seed, k));
  }
  fs::create_directories(out_dir);

  auto start = std::chrono::steady_clock::now();
  LocalSessionResult res = RunLocalSession(std::move(opts), g);
  double wall = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start)
                    .count();

  for (int k = 0; k < cfg.parties; ++k) {
    WritePartyOutputs(cfg, k, std::move(tables[k]), res.parties[k], wall,
                      out_dir);
  }
  EvaluationReport report = Evaluate(cfg, out_dir);
  report.wall_time_s = wall;
  WriteText(out_dir / "report.json", ReportJson(report));
  return report;
}

void RunParty(const HarnessConfig& cfg, int self, const fs::path& out_dir) {
  PSU_ENFORCE(self >= 0 && self < cfg.parties, ErrorCode::kConfigError,
              "party id " + std::to_string(self) + " out of range");
  PSU_ENFORCE(static_cast<int>(cfg.addresses.size()) == cfg.parties,
              ErrorCode::kConfigError,
              "run-party needs one network address per party");
  GroupParams g = MakeGroupParams(cfg.group);
  const auto& spec = cfg.datasets[self];
  CsvTable table = ReadCsv(spec.path, spec.delimiter, spec.has_header);
  auto local = HashDataset(ProjectIdentifiers(table, spec), cfg.match, g);
  fs::create_directories(out_dir);

  auto start = std::chrono::steady_clock::now();
  PartyResult result = RunNetworkParty(cfg.Session(self), g, std::move(local),
                                       PartyRng(cfg.seed, self), cfg.timeout);
  double wall = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start)
                    .count();
  WritePartyOutputs(cfg, self, std::move(table), result, wall, out_dir);
}

EvaluationReport Evaluate(const HarnessConfig& cfg, const fs::path& out_dir) {
  const int P = cfg.parties;
  std::optional<Provenance> prov;
  if (cfg.provenance) prov = LoadProvenance(*cfg.provenance, P);

  EvaluationReport report;
  std::optional<uint64_t> union_size;

  // key -> per-party counts; split by corruption for the mixed statistic.
  struct Tally {
    std::vector<uint64_t> all, clean, corrupted;
  };
  auto bump = [P](std::unordered_map<std::string, Tally>& m,
                  const std::string& key, int party, bool corrupted) {
    auto& t = m[key];
    if (t.all.empty()) {
      t.all.assign(P, 0);
      t.clean.assign(P, 0);
      t.corrupted.assign(P, 0);
    }
    ++t.all[party];
    ++(corrupted ? t.corrupted : t.clean)[party];
  };
  std::unordered_map<std::string, Tally> truth, reported, correct;

  for (int k = 0; k < P; ++k) {
    const auto& spec = cfg.datasets[k];
    CsvTable plain = ReadCsv(spec.path, spec.delimiter, spec.has_header);
    auto ids = ProjectIdentifiers(plain, spec);

    CsvTable aligned;
    try {
      aligned = ReadCsv(PartyCsv(out_dir, k), spec.delimiter, spec.has_header);
    } catch (const Error& e) {
      throw Error(ErrorCode::kMissingOutput, e.what());
    }
    PSU_ENFORCE(aligned.rows.size() == ids.size(), ErrorCode::kMissingOutput,
                PartyCsv(out_dir, k).string() +
                    " does not have one row per dataset record");

    ordered_json run;
    try {
      run = ordered_json::parse(ReadText(PartyRun(out_dir, k)));
      uint64_t n = run.at("union_size").get<uint64_t>();
      PSU_ENFORCE(!union_size || *union_size == n, ErrorCode::kMissingOutput,
                  "parties disagree on the union size");
      union_size = n;
      report.message_counts += CountsFromJson(run.at("message_counts"));
    } catch (const ordered_json::exception& e) {
      throw Error(ErrorCode::kMissingOutput,
                  PartyRun(out_dir, k).string() + ": " + e.what());
    }

    for (size_t i = 0; i < ids.size(); ++i) {
      std::string key;
      bool corrupted = false;
      if (prov) {
        PSU_ENFORCE(i < prov->rows[k].size() && !prov->rows[k][i].first.empty(),
                    ErrorCode::kMissingOutput,
                    "provenance lacks party " + std::to_string(k) + " row " +
                        std::to_string(i));
        key = prov->rows[k][i].first;
        corrupted = prov->rows[k][i].second;
      } else {
        std::vector<std::string> normalized;
        for (size_t f = 0; f < ids[i].size(); ++f) {
          normalized.push_back(NormalizeField(ids[i][f], cfg.match.features[f]));
        }
        key = JoinKey(normalized);
      }
      bump(truth, key, k, corrupted);
      const auto& row = aligned.rows[i];
      PSU_ENFORCE(!row.empty(), ErrorCode::kMissingOutput,
                  "empty row in aligned output");
      const std::string& index = row.back();
      if (index.empty()) continue;
      bump(reported, index, k, corrupted);
      bump(correct, key + '\x1e' + index, k, corrupted);
    }
  }

  report.n_protocol = union_size.value_or(0);
  report.n_oracle = truth.size();
  PairStats mixed;
  for (const auto& [key, t] : truth) {
    report.true_pairs += CrossPairs(t.all);
    mixed.true_pairs += MixedPairs(t.clean, t.corrupted);
  }
  for (const auto& [key, t] : reported) report.reported_pairs += CrossPairs(t.all);
  for (const auto& [key, t] : correct) {
    report.correct_pairs += CrossPairs(t.all);
    mixed.correct_pairs += MixedPairs(t.clean, t.corrupted);
  }
  report.e1_false_negatives = report.true_pairs - report.correct_pairs;
  report.e2_false_positives = report.reported_pairs - report.correct_pairs;
  report.precision = Ratio(report.correct_pairs, report.reported_pairs);
  report.recall = Ratio(report.correct_pairs, report.true_pairs);
  if (prov) {
    mixed.recall = Ratio(mixed.correct_pairs, mixed.true_pairs);
    report.corrupted_vs_clean = mixed;
  }
  return report;
}

}  // namespace psu
