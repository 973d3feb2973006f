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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "json.hpp"

#include "psu/error.h"
#include "psu/harness.h"
#include "psu/random.h"

namespace psu {
namespace {

constexpr std::string_view kFirstNames[] = {
    "ada",    "alan",   "alma",   "amir",   "anna",   "arlo",   "aya",
    "basil",  "bea",    "boris",  "bruno",  "carla",  "cato",   "cora",
    "dana",   "dario",  "dina",   "edda",   "elif",   "emil",   "enzo",
    "erik",   "esme",   "ezra",   "fay",    "felix",  "fern",   "finn",
    "gaia",   "gil",    "greta",  "gus",    "hana",   "hugo",   "ida",
    "igor",   "ines",   "ivan",   "jade",   "jana",   "joel",   "jonas",
    "juno",   "kai",    "kara",   "kenji",  "lars",   "lea",    "leon",
    "lina",   "luca",   "lulu",   "mara",   "max",    "mei",    "mila",
    "milo",   "nadia",  "nico",   "nina",   "noah",   "nora",   "olga",
    "omar",   "otto",   "pablo",  "paula",  "petra",  "quinn",  "rafa",
    "rhea",   "rosa",   "ruben",  "sami",   "sara",   "sven",   "tara",
    "teo",    "tilda",  "uma",    "vera",   "viggo",  "wanda",  "xena",
    "yara",   "yusuf",  "zara",   "zeno",
};

constexpr std::string_view kSurnames[] = {
    "abbot",  "achter", "bakker", "barros", "becker", "blom",   "brandt",
    "costa",  "dahl",   "dimas",  "dubois", "eklund", "falk",   "ferro",
    "fuchs",  "garcia", "gruber", "haas",   "hansen", "horvat", "ibarra",
    "ito",    "jansen", "jovic",  "kato",   "keller", "kovac",  "lange",
    "leroy",  "lima",   "lund",   "marin",  "meyer",  "moreau", "nagy",
    "novak",  "ortiz",  "otto",   "park",   "peters", "quist",  "reyes",
    "rossi",  "ruiz",   "sato",   "silva",  "sousa",  "stein",  "tanaka",
    "torres", "ulrich", "varga",  "vogel",  "weber",  "wolf",   "yilmaz",
    "young",  "zeller", "ziegler", "zorn",
};

constexpr std::string_view kStreets[] = {
    "ash",   "bay",   "birch", "brook", "cedar", "cliff", "dale",  "dock",
    "elm",   "fern",  "ford",  "glen",  "grove", "hill",  "holly", "iris",
    "ivy",   "lake",  "lark",  "lime",  "maple", "mill",  "moss",  "oak",
    "park",  "pine",  "pond",  "quay",  "reed",  "ridge", "rose",  "sage",
    "shore", "vale",  "view",  "west",  "wren",  "yew",
};

constexpr std::string_view kStreetTypes[] = {"st", "rd", "ave", "ln", "way"};

template <size_t N>
std::string_view Pick(const std::string_view (&words)[N], Rng& rng) {
  return words[rng.Uniform(N)];
}

std::string Cut(std::string s, size_t length) {
  if (s.size() > length) s.resize(length);
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

// One substitution at a random visible position, to a different letter.
std::string Corrupt(std::string s, Rng& rng) {
  if (s.empty()) return s;
  size_t pos = rng.Uniform(s.size());
  char c;
  do {
    c = static_cast<char>('a' + rng.Uniform(26));
  } while (c == s[pos]);
  s[pos] = c;
  return s;
}

std::string RandomWord(size_t min_len, size_t max_len, Rng& rng) {
  std::string s(min_len + rng.Uniform(max_len - min_len + 1), 'a');
  for (auto& c : s) c = static_cast<char>('a' + rng.Uniform(26));
  return s;
}

size_t CeilCount(double fraction, size_t rows) {
  double v = std::ceil(fraction * static_cast<double>(rows) - 1e-9);
  return static_cast<size_t>(std::max(0.0, std::min(v, static_cast<double>(rows))));
}

}  // namespace

CorpusSummary GenerateCorpus(const CorpusSpec& spec, const fs::path& out_dir) {
  PSU_ENFORCE(!spec.sizes.empty(), ErrorCode::kConfigError,
              "corpus needs at least one party size");
  PSU_ENFORCE(spec.overlap >= 0 && spec.overlap <= 1 && spec.typo >= 0 &&
                  spec.typo <= 1,
              ErrorCode::kConfigError, "overlap and typo must lie in [0, 1]");
  PSU_ENFORCE(spec.field_length >= 4, ErrorCode::kConfigError,
              "field length must be at least 4");
  const size_t P = spec.sizes.size();
  const size_t min_size = *std::min_element(spec.sizes.begin(), spec.sizes.end());

  CorpusSummary summary;
  summary.shared_entities = static_cast<size_t>(
      std::floor(spec.overlap * static_cast<double>(min_size) + 1e-9));
  size_t total = summary.shared_entities;
  for (size_t n : spec.sizes) total += n - summary.shared_entities;

  Rng rng = Rng::FromSeed(spec.seed);
  Rng entity_rng = rng.Fork("entities");
  std::vector<std::pair<std::string, std::string>> entities;
  std::set<std::pair<std::string, std::string>> seen;
  size_t attempts = 0;
  while (entities.size() < total) {
    PSU_ENFORCE(++attempts < total * 1000 + 10000, ErrorCode::kConfigError,
                "word list too small for the requested corpus size");
    std::string name;
    std::string address;
    if (spec.random_identifiers) {
      name = RandomWord(3, 6, entity_rng) + " " + RandomWord(3, 6, entity_rng);
      address = std::to_string(1 + entity_rng.Uniform(999)) + " " +
                RandomWord(4, 8, entity_rng);
    } else {
      name = std::string(Pick(kFirstNames, entity_rng)) + " " +
             std::string(Pick(kSurnames, entity_rng));
      address = std::to_string(1 + entity_rng.Uniform(999)) + " " +
                std::string(Pick(kStreets, entity_rng)) + " " +
                std::string(Pick(kStreetTypes, entity_rng));
    }
    auto e = std::make_pair(Cut(name, spec.field_length),
                            Cut(address, spec.field_length));
    if (seen.insert(e).second) entities.push_back(std::move(e));
  }

  fs::create_directories(out_dir);
  CsvTable prov;
  prov.header = {"party", "row", "entity", "corrupted"};
  nlohmann::ordered_json datasets = nlohmann::ordered_json::array();
  size_t next_unique = summary.shared_entities;
  for (size_t k = 0; k < P; ++k) {
    std::vector<size_t> ids;
    for (size_t e = 0; e < summary.shared_entities; ++e) ids.push_back(e);
    for (size_t i = summary.shared_entities; i < spec.sizes[k]; ++i) {
      ids.push_back(next_unique++);
    }
    Rng party_rng = rng.Fork("party/" + std::to_string(k));
    party_rng.Shuffle(ids);

    std::vector<size_t> order(ids.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    party_rng.Shuffle(order);
    size_t corrupt_count = CeilCount(spec.typo, ids.size());
    std::vector<bool> corrupted(ids.size(), false);
    for (size_t i = 0; i < corrupt_count; ++i) corrupted[order[i]] = true;
    summary.corrupted_rows.push_back(corrupt_count);

    CsvTable data;
    data.header = {"record_id", "name", "address"};
    for (size_t r = 0; r < ids.size(); ++r) {
      auto [name, address] = entities[ids[r]];
      if (corrupted[r]) {
        name = Corrupt(name, party_rng);
        address = Corrupt(address, party_rng);
      }
      data.rows.push_back({"p" + std::to_string(k) + "-" + std::to_string(r),
                           name, address});
      prov.rows.push_back({std::to_string(k), std::to_string(r),
                           "e" + std::to_string(ids[r]),
                           corrupted[r] ? "1" : "0"});
    }
    std::string file = "data_" + std::to_string(k) + ".csv";
    WriteCsv(out_dir / file, data, ',');
    datasets.push_back({{"path", file},
                        {"id_columns", {"name", "address"}},
                        {"delimiter", ","},
                        {"has_header", true}});
  }
  WriteCsv(out_dir / "provenance.csv", prov, ',');

  nlohmann::ordered_json cfg;
  cfg["parties"] = P;
  cfg["group"] = spec.group;
  cfg["variant"] =
      spec.variant == EncryptionMode::kOrdered ? "ordered" : "unordered";
  cfg["match"] = {
      {"lambda", spec.lambda},
      {"features",
       {{{"name", "name"}, {"length", spec.field_length}, {"ngram", spec.ngram}},
        {{"name", "address"},
         {"length", spec.field_length},
         {"ngram", spec.ngram}}}}};
  cfg["datasets"] = datasets;
  cfg["seed"] = spec.seed;
  cfg["provenance"] = "provenance.csv";
  std::ofstream out(out_dir / "config.json", std::ios::trunc);
  PSU_ENFORCE(out.good(), ErrorCode::kConfigError,
              "cannot write " + (out_dir / "config.json").string());
  out << cfg.dump(2) << "\n";
  return summary;
}

}  // namespace psu
