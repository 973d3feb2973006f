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

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "psu/error.h"
#include "psu/group_math.h"
#include "psu/harness.h"

namespace psu {
namespace {

using nlohmann::json;

[[noreturn]] void Fail(const std::string& msg) {
  throw Error(ErrorCode::kConfigError, msg);
}

void CheckKeys(const json& obj, const std::set<std::string>& allowed,
               const std::string& where) {
  if (!obj.is_object()) Fail(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) Fail("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T Get(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) Fail("missing '" + key + "' in " + where);
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    Fail("'" + key + "' in " + where + " has the wrong type");
  }
}

Rational ParseLambda(const json& v) {
  try {
    if (v.is_string()) return Rational::Parse(v.get<std::string>());
    if (v.is_number()) return Rational::FromDouble(v.get<double>());
  } catch (const Error& e) {
    Fail(std::string("bad lambda: ") + e.what());
  }
  Fail("lambda must be a number or a string such as \"7/10\"");
}

fs::path Resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

SessionConfig HarnessConfig::Session(int self) const {
  SessionConfig s;
  s.parties = parties;
  s.self = self;
  s.addresses = addresses;
  s.group_preset = group;
  s.variant = variant;
  s.match = match;
  s.bloom = bloom;
  return s;
}

HarnessConfig ParseConfig(std::string_view json_text, const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    Fail(std::string("config is not valid JSON: ") + e.what());
  }
  CheckKeys(doc,
            {"parties", "group", "variant", "match", "datasets", "seed",
             "production", "bloom", "assign_fresh", "network", "provenance"},
            "config");

  HarnessConfig cfg;
  cfg.parties = Get<int>(doc, "parties", "config");
  if (cfg.parties < 1 || cfg.parties > 65535) Fail("parties out of range");

  if (doc.contains("group")) cfg.group = Get<std::string>(doc, "group", "config");
  try {
    MakeGroupParams(cfg.group);
  } catch (const Error& e) {
    Fail(e.what());
  }

  std::string variant = doc.contains("variant")
                            ? Get<std::string>(doc, "variant", "config")
                            : "ordered";
  if (variant == "ordered") {
    cfg.variant = EncryptionMode::kOrdered;
  } else if (variant == "unordered" || variant == "noisy") {
    cfg.variant = EncryptionMode::kUnordered;
  } else {
    Fail("variant must be 'ordered' or 'unordered', got '" + variant + "'");
  }

  const json& match = doc.contains("match") ? doc.at("match") : json();
  CheckKeys(match, {"lambda", "features"}, "match");
  cfg.match.lambda =
      match.contains("lambda") ? ParseLambda(match.at("lambda")) : Rational{1, 1};
  cfg.match.ordered_mode = cfg.variant == EncryptionMode::kOrdered;
  if (!match.contains("features") || !match.at("features").is_array()) {
    Fail("match.features must be an array");
  }
  for (const auto& f : match.at("features")) {
    CheckKeys(f, {"name", "length", "ngram"}, "feature");
    auto length = Get<int64_t>(f, "length", "feature");
    auto ngram = Get<int64_t>(f, "ngram", "feature");
    if (length < 1 || ngram < 1) Fail("feature length and ngram must be >= 1");
    cfg.match.features.push_back(FeatureSpec::Make(
        Get<std::string>(f, "name", "feature"), static_cast<size_t>(length),
        static_cast<size_t>(ngram)));
  }
  try {
    cfg.match.Validate();
  } catch (const Error& e) {
    Fail(e.what());
  }

  if (!doc.contains("datasets") || !doc.at("datasets").is_array()) {
    Fail("datasets must be an array");
  }
  for (const auto& d : doc.at("datasets")) {
    CheckKeys(d, {"path", "id_columns", "delimiter", "has_header"}, "dataset");
    DatasetSpec spec;
    spec.path = Resolve(base_dir, Get<std::string>(d, "path", "dataset"));
    spec.id_columns = Get<std::vector<std::string>>(d, "id_columns", "dataset");
    if (d.contains("delimiter")) {
      auto delim = Get<std::string>(d, "delimiter", "dataset");
      if (delim.size() != 1 || delim == "\"" || delim == "\n") {
        Fail("delimiter must be a single character other than quote/newline");
      }
      spec.delimiter = delim[0];
    }
    if (d.contains("has_header")) {
      spec.has_header = Get<bool>(d, "has_header", "dataset");
    }
    if (spec.id_columns.size() != cfg.match.d_match()) {
      Fail("dataset " + spec.path.string() + " lists " +
           std::to_string(spec.id_columns.size()) +
           " id columns but the match config has " +
           std::to_string(cfg.match.d_match()) + " features");
    }
    cfg.datasets.push_back(std::move(spec));
  }
  if (static_cast<int>(cfg.datasets.size()) != cfg.parties) {
    Fail("need exactly one dataset per party");
  }

  if (doc.contains("production")) {
    cfg.production = Get<bool>(doc, "production", "config");
  }
  if (doc.contains("seed") && !doc.at("seed").is_null()) {
    if (cfg.production) {
      Fail("production mode refuses a configured seed; remove 'seed'");
    }
    cfg.seed = Get<uint64_t>(doc, "seed", "config");
  }

  if (doc.contains("bloom")) {
    const json& b = doc.at("bloom");
    CheckKeys(b, {"enabled", "bits", "hashes"}, "bloom");
    if (b.contains("enabled")) cfg.bloom.enabled = Get<bool>(b, "enabled", "bloom");
    if (b.contains("bits")) cfg.bloom.bits = Get<size_t>(b, "bits", "bloom");
    if (b.contains("hashes")) cfg.bloom.hashes = Get<size_t>(b, "hashes", "bloom");
    size_t bits = cfg.bloom.bits;
    if (bits < 64 || (bits & (bits - 1)) != 0) {
      Fail("bloom.bits must be a power of two >= 64");
    }
    if (cfg.bloom.hashes < 1 || cfg.bloom.hashes > 255) {
      Fail("bloom.hashes must be in [1, 255]");
    }
  }

  if (doc.contains("assign_fresh")) {
    cfg.assign_fresh = Get<bool>(doc, "assign_fresh", "config");
  }

  if (doc.contains("network")) {
    const json& n = doc.at("network");
    CheckKeys(n, {"addresses", "timeout_ms"}, "network");
    if (n.contains("addresses")) {
      cfg.addresses = Get<std::vector<std::string>>(n, "addresses", "network");
      if (static_cast<int>(cfg.addresses.size()) != cfg.parties) {
        Fail("network.addresses needs one entry per party");
      }
    }
    if (n.contains("timeout_ms")) {
      auto ms = Get<int64_t>(n, "timeout_ms", "network");
      if (ms <= 0) Fail("network.timeout_ms must be positive");
      cfg.timeout = std::chrono::milliseconds(ms);
    }
  }

  if (doc.contains("provenance") && !doc.at("provenance").is_null()) {
    cfg.provenance =
        Resolve(base_dir, Get<std::string>(doc, "provenance", "config"));
  }
  return cfg;
}

HarnessConfig LoadConfig(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail("cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseConfig(buf.str(), path.parent_path());
}

}  // namespace psu
