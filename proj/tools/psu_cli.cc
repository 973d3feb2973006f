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
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "psu/error.h"
#include "psu/group_math.h"
#include "psu/harness.h"

namespace {

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int PrintParams(const std::string& preset, const std::string& modulus) {
  using psu::GroupParams;
  if (!modulus.empty()) {
    mpz_class p;
    if (p.set_str(modulus, 0) != 0) {
      std::cerr << "error: cannot parse modulus '" << modulus << "'\n";
      return 2;
    }
    GroupParams g = psu::MakeGroupParams(p);
    std::cout << "explicit modulus: safe prime, " << g.bit_length()
              << " bits, q = (p-1)/2 prime\n";
    return 0;
  }
  std::vector<std::string> names =
      preset.empty() ? psu::GroupPresetNames()
                     : std::vector<std::string>{preset};
  for (const auto& name : names) {
    GroupParams g = psu::MakeGroupParams(name);
    std::cout << name << "  bits=" << g.bit_length()
              << "  element_bytes=" << g.element_bytes()
              << "  p=0x" << g.p().get_str(16) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-party private set union for entity alignment"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "psu_out";

  auto* simulate = app.add_subcommand(
      "simulate", "Run every party in-process and write aligned CSVs and a report");
  simulate->add_option("config", config_path, "Config JSON")->required();
  simulate->add_option("-o,--out", out_dir, "Output directory");
  bool assign_fresh = false;
  simulate->add_flag("--assign-fresh", assign_fresh,
                     "Give unmatched noisy rows fresh trailing indices");
  uint32_t jitter_us = 0;
  simulate->add_option("--jitter-us", jitter_us,
                       "Random per-send delay bound (testing)");

  auto* run_party = app.add_subcommand(
      "run-party", "Run one party over TCP and write its aligned CSV");
  run_party->add_option("config", config_path, "Config JSON")->required();
  int party = 0;
  run_party->add_option("-p,--party", party, "This party's id")->required();
  run_party->add_option("-o,--out", out_dir, "Output directory");
  std::string listen;
  run_party->add_option("--listen", listen,
                        "host:port to listen on (overrides the config entry)");
  std::string peers;
  run_party->add_option("--peers", peers,
                        "Comma-separated host:port of all parties, in id order");
  int64_t timeout_ms = 0;
  run_party->add_option("--timeout-ms", timeout_ms, "Connect/receive timeout");
  run_party->add_flag("--assign-fresh", assign_fresh,
                      "Give unmatched noisy rows fresh trailing indices");

  auto* evaluate = app.add_subcommand(
      "evaluate", "Score aligned outputs against the plaintext datasets");
  evaluate->add_option("config", config_path, "Config JSON")->required();
  evaluate->add_option("-o,--out", out_dir, "Directory holding party outputs");
  std::string report_path;
  evaluate->add_option("--report", report_path,
                       "Write the report here instead of stdout");

  auto* gen = app.add_subcommand(
      "gen-corpus", "Generate synthetic datasets, provenance and a config");
  psu::CorpusSpec corpus;
  std::string sizes = "50,50";
  std::string variant = "unordered";
  gen->add_option("--sizes", sizes, "Comma-separated rows per party");
  gen->add_option("--overlap", corpus.overlap, "Shared fraction of the smallest set");
  gen->add_option("--typo", corpus.typo, "Fraction of corrupted rows per party");
  gen->add_option("--seed", corpus.seed, "Generator seed");
  gen->add_option("--field-length", corpus.field_length, "L for both features");
  gen->add_option("--ngram", corpus.ngram, "n for both features");
  gen->add_flag("--random-identifiers", corpus.random_identifiers,
                "Random letter strings instead of word-list values");
  gen->add_option("--lambda", corpus.lambda, "Threshold written to the config");
  gen->add_option("--variant", variant, "ordered or unordered");
  gen->add_option("--group", corpus.group, "Group preset written to the config");
  gen->add_option("-o,--out", out_dir, "Output directory");

  auto* params = app.add_subcommand(
      "params", "Print group presets or validate an explicit modulus");
  std::string preset;
  std::string modulus;
  params->add_option("--preset", preset, "Only this preset");
  params->add_option("--modulus", modulus,
                     "Validate this p (decimal or 0x-prefixed hex)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*simulate) {
      auto cfg = psu::LoadConfig(config_path);
      cfg.assign_fresh = cfg.assign_fresh || assign_fresh;
      psu::InProcessOptions net;
      net.max_jitter_us = jitter_us;
      auto report = psu::Simulate(cfg, out_dir, net);
      std::cout << psu::ReportJson(report);
    } else if (*run_party) {
      auto cfg = psu::LoadConfig(config_path);
      cfg.assign_fresh = cfg.assign_fresh || assign_fresh;
      if (!peers.empty()) cfg.addresses = SplitList(peers);
      if (!listen.empty()) {
        if (cfg.addresses.empty()) cfg.addresses.resize(cfg.parties);
        if (party >= 0 && party < static_cast<int>(cfg.addresses.size())) {
          cfg.addresses[party] = listen;
        }
      }
      if (timeout_ms > 0) cfg.timeout = std::chrono::milliseconds(timeout_ms);
      psu::RunParty(cfg, party, out_dir);
      std::cerr << "party " << party << " done; output in " << out_dir << "\n";
    } else if (*evaluate) {
      auto cfg = psu::LoadConfig(config_path);
      auto text = psu::ReportJson(psu::Evaluate(cfg, out_dir));
      if (report_path.empty()) {
        std::cout << text;
      } else {
        std::ofstream(report_path, std::ios::trunc) << text;
      }
    } else if (*gen) {
      for (const auto& s : SplitList(sizes)) {
        corpus.sizes.push_back(std::stoul(s));
      }
      if (variant == "ordered") {
        corpus.variant = psu::EncryptionMode::kOrdered;
      } else if (variant != "unordered") {
        throw psu::Error(psu::ErrorCode::kConfigError,
                         "variant must be ordered or unordered");
      }
      auto summary = psu::GenerateCorpus(corpus, out_dir);
      std::cout << "shared entities: " << summary.shared_entities << "\n";
      for (size_t k = 0; k < summary.corrupted_rows.size(); ++k) {
        std::cout << "party " << k << ": " << corpus.sizes[k] << " rows, "
                  << summary.corrupted_rows[k] << " corrupted\n";
      }
    } else if (*params) {
      return PrintParams(preset, modulus);
    }
  } catch (const psu::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return psu::ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
