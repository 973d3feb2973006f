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

#include "psu/session.h"

#include <exception>
#include <string>
#include <thread>

#include "psu/bytes.h"
#include "psu/error.h"
#include "psu/sha3.h"

namespace psu {
namespace {

PartyOptions MakePartyOptions(const SessionConfig& session, int self,
                              std::chrono::milliseconds timeout) {
  PartyOptions options;
  options.party_id = self;
  options.parties = session.parties;
  options.mode = session.variant;
  options.match = session.match;
  options.bloom = session.bloom;
  options.timeout = timeout;
  return options;
}

}  // namespace

Rng PartyRng(std::optional<uint64_t> master_seed, int party) {
  if (!master_seed) return Rng::FromEntropy();
  std::vector<uint8_t> material;
  const std::string_view tag = "psu-party-seed";
  material.insert(material.end(), tag.begin(), tag.end());
  PutU32(material, static_cast<uint32_t>(*master_seed >> 32));
  PutU32(material, static_cast<uint32_t>(*master_seed));
  PutU16(material, static_cast<uint16_t>(party));
  return Rng(Sha3_256(material));
}

LocalSessionResult RunLocalSession(LocalSessionOptions options,
                                   const GroupParams& group) {
  const int P = options.session.parties;
  PSU_ENFORCE(P >= 1, ErrorCode::kConfigError, "need at least one party");
  PSU_ENFORCE(static_cast<int>(options.data.size()) == P &&
                  static_cast<int>(options.rngs.size()) == P,
              ErrorCode::kConfigError, "one dataset and one rng per party");
  options.fixed_exponents.resize(P);

  InProcessNetwork network(P, options.network);
  std::vector<std::optional<PartyResult>> results(P);
  std::vector<std::exception_ptr> errors(P);
  std::vector<std::thread> threads;
  threads.reserve(P);
  for (int k = 0; k < P; ++k) {
    threads.emplace_back([&, k] {
      try {
        SessionConfig cfg = options.session;
        cfg.self = k;
        PartyOptions po = MakePartyOptions(cfg, k, options.timeout);
        po.fixed_exponents = options.fixed_exponents[k];
        Party party(std::move(po), group, std::move(options.data[k]),
                    std::move(options.rngs[k]));
        Transport& t = network.endpoint(k);
        auto early = Handshake(t, cfg.Digest(), options.timeout);
        results[k] = party.Run(t, std::move(early));
      } catch (...) {
        errors[k] = std::current_exception();
      }
    });
  }
  for (auto& th : threads) th.join();

  // Prefer the error that started the abort cascade.
  std::exception_ptr first;
  for (auto& e : errors) {
    if (!e) continue;
    try {
      std::rethrow_exception(e);
    } catch (const Error& err) {
      if (err.code() != ErrorCode::kProtocolAbort) std::rethrow_exception(e);
    } catch (...) {
      std::rethrow_exception(e);
    }
    if (!first) first = e;
  }
  if (first) std::rethrow_exception(first);

  LocalSessionResult out;
  for (auto& r : results) out.parties.push_back(std::move(*r));
  out.totals = network.total_counts();
  return out;
}

PartyResult RunNetworkParty(const SessionConfig& session,
                            const GroupParams& group,
                            std::vector<HashedIdentifier> local, Rng rng,
                            std::chrono::milliseconds timeout) {
  PSU_ENFORCE(static_cast<int>(session.addresses.size()) == session.parties,
              ErrorCode::kConfigError, "one address per party required");
  TcpTransport transport(session.self, session.addresses, timeout);
  auto early = Handshake(transport, session.Digest(), timeout);
  Party party(MakePartyOptions(session, session.self, timeout), group,
              std::move(local), std::move(rng));
  return party.Run(transport, std::move(early));
}

}  // namespace psu
