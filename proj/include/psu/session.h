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
#include <optional>
#include <vector>

#include "psu/party.h"
#include "psu/transport.h"

namespace psu {

// Per-party randomness: derived from the master seed when one is given,
// otherwise drawn from the OS.
Rng PartyRng(std::optional<uint64_t> master_seed, int party);

struct LocalSessionResult {
  std::vector<PartyResult> parties;
  MessageCounts totals;
};

struct LocalSessionOptions {
  // `self` is ignored; every party uses its own id.
  SessionConfig session;
  std::vector<std::vector<HashedIdentifier>> data;
  std::vector<Rng> rngs;
  // Optional (s1, s2, s3) per party.
  std::vector<std::optional<std::array<SecretExponent, 3>>> fixed_exponents;
  InProcessOptions network;
  std::chrono::milliseconds timeout{30000};
};

// All parties on their own threads over the in-process backend, with the
// config handshake first. Rethrows the first root-cause error.
LocalSessionResult RunLocalSession(LocalSessionOptions options,
                                   const GroupParams& group);

// One party over TCP: connect, handshake, run.
PartyResult RunNetworkParty(const SessionConfig& session,
                            const GroupParams& group,
                            std::vector<HashedIdentifier> local, Rng rng,
                            std::chrono::milliseconds timeout);

}  // namespace psu
