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

#include <array>
#include <chrono>
#include <deque>
#include <memory>
#include <optional>
#include <vector>

#include "psu/bloom_filter.h"
#include "psu/commcrypt.h"
#include "psu/group_math.h"
#include "psu/hasher.h"
#include "psu/matching.h"
#include "psu/random.h"
#include "psu/transport.h"

namespace psu {

enum class Phase {
  kIdle,
  kRound1,          // circulate local sets under s1
  kAwaitUnion,      // waiting for the union pass (s3 * s2)
  kAwaitBroadcast,  // waiting for U
  kMatching,        // relaying and resolving identifiers
  kDone,
};

std::string_view PhaseName(Phase phase);

struct PartyOptions {
  int party_id = 0;
  int parties = 2;
  EncryptionMode mode = EncryptionMode::kOrdered;
  MatchConfig match;
  BloomOptions bloom;
  std::chrono::milliseconds timeout{30000};
  // Test hook: (s1, s2, s3) instead of sampled exponents.
  std::optional<std::array<SecretExponent, 3>> fixed_exponents;
};

struct PartyResult {
  UniversalIndexMap map;
  UnionTable union_table;
  MessageCounts sent;
};

// One party's protocol state machine. Party P-1 is the active party: it
// collects the round-one sets, forms the union, fixes U and broadcasts it.
// Single owner: Start()/Handle() must be driven from one thread.
class Party {
 public:
  Party(PartyOptions options, const GroupParams& group,
        std::vector<HashedIdentifier> local, Rng rng);

  // Handshake-free run over an established transport; `early` holds messages
  // that arrived during the handshake.
  PartyResult Run(Transport& transport, std::deque<Envelope> early = {});

  void Start(Transport& transport);
  void Handle(Transport& transport, const Envelope& env);
  bool done() const { return phase_ == Phase::kDone; }

  Phase phase() const { return phase_; }
  bool is_active() const { return options_.party_id == options_.parties - 1; }
  // (s1, s2, s3).
  const std::array<SecretExponent, 3>& exponents() const { return exps_; }
  const UnionTable& union_table() const { return union_; }
  const UniversalIndexMap& index_map() const { return map_; }

 private:
  int next() const { return (options_.party_id + 1) % options_.parties; }
  int prev() const {
    return (options_.party_id + options_.parties - 1) % options_.parties;
  }
  void Expect(bool ok, const Envelope& env, std::string_view what) const;

  void OnSetTransfer(Transport& t, const Envelope& env);
  void OnSetForward(Transport& t, const Envelope& env);
  void OnUnionTransfer(Transport& t, const Envelope& env);
  void OnUidBroadcast(Transport& t, const Envelope& env);
  void OnTokenRelay(Transport& t, const Envelope& env);
  void OnTokenReturn(Transport& t, const Envelope& env);

  void StoreRoundOneSet(int origin, EncryptedSet set);
  void MaybeFinishRoundOne(Transport& t);
  void SendUnion(Transport& t, const EncryptedSet& set, uint16_t hop);
  void FixUnion(Transport& t, EncryptedSet set);
  void BeginMatching(Transport& t);
  void MaybeDone();

  PartyOptions options_;
  const GroupParams* group_;
  std::vector<HashedIdentifier> local_;
  Rng rng_;
  std::array<SecretExponent, 3> exps_;
  SecretExponent relay_exp_;     // s3 * s2 * s1
  SecretExponent finalize_exp_;  // s1 * s3
  SecretExponent union_exp_;     // s3 * s2

  Phase phase_ = Phase::kIdle;
  int round1_relays_ = 0;
  bool own_set_home_ = false;
  std::vector<std::optional<EncryptedSet>> round1_sets_;  // active party
  int round1_sets_received_ = 0;
  uint64_t expected_token_relays_ = 0;
  uint64_t token_relays_ = 0;
  size_t token_returns_ = 0;

  UnionTable union_;
  std::unique_ptr<OrderedUnionIndex> ordered_index_;
  std::unique_ptr<NoisyUnionIndex> noisy_index_;
  UniversalIndexMap map_;
};

}  // namespace psu
