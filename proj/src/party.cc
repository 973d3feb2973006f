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

#include "psu/party.h"

#include <algorithm>
#include <string>

#include "psu/bytes.h"
#include "psu/error.h"

namespace psu {
namespace {

std::array<SecretExponent, 3> InitExponents(const PartyOptions& options,
                                            const GroupParams& g, Rng& rng) {
  if (options.fixed_exponents) return *options.fixed_exponents;
  Rng source = rng.Fork("exponents");
  auto s1 = SampleExponent(g, source);
  auto s2 = SampleExponent(g, source);
  auto s3 = SampleExponent(g, source);
  return {s1, s2, s3};
}

SecretExponent Combine(std::initializer_list<SecretExponent> factors,
                       const GroupParams& g) {
  std::vector<SecretExponent> v(factors);
  return SecretExponent::Product(v, g);
}

ProtocolMessage MakeMessage(MessageType type, int origin, int hop,
                            std::vector<uint8_t> payload) {
  ProtocolMessage msg;
  msg.type = type;
  msg.origin = static_cast<uint16_t>(origin);
  msg.hop = static_cast<uint16_t>(hop);
  msg.payload = std::move(payload);
  return msg;
}

std::vector<uint8_t> RelayPayload(uint32_t relay_id,
                                  const EncryptedIdentifier& x,
                                  const GroupParams& g) {
  std::vector<uint8_t> out;
  PutU32(out, relay_id);
  AppendIdentifier(x, g, out);
  return out;
}

std::pair<uint32_t, EncryptedIdentifier> ParseRelay(
    std::span<const uint8_t> payload, const GroupParams& g) {
  ByteReader in(payload);
  uint32_t id = in.U32();
  EncryptedIdentifier x = ReadIdentifier(in, g);
  PSU_ENFORCE(in.done(), ErrorCode::kFramingError,
              "trailing bytes after relayed identifier");
  return {id, std::move(x)};
}

EncryptedSet ParseLayeredSet(const ProtocolMessage& msg, const GroupParams& g,
                             int layers) {
  EncryptedSet set = ParseSet(msg.payload, g);
  set.provenance = msg.origin;
  for (auto& item : set.items) item.layer_count = layers;
  return set;
}

}  // namespace

std::string_view PhaseName(Phase phase) {
  switch (phase) {
    case Phase::kIdle: return "Idle";
    case Phase::kRound1: return "Round1";
    case Phase::kAwaitUnion: return "AwaitUnion";
    case Phase::kAwaitBroadcast: return "AwaitBroadcast";
    case Phase::kMatching: return "Matching";
    case Phase::kDone: return "Done";
  }
  return "Unknown";
}

Party::Party(PartyOptions options, const GroupParams& group,
             std::vector<HashedIdentifier> local, Rng rng)
    : options_(std::move(options)),
      group_(&group),
      local_(std::move(local)),
      rng_(std::move(rng)),
      exps_(InitExponents(options_, group, rng_)),
      relay_exp_(Combine({exps_[2], exps_[1], exps_[0]}, group)),
      finalize_exp_(Combine({exps_[0], exps_[2]}, group)),
      union_exp_(Combine({exps_[2], exps_[1]}, group)) {
  PSU_ENFORCE(options_.parties >= 1 && options_.parties <= 65535,
              ErrorCode::kConfigError, "party count out of range");
  PSU_ENFORCE(options_.party_id >= 0 && options_.party_id < options_.parties,
              ErrorCode::kConfigError, "party id out of range");
  options_.match.Validate();
  for (const auto& x : local_) {
    PSU_ENFORCE(x.features.size() == options_.match.d_match(),
                ErrorCode::kShapeMismatch,
                "local identifier does not match the feature config");
  }
  map_.party_id = options_.party_id;
}

void Party::Expect(bool ok, const Envelope& env, std::string_view what) const {
  if (ok) return;
  throw Error(ErrorCode::kPhaseViolation,
              "party " + std::to_string(options_.party_id) + " in phase " +
                  std::string(PhaseName(phase_)) + " got " +
                  std::string(MessageTypeName(env.msg.type)) + " from " +
                  std::to_string(env.from) + " (origin " +
                  std::to_string(env.msg.origin) + ", hop " +
                  std::to_string(env.msg.hop) + "): " + std::string(what));
}

PartyResult Party::Run(Transport& transport, std::deque<Envelope> early) {
  try {
    Start(transport);
    for (auto& env : early) {
      if (done()) break;
      Handle(transport, env);
    }
    while (!done()) {
      Handle(transport, transport.Receive(options_.timeout));
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kProtocolAbort) {
      std::string reason = e.what();
      for (int peer = 0; peer < options_.parties; ++peer) {
        if (peer == options_.party_id) continue;
        try {
          transport.Send(peer,
                         MakeMessage(MessageType::kAbort, options_.party_id, 0,
                                     {reason.begin(), reason.end()}));
        } catch (const Error&) {
        }
      }
    }
    throw;
  }
  PartyResult result;
  result.map = map_;
  result.union_table = union_;
  result.sent = transport.sent_counts();
  return result;
}

void Party::Start(Transport& transport) {
  PSU_ENFORCE(phase_ == Phase::kIdle, ErrorCode::kPhaseViolation,
              "party already started");
  PSU_ENFORCE(transport.self() == options_.party_id &&
                  transport.parties() == options_.parties,
              ErrorCode::kConfigError, "transport does not match party");
  phase_ = Phase::kRound1;
  if (is_active()) round1_sets_.resize(options_.parties);

  EncryptedSet own;
  own.provenance = options_.party_id;
  own.items.reserve(local_.size());
  for (const auto& x : local_) {
    own.items.push_back(EncryptedIdentifier::FromHashed(x));
  }
  Rng rng = rng_.Fork("round1/own");
  EncryptedSet enc = EncryptSet(own, exps_[0], options_.mode, *group_, rng);
  transport.Send(next(), MakeMessage(MessageType::kSetTransfer,
                                     options_.party_id, 1,
                                     SerializeSet(enc, *group_)));
}

void Party::Handle(Transport& t, const Envelope& env) {
  switch (env.msg.type) {
    case MessageType::kSetTransfer: return OnSetTransfer(t, env);
    case MessageType::kSetForward: return OnSetForward(t, env);
    case MessageType::kUnionTransfer: return OnUnionTransfer(t, env);
    case MessageType::kUidBroadcast: return OnUidBroadcast(t, env);
    case MessageType::kTokenRelay: return OnTokenRelay(t, env);
    case MessageType::kTokenReturn: return OnTokenReturn(t, env);
    case MessageType::kAbort:
      throw Error(ErrorCode::kProtocolAbort,
                  "party " + std::to_string(env.from) + " aborted: " +
                      std::string(env.msg.payload.begin(),
                                  env.msg.payload.end()));
    case MessageType::kHandshake:
      Expect(false, env, "handshake after session start");
  }
  Expect(false, env, "unknown message type");
}

void Party::OnSetTransfer(Transport& t, const Envelope& env) {
  const int P = options_.parties;
  const int self = options_.party_id;
  const int hop = env.msg.hop;
  const int origin = env.msg.origin;
  Expect(phase_ == Phase::kRound1, env, "set transfer outside round one");
  Expect(env.from == prev(), env, "set transfers arrive from the predecessor");
  Expect(hop >= 1 && hop <= P, env, "hop out of range");
  EncryptedSet set = ParseLayeredSet(env.msg, *group_, hop);

  if (hop == P) {
    Expect(origin == self && !own_set_home_, env,
           "a full circle must end at its origin, once");
    own_set_home_ = true;
    if (is_active()) {
      StoreRoundOneSet(self, std::move(set));
    } else {
      t.Send(P - 1, MakeMessage(MessageType::kSetForward, self, P,
                                SerializeSet(set, *group_)));
    }
  } else {
    Expect(origin != self && origin < P, env, "foreign set expected");
    Expect(round1_relays_ < P - 1, env, "too many round-one relays");
    expected_token_relays_ += set.items.size();
    Rng rng = rng_.Fork("round1/" + std::to_string(origin));
    EncryptedSet enc = EncryptSet(set, exps_[0], options_.mode, *group_, rng);
    t.Send(next(), MakeMessage(MessageType::kSetTransfer, origin, hop + 1,
                               SerializeSet(enc, *group_)));
    ++round1_relays_;
  }
  MaybeFinishRoundOne(t);
}

void Party::OnSetForward(Transport& t, const Envelope& env) {
  const int P = options_.parties;
  Expect(is_active(), env, "only the active party collects sets");
  Expect(phase_ == Phase::kRound1, env, "set forward outside round one");
  Expect(env.msg.origin == env.from && env.from != options_.party_id &&
             env.msg.hop == P,
         env, "forward must come from the origin after a full circle");
  Expect(!round1_sets_[env.from].has_value(), env, "duplicate set forward");
  StoreRoundOneSet(env.from, ParseLayeredSet(env.msg, *group_, P));
  MaybeFinishRoundOne(t);
}

void Party::StoreRoundOneSet(int origin, EncryptedSet set) {
  set.provenance = origin;
  round1_sets_[origin] = std::move(set);
  ++round1_sets_received_;
}

void Party::MaybeFinishRoundOne(Transport& t) {
  const int P = options_.parties;
  if (round1_relays_ < P - 1 || !own_set_home_) return;
  if (is_active() && round1_sets_received_ < P) return;
  phase_ = Phase::kAwaitUnion;
  if (!is_active()) return;

  std::vector<EncryptedSet> sets;
  sets.reserve(P);
  for (auto& s : round1_sets_) sets.push_back(std::move(*s));
  round1_sets_.clear();
  for (const auto& s : sets) {
    for (const auto& item : s.items) {
      PSU_ENFORCE(item.layer_count == P, ErrorCode::kPhaseViolation,
                  "round-one set is missing exponent layers");
    }
  }

  EncryptedSet provisional;
  if (options_.mode == EncryptionMode::kOrdered) {
    provisional = ProvisionalUnionOrdered(sets, *group_);
  } else {
    EncryptedSet concatenated;
    for (auto& s : sets) {
      for (auto& item : s.items) concatenated.items.push_back(std::move(item));
    }
    Rng rng = rng_.Fork("dedup");
    provisional = DedupUnionNoisy(concatenated, options_.match, *group_,
                                  options_.bloom, rng);
  }
  Rng rng = rng_.Fork("union/" + std::to_string(options_.party_id));
  SendUnion(t, EncryptSet(provisional, union_exp_, options_.mode, *group_, rng),
            1);
}

void Party::SendUnion(Transport& t, const EncryptedSet& set, uint16_t hop) {
  t.Send(prev(), MakeMessage(MessageType::kUnionTransfer, options_.parties - 1,
                             hop, SerializeSet(set, *group_)));
}

void Party::OnUnionTransfer(Transport& t, const Envelope& env) {
  const int P = options_.parties;
  const int hop = env.msg.hop;
  Expect(phase_ == Phase::kAwaitUnion, env, "union outside its pass");
  Expect(env.from == next(), env, "union travels downwards");
  Expect(hop >= 1 && hop <= P, env, "hop out of range");
  EncryptedSet set = ParseLayeredSet(env.msg, *group_, P + hop);
  if (hop == P) {
    Expect(is_active(), env, "only the active party closes the union pass");
    FixUnion(t, std::move(set));
    return;
  }
  Expect(!is_active() && options_.party_id == P - 1 - hop, env,
         "union arrived at the wrong party");
  Rng rng = rng_.Fork("union/" + std::to_string(options_.party_id));
  SendUnion(t, EncryptSet(set, union_exp_, options_.mode, *group_, rng),
            static_cast<uint16_t>(hop + 1));
  phase_ = Phase::kAwaitBroadcast;
}

void Party::FixUnion(Transport& t, EncryptedSet set) {
  const int P = options_.parties;
  for (const auto& item : set.items) {
    PSU_ENFORCE(item.layer_count == 2 * P, ErrorCode::kPhaseViolation,
                "union entry is missing exponent layers");
  }
  union_ = AssignUniversalIndices(std::move(set.items), *group_);
  EncryptedSet wire;
  wire.items = union_.entries;
  auto payload = SerializeSet(wire, *group_);
  for (int k = 0; k < P; ++k) {
    if (k == options_.party_id) continue;
    t.Send(k, MakeMessage(MessageType::kUidBroadcast, options_.party_id, 0,
                          payload));
  }
  BeginMatching(t);
}

void Party::OnUidBroadcast(Transport& t, const Envelope& env) {
  Expect(phase_ == Phase::kAwaitBroadcast && !is_active(), env,
         "unexpected union broadcast");
  Expect(env.from == options_.parties - 1, env,
         "only the active party broadcasts U");
  union_.entries = ParseSet(env.msg.payload, *group_).items;
  BeginMatching(t);
}

void Party::BeginMatching(Transport& t) {
  phase_ = Phase::kMatching;
  if (options_.mode == EncryptionMode::kOrdered) {
    ordered_index_ = std::make_unique<OrderedUnionIndex>(union_, *group_);
  } else {
    noisy_index_ = std::make_unique<NoisyUnionIndex>(union_, options_.match,
                                                     *group_, options_.bloom);
  }
  map_.phi.assign(local_.size(), std::nullopt);
  map_.unmatched.clear();

  const int P = options_.parties;
  const int self = options_.party_id;
  for (size_t i = 0; i < local_.size(); ++i) {
    Rng rng = rng_.Fork("relay/own/" + std::to_string(i));
    auto x = EncryptIdentifier(EncryptedIdentifier::FromHashed(local_[i]),
                               exps_[1], options_.mode, *group_, rng);
    auto payload = RelayPayload(static_cast<uint32_t>(i), x, *group_);
    if (P == 1) {
      t.Send(self, MakeMessage(MessageType::kTokenReturn, self, 1,
                               std::move(payload)));
    } else {
      t.Send(next(), MakeMessage(MessageType::kTokenRelay, self, 1,
                                 std::move(payload)));
    }
  }
  MaybeDone();
}

void Party::OnTokenRelay(Transport& t, const Envelope& env) {
  const int P = options_.parties;
  const int origin = env.msg.origin;
  const int hop = env.msg.hop;
  // Relays may overtake the broadcast of U; they only need the exponents.
  Expect(phase_ == Phase::kAwaitBroadcast || phase_ == Phase::kMatching, env,
         "token relay outside the matching phase");
  Expect(origin != options_.party_id && origin < P, env,
         "own identifiers come back as returns");
  Expect(env.from == prev() && hop >= 1 && hop < P, env, "bad relay route");
  Expect(token_relays_ < expected_token_relays_, env,
         "more relays than identifiers seen in round one");
  auto [id, x] = ParseRelay(env.msg.payload, *group_);
  Rng rng = rng_.Fork("relay/" + std::to_string(origin) + "/" +
                      std::to_string(id));
  auto y = EncryptIdentifier(x, relay_exp_, options_.mode, *group_, rng);
  auto payload = RelayPayload(id, y, *group_);
  if (next() == origin) {
    t.Send(origin, MakeMessage(MessageType::kTokenReturn, origin, hop + 1,
                               std::move(payload)));
  } else {
    t.Send(next(), MakeMessage(MessageType::kTokenRelay, origin, hop + 1,
                               std::move(payload)));
  }
  ++token_relays_;
  MaybeDone();
}

void Party::OnTokenReturn(Transport& t, const Envelope& env) {
  (void)t;
  const int P = options_.parties;
  Expect(phase_ == Phase::kMatching, env, "token return outside matching");
  Expect(env.msg.origin == options_.party_id && env.msg.hop == P &&
             env.from == prev(),
         env, "return must close this party's circle");
  auto [id, x] = ParseRelay(env.msg.payload, *group_);
  Expect(id < local_.size() && !map_.phi[id].has_value() &&
             std::find(map_.unmatched.begin(), map_.unmatched.end(), id) ==
                 map_.unmatched.end(),
         env, "unknown or repeated relay id");
  Rng unused = rng_.Fork("finalize");
  auto full = EncryptIdentifier(x, finalize_exp_, EncryptionMode::kOrdered,
                                *group_, unused);
  if (options_.mode == EncryptionMode::kOrdered) {
    auto hit = ordered_index_->Find(full);
    if (!hit) {
      throw Error(ErrorCode::kNoMatchInUnion,
                  "party " + std::to_string(options_.party_id) + " record " +
                      std::to_string(id) +
                      " has no entry in U; parties disagree on group, hash or "
                      "tokenization");
    }
    map_.phi[id] = *hit;
  } else {
    auto hit = noisy_index_->Find(full);
    if (hit) {
      map_.phi[id] = *hit;
    } else {
      map_.unmatched.push_back(id);
    }
  }
  ++token_returns_;
  MaybeDone();
}

void Party::MaybeDone() {
  if (phase_ != Phase::kMatching) return;
  if (token_returns_ < local_.size()) return;
  if (token_relays_ < expected_token_relays_) return;
  std::sort(map_.unmatched.begin(), map_.unmatched.end());
  phase_ = Phase::kDone;
}

}  // namespace psu
