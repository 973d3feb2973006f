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

#include "psu/commcrypt.h"

#include <numeric>

namespace psu {

EncryptedIdentifier EncryptedIdentifier::FromHashed(const HashedIdentifier& h) {
  EncryptedIdentifier x;
  x.features = h.features;
  return x;
}

size_t EncryptedIdentifier::token_count() const {
  size_t n = 0;
  for (const auto& f : features) n += f.size();
  return n;
}

EncryptedIdentifier EncryptIdentifier(const EncryptedIdentifier& x,
                                      const SecretExponent& s,
                                      EncryptionMode mode,
                                      const GroupParams& g, Rng& rng) {
  EncryptedIdentifier out;
  out.layer_count = x.layer_count + 1;
  out.features.reserve(x.features.size());
  for (const auto& feature : x.features) {
    auto& dst = out.features.emplace_back();
    dst.reserve(feature.size());
    for (const auto& token : feature) dst.push_back(ModExp(token, s, g));
    if (mode == EncryptionMode::kUnordered) rng.Shuffle(dst);
  }
  return out;
}

EncryptedSet EncryptSet(const EncryptedSet& set, const SecretExponent& s,
                        EncryptionMode mode, const GroupParams& g, Rng& rng) {
  EncryptedSet out;
  out.provenance = set.provenance;
  out.items.reserve(set.items.size());
  for (const auto& item : set.items) {
    out.items.push_back(EncryptIdentifier(item, s, mode, g, rng));
  }
  rng.Shuffle(out.items);
  return out;
}

std::vector<std::vector<GroupElement>> ComposeCheck(
    const HashedIdentifier& x, std::span<const SecretExponent> exponents,
    const GroupParams& g) {
  auto tokens = x.features;
  for (const auto& s : exponents) {
    for (auto& feature : tokens) {
      for (auto& token : feature) token = ModExp(token, s, g);
    }
  }
  return tokens;
}

void AppendIdentifier(const EncryptedIdentifier& x, const GroupParams& g,
                      std::vector<uint8_t>& out) {
  PutU32(out, static_cast<uint32_t>(x.features.size()));
  for (const auto& feature : x.features) {
    PutU32(out, static_cast<uint32_t>(feature.size()));
    for (const auto& token : feature) token.AppendBytes(g, out);
  }
}

std::vector<uint8_t> SerializeIdentifier(const EncryptedIdentifier& x,
                                         const GroupParams& g) {
  std::vector<uint8_t> out;
  out.reserve(8 + x.token_count() * g.element_bytes() +
              4 * x.features.size());
  AppendIdentifier(x, g, out);
  return out;
}

EncryptedIdentifier ReadIdentifier(ByteReader& in, const GroupParams& g) {
  EncryptedIdentifier x;
  uint32_t feature_count = in.U32();
  PSU_ENFORCE(feature_count <= in.remaining() / 4, ErrorCode::kFramingError,
              "implausible feature count");
  x.features.resize(feature_count);
  for (auto& feature : x.features) {
    uint32_t tokens = in.U32();
    PSU_ENFORCE(tokens <= in.remaining() / g.element_bytes(),
                ErrorCode::kFramingError, "implausible token count");
    feature.reserve(tokens);
    for (uint32_t i = 0; i < tokens; ++i) {
      feature.push_back(GroupElement::FromBytes(in.Take(g.element_bytes()), g));
    }
  }
  return x;
}

std::vector<uint8_t> SerializeSet(const EncryptedSet& set,
                                  const GroupParams& g) {
  std::vector<uint8_t> out;
  PutU32(out, static_cast<uint32_t>(set.items.size()));
  for (const auto& item : set.items) AppendIdentifier(item, g, out);
  return out;
}

EncryptedSet ParseSet(std::span<const uint8_t> bytes, const GroupParams& g) {
  ByteReader in(bytes);
  EncryptedSet set;
  uint32_t count = in.U32();
  PSU_ENFORCE(count <= in.remaining() / 4, ErrorCode::kFramingError,
              "implausible item count");
  set.items.reserve(count);
  for (uint32_t i = 0; i < count; ++i) {
    set.items.push_back(ReadIdentifier(in, g));
  }
  PSU_ENFORCE(in.done(), ErrorCode::kFramingError,
              "trailing bytes after encrypted set");
  return set;
}

}  // namespace psu
