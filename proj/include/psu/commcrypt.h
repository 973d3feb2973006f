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

#include <cstdint>
#include <span>
#include <vector>

#include "psu/bytes.h"
#include "psu/group_math.h"
#include "psu/hasher.h"
#include "psu/random.h"

namespace psu {

enum class EncryptionMode { kOrdered, kUnordered };

struct EncryptedIdentifier {
  std::vector<std::vector<GroupElement>> features;
  // Exponentiation layers applied so far. Local bookkeeping only; never
  // serialized and ignored by equality.
  int layer_count = 0;

  static EncryptedIdentifier FromHashed(const HashedIdentifier& h);

  size_t token_count() const;

  friend bool operator==(const EncryptedIdentifier& a,
                         const EncryptedIdentifier& b) {
    return a.features == b.features;
  }
};

struct EncryptedSet {
  std::vector<EncryptedIdentifier> items;
  // Origin party, for routing. Not part of the payload encoding.
  int provenance = -1;
};

// Raises every token to s. In unordered mode the token positions of each
// feature are also permuted by a fresh uniform permutation; the feature order
// is never touched.
EncryptedIdentifier EncryptIdentifier(const EncryptedIdentifier& x,
                                      const SecretExponent& s,
                                      EncryptionMode mode,
                                      const GroupParams& g, Rng& rng);

// EncryptIdentifier on every item, then a uniform shuffle of the items.
EncryptedSet EncryptSet(const EncryptedSet& set, const SecretExponent& s,
                        EncryptionMode mode, const GroupParams& g, Rng& rng);

// Applies the exponents left to right; the empty list is the identity.
// Test utility: the result must equal one exponentiation by prod(s_i) mod q.
std::vector<std::vector<GroupElement>> ComposeCheck(
    const HashedIdentifier& x, std::span<const SecretExponent> exponents,
    const GroupParams& g);

// Wire encoding: u32 feature count, then per feature a u32 token count and
// that many fixed-width big-endian elements.
void AppendIdentifier(const EncryptedIdentifier& x, const GroupParams& g,
                      std::vector<uint8_t>& out);
std::vector<uint8_t> SerializeIdentifier(const EncryptedIdentifier& x,
                                         const GroupParams& g);
EncryptedIdentifier ReadIdentifier(ByteReader& in, const GroupParams& g);

// u32 item count followed by the items.
std::vector<uint8_t> SerializeSet(const EncryptedSet& set,
                                  const GroupParams& g);
EncryptedSet ParseSet(std::span<const uint8_t> bytes, const GroupParams& g);

}  // namespace psu
