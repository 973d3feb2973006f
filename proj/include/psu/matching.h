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

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "psu/bloom_filter.h"
#include "psu/commcrypt.h"
#include "psu/random.h"
#include "psu/tokenizer.h"

namespace psu {

struct CompareResult {
  bool is_match = false;
  // Per feature, the indices of x's tokens that equal some token of y.
  // Features after the first failing one are left empty.
  std::vector<std::vector<size_t>> list_match;
};

// Noisy comparison: per feature, counts the distinct positions of x whose
// token occurs anywhere in y; matches iff every feature reaches
// ceil(lambda * (L_r - n_r + 1)). Throws ShapeMismatch on differing feature
// counts.
CompareResult Compare(const EncryptedIdentifier& x,
                      const EncryptedIdentifier& y, const MatchConfig& cfg);

// Concatenation with exact (position-sensitive) duplicate removal; the first
// occurrence in scan order survives.
EncryptedSet ProvisionalUnionOrdered(const std::vector<EncryptedSet>& sets,
                                     const GroupParams& g);

struct DedupStats {
  size_t pairs_considered = 0;
  size_t prefilter_rejections = 0;
  size_t compares = 0;
  size_t merges = 0;
};

// Pairwise scan in ascending index order over the concatenated sets. When a
// later item matches an earlier survivor, the later item is dropped and the
// survivor keeps only the tokens it shares with it (multiset intersection per
// feature). Survivors are finally cut down at random to exactly
// ceil(lambda * (L_r - n_r + 1)) tokens per feature, where they have that
// many. The relation is not transitive, so the result depends on order.
EncryptedSet DedupUnionNoisy(const EncryptedSet& concatenated,
                             const MatchConfig& cfg, const GroupParams& g,
                             const BloomOptions& bloom, Rng& rng,
                             DedupStats* stats = nullptr);

// The deduplicated union; universal index = position.
struct UnionTable {
  std::vector<EncryptedIdentifier> entries;

  size_t size() const { return entries.size(); }
};

// Sorts entries by ascending canonical serialization, so that the assignment
// depends only on the set of entries.
UnionTable AssignUniversalIndices(std::vector<EncryptedIdentifier> entries,
                                  const GroupParams& g);

// phi_k: local record index -> universal index.
struct UniversalIndexMap {
  int party_id = 0;
  std::vector<std::optional<size_t>> phi;
  // Local indices that met no union entry (unordered mode only).
  std::vector<size_t> unmatched;
};

// Exact lookup of fully encrypted identifiers in U.
class OrderedUnionIndex {
 public:
  OrderedUnionIndex(const UnionTable& table, const GroupParams& g);
  std::optional<size_t> Find(const EncryptedIdentifier& x) const;

 private:
  const GroupParams* g_;
  std::unordered_map<std::string, size_t> index_;
};

// First entry of U that Compare() accepts, optionally prefiltered by Bloom.
class NoisyUnionIndex {
 public:
  NoisyUnionIndex(const UnionTable& table, const MatchConfig& cfg,
                  const GroupParams& g, const BloomOptions& bloom);
  std::optional<size_t> Find(const EncryptedIdentifier& x) const;

 private:
  const UnionTable* table_;
  MatchConfig cfg_;
  const GroupParams* g_;
  BloomOptions bloom_;
  std::vector<BloomFilter> filters_;
};

}  // namespace psu
