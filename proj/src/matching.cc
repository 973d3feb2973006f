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

#include "psu/matching.h"

#include <algorithm>
#include <unordered_set>

#include "psu/error.h"

namespace psu {
namespace {

std::string KeyOf(const EncryptedIdentifier& x, const GroupParams& g) {
  auto bytes = SerializeIdentifier(x, g);
  return std::string(bytes.begin(), bytes.end());
}

// Tokens of x that can be paired one-to-one with equal tokens of y.
std::vector<GroupElement> SharedTokens(const std::vector<GroupElement>& x,
                                       const std::vector<GroupElement>& y) {
  std::vector<bool> used(y.size(), false);
  std::vector<GroupElement> shared;
  for (const auto& token : x) {
    for (size_t j = 0; j < y.size(); ++j) {
      if (!used[j] && y[j] == token) {
        used[j] = true;
        shared.push_back(token);
        break;
      }
    }
  }
  return shared;
}

}  // namespace

CompareResult Compare(const EncryptedIdentifier& x,
                      const EncryptedIdentifier& y, const MatchConfig& cfg) {
  PSU_ENFORCE(x.features.size() == y.features.size() &&
                  x.features.size() == cfg.d_match(),
              ErrorCode::kShapeMismatch,
              "feature counts " + std::to_string(x.features.size()) + " vs " +
                  std::to_string(y.features.size()));
  CompareResult result;
  result.list_match.resize(x.features.size());
  for (size_t r = 0; r < x.features.size(); ++r) {
    const auto& xs = x.features[r];
    const auto& ys = y.features[r];
    auto& matched = result.list_match[r];
    for (size_t l1 = 0; l1 < xs.size(); ++l1) {
      if (std::find(ys.begin(), ys.end(), xs[l1]) != ys.end()) {
        matched.push_back(l1);
      }
    }
    if (matched.size() < cfg.Threshold(r)) return result;
  }
  result.is_match = true;
  return result;
}

EncryptedSet ProvisionalUnionOrdered(const std::vector<EncryptedSet>& sets,
                                     const GroupParams& g) {
  EncryptedSet out;
  std::unordered_set<std::string> seen;
  for (const auto& set : sets) {
    for (const auto& item : set.items) {
      if (seen.insert(KeyOf(item, g)).second) out.items.push_back(item);
    }
  }
  return out;
}

EncryptedSet DedupUnionNoisy(const EncryptedSet& concatenated,
                             const MatchConfig& cfg, const GroupParams& g,
                             const BloomOptions& bloom, Rng& rng,
                             DedupStats* stats) {
  DedupStats local;
  DedupStats& st = stats != nullptr ? *stats : local;
  std::vector<EncryptedIdentifier> items = concatenated.items;
  std::vector<bool> alive(items.size(), true);
  std::vector<BloomFilter> filters;
  if (bloom.enabled) {
    filters.reserve(items.size());
    for (const auto& item : items) {
      filters.push_back(BloomEncode(item, g, bloom.bits, bloom.hashes));
    }
  }

  for (size_t i = 0; i < items.size(); ++i) {
    if (!alive[i]) continue;
    for (size_t j = i + 1; j < items.size(); ++j) {
      if (!alive[j]) continue;
      ++st.pairs_considered;
      if (bloom.enabled && !BloomPrefilter(filters[i], filters[j], cfg)) {
        ++st.prefilter_rejections;
        continue;
      }
      ++st.compares;
      if (!Compare(items[i], items[j], cfg).is_match) continue;
      ++st.merges;
      alive[j] = false;
      for (size_t r = 0; r < items[i].features.size(); ++r) {
        items[i].features[r] =
            SharedTokens(items[i].features[r], items[j].features[r]);
      }
      if (bloom.enabled) {
        filters[i] = BloomEncode(items[i], g, bloom.bits, bloom.hashes);
      }
    }
  }

  EncryptedSet out;
  out.provenance = concatenated.provenance;
  for (size_t i = 0; i < items.size(); ++i) {
    if (!alive[i]) continue;
    auto& item = items[i];
    for (size_t r = 0; r < item.features.size(); ++r) {
      auto& tokens = item.features[r];
      size_t keep = cfg.Threshold(r);
      if (tokens.size() <= keep) continue;
      // Random subset of size `keep`, relative order preserved.
      std::vector<size_t> idx(tokens.size());
      for (size_t k = 0; k < idx.size(); ++k) idx[k] = k;
      rng.Shuffle(idx);
      idx.resize(keep);
      std::sort(idx.begin(), idx.end());
      std::vector<GroupElement> kept;
      kept.reserve(keep);
      for (size_t k : idx) kept.push_back(tokens[k]);
      tokens = std::move(kept);
    }
    out.items.push_back(std::move(item));
  }
  return out;
}

UnionTable AssignUniversalIndices(std::vector<EncryptedIdentifier> entries,
                                  const GroupParams& g) {
  std::vector<std::pair<std::string, size_t>> keys;
  keys.reserve(entries.size());
  for (size_t i = 0; i < entries.size(); ++i) {
    keys.emplace_back(KeyOf(entries[i], g), i);
  }
  std::sort(keys.begin(), keys.end());
  UnionTable table;
  table.entries.reserve(entries.size());
  for (const auto& [key, i] : keys) {
    table.entries.push_back(std::move(entries[i]));
  }
  return table;
}

OrderedUnionIndex::OrderedUnionIndex(const UnionTable& table,
                                     const GroupParams& g)
    : g_(&g) {
  for (size_t i = 0; i < table.entries.size(); ++i) {
    index_.emplace(KeyOf(table.entries[i], g), i);
  }
}

std::optional<size_t> OrderedUnionIndex::Find(
    const EncryptedIdentifier& x) const {
  auto it = index_.find(KeyOf(x, *g_));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

NoisyUnionIndex::NoisyUnionIndex(const UnionTable& table,
                                 const MatchConfig& cfg, const GroupParams& g,
                                 const BloomOptions& bloom)
    : table_(&table), cfg_(cfg), g_(&g), bloom_(bloom) {
  if (bloom_.enabled) {
    filters_.reserve(table.entries.size());
    for (const auto& entry : table.entries) {
      filters_.push_back(BloomEncode(entry, g, bloom_.bits, bloom_.hashes));
    }
  }
}

std::optional<size_t> NoisyUnionIndex::Find(
    const EncryptedIdentifier& x) const {
  std::optional<BloomFilter> probe;
  if (bloom_.enabled) probe = BloomEncode(x, *g_, bloom_.bits, bloom_.hashes);
  for (size_t i = 0; i < table_->entries.size(); ++i) {
    if (probe && !BloomPrefilter(*probe, filters_[i], cfg_)) continue;
    if (Compare(x, table_->entries[i], cfg_).is_match) return i;
  }
  return std::nullopt;
}

}  // namespace psu
