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

#include "psu/bloom_filter.h"

#include <bit>

#include "psu/error.h"
#include "psu/sha3.h"

namespace psu {

BloomFilter::BloomFilter(size_t bits, size_t hashes)
    : bits_(bits), hashes_(hashes) {
  PSU_ENFORCE(bits >= 64 && std::has_single_bit(bits),
              ErrorCode::kInvalidConfig,
              "bloom size must be a power of two >= 64");
  PSU_ENFORCE(hashes >= 1, ErrorCode::kInvalidConfig,
              "bloom filter needs at least one hash");
  words_.assign(bits / 64, 0);
}

void BloomFilter::Probe(std::span<const uint8_t> key,
                        std::vector<size_t>& out) const {
  out.clear();
  std::vector<uint8_t> material;
  material.reserve(key.size() + 1);
  material.push_back(0);
  material.insert(material.end(), key.begin(), key.end());
  for (size_t i = 0; i < hashes_; ++i) {
    material[0] = static_cast<uint8_t>(i);
    Digest256 d = Sha3_256(material);
    uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v = (v << 8) | d[b];
    out.push_back(static_cast<size_t>(v & (bits_ - 1)));
  }
}

void BloomFilter::Insert(std::span<const uint8_t> key) {
  std::vector<size_t> probes;
  Probe(key, probes);
  for (size_t bit : probes) {
    uint64_t mask = uint64_t{1} << (bit & 63);
    if ((words_[bit >> 6] & mask) == 0) {
      words_[bit >> 6] |= mask;
      positions_.push_back(static_cast<uint32_t>(bit));
    }
  }
}

bool BloomFilter::MaybeContains(std::span<const uint8_t> key) const {
  std::vector<size_t> probes;
  Probe(key, probes);
  for (size_t bit : probes) {
    if (!Test(bit)) return false;
  }
  return true;
}

size_t BloomFilter::AndPopcount(const BloomFilter& other) const {
  const BloomFilter& small =
      positions_.size() <= other.positions_.size() ? *this : other;
  const BloomFilter& large = &small == this ? other : *this;
  size_t count = 0;
  for (uint32_t bit : small.positions_) count += large.Test(bit) ? 1 : 0;
  return count;
}

BloomFilter BloomEncode(const EncryptedIdentifier& x, const GroupParams& g,
                        size_t bits, size_t hashes) {
  BloomFilter filter(bits, hashes);
  std::vector<uint8_t> buf;
  for (const auto& feature : x.features) {
    for (const auto& token : feature) {
      buf.clear();
      token.AppendBytes(g, buf);
      filter.Insert(buf);
    }
  }
  return filter;
}

bool BloomPrefilter(const BloomFilter& x, const BloomFilter& y,
                    const MatchConfig& cfg) {
  PSU_ENFORCE(x.bits() == y.bits() && x.hashes() == y.hashes(),
              ErrorCode::kConfigMismatch,
              "bloom filters built with different (m, k)");
  size_t min_shared_tokens = 0;
  for (size_t r = 0; r < cfg.d_match(); ++r) {
    min_shared_tokens = std::max(min_shared_tokens, cfg.Threshold(r));
  }
  if (min_shared_tokens == 0) return true;
  return x.AndPopcount(y) >= 1;
}

}  // namespace psu
