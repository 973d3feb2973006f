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
#include <cstdint>
#include <span>
#include <vector>

#include "psu/commcrypt.h"
#include "psu/tokenizer.h"

namespace psu {

struct BloomOptions {
  bool enabled = true;
  size_t bits = size_t{1} << 20;
  size_t hashes = 4;
};

// Fixed-size bit array with k SHA3-derived probe positions per key. Keeps the
// list of set positions next to the dense words so that intersections cost
// O(set bits) rather than O(m).
class BloomFilter {
 public:
  // bits must be a power of two, hashes >= 1.
  BloomFilter(size_t bits, size_t hashes);

  void Insert(std::span<const uint8_t> key);
  bool MaybeContains(std::span<const uint8_t> key) const;

  size_t bits() const { return bits_; }
  size_t hashes() const { return hashes_; }
  size_t popcount() const { return positions_.size(); }
  bool Test(size_t bit) const {
    return (words_[bit >> 6] >> (bit & 63)) & 1u;
  }
  // popcount(this AND other).
  size_t AndPopcount(const BloomFilter& other) const;

  friend bool operator==(const BloomFilter& a, const BloomFilter& b) {
    return a.bits_ == b.bits_ && a.hashes_ == b.hashes_ && a.words_ == b.words_;
  }

 private:
  void Probe(std::span<const uint8_t> key, std::vector<size_t>& out) const;

  size_t bits_;
  size_t hashes_;
  std::vector<uint64_t> words_;
  std::vector<uint32_t> positions_;
};

// One filter spanning every token of every feature, keyed by the fixed-width
// element encoding. Token order and feature order do not affect the result.
BloomFilter BloomEncode(const EncryptedIdentifier& x, const GroupParams& g,
                        size_t bits, size_t hashes);

// False only when the filters rule out a compare() match. Any accepted pair
// shares at least one token, whose probe bits are then set in both filters;
// that single bit is all that survives arbitrary probe collisions, so it is
// the threshold. Throws ConfigMismatch on differing (m, k).
bool BloomPrefilter(const BloomFilter& x, const BloomFilter& y,
                    const MatchConfig& cfg);

}  // namespace psu
