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
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace psu {

// ChaCha20 keystream generator. Seeded instances are reproducible; Fork()
// derives independent named substreams so that results do not depend on the
// order in which a party happens to consume randomness.
class Rng {
 public:
  using Key = std::array<uint8_t, 32>;

  explicit Rng(const Key& key);
  ~Rng();
  Rng(Rng&&) noexcept;
  Rng& operator=(Rng&&) noexcept;
  Rng(const Rng&) = delete;
  Rng& operator=(const Rng&) = delete;

  static Rng FromSeed(uint64_t seed);
  static Rng FromEntropy();

  Rng Fork(std::string_view label) const;

  void Fill(std::span<uint8_t> out);
  uint64_t NextU64();
  // Uniform in [0, bound); bound must be nonzero.
  uint64_t Uniform(uint64_t bound);

  template <typename T>
  void Shuffle(std::vector<T>& items) {
    for (size_t i = items.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(Uniform(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  const Key& key() const { return key_; }

 private:
  void Refill();

  struct CipherCtx;
  Key key_;
  std::unique_ptr<CipherCtx> ctx_;
  std::array<uint8_t, 256> buffer_{};
  size_t pos_ = 256;
};

}  // namespace psu
