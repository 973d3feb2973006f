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

#include "psu/random.h"

#include <openssl/evp.h>
#include <openssl/rand.h>

#include <cstring>
#include <string>

#include "psu/error.h"
#include "psu/sha3.h"

namespace psu {

struct Rng::CipherCtx {
  EVP_CIPHER_CTX* ctx = nullptr;
  ~CipherCtx() { EVP_CIPHER_CTX_free(ctx); }
};

Rng::Rng(const Key& key) : key_(key), ctx_(std::make_unique<CipherCtx>()) {
  ctx_->ctx = EVP_CIPHER_CTX_new();
  std::array<uint8_t, 16> iv{};
  if (ctx_->ctx == nullptr ||
      EVP_EncryptInit_ex(ctx_->ctx, EVP_chacha20(), nullptr, key_.data(),
                         iv.data()) != 1) {
    throw Error(ErrorCode::kRngFailure, "cannot initialise chacha20");
  }
}

Rng::~Rng() = default;
Rng::Rng(Rng&&) noexcept = default;
Rng& Rng::operator=(Rng&&) noexcept = default;

Rng Rng::FromSeed(uint64_t seed) {
  std::string material = "psu-rng-seed:" + std::to_string(seed);
  return Rng(Sha3_256(material));
}

Rng Rng::FromEntropy() {
  Key key{};
  if (RAND_bytes(key.data(), static_cast<int>(key.size())) != 1) {
    throw Error(ErrorCode::kRngFailure, "RAND_bytes failed");
  }
  return Rng(key);
}

Rng Rng::Fork(std::string_view label) const {
  std::string material(reinterpret_cast<const char*>(key_.data()),
                       key_.size());
  material.append("/fork/");
  material.append(label);
  return Rng(Sha3_256(material));
}

void Rng::Refill() {
  std::array<uint8_t, 256> zeros{};
  int out_len = 0;
  if (EVP_EncryptUpdate(ctx_->ctx, buffer_.data(), &out_len, zeros.data(),
                        static_cast<int>(zeros.size())) != 1 ||
      out_len != static_cast<int>(buffer_.size())) {
    throw Error(ErrorCode::kRngFailure, "chacha20 keystream failed");
  }
  pos_ = 0;
}

void Rng::Fill(std::span<uint8_t> out) {
  size_t written = 0;
  while (written < out.size()) {
    if (pos_ == buffer_.size()) Refill();
    size_t n = std::min(out.size() - written, buffer_.size() - pos_);
    std::memcpy(out.data() + written, buffer_.data() + pos_, n);
    pos_ += n;
    written += n;
  }
}

uint64_t Rng::NextU64() {
  std::array<uint8_t, 8> b{};
  Fill(b);
  uint64_t v = 0;
  for (uint8_t x : b) v = (v << 8) | x;
  return v;
}

uint64_t Rng::Uniform(uint64_t bound) {
  if (bound == 0) throw Error(ErrorCode::kRngFailure, "Uniform(0)");
  // Rejection on the top partial block keeps the draw unbiased.
  uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
  for (;;) {
    uint64_t v = NextU64();
    if (v < limit) return v % bound;
  }
}

}  // namespace psu
