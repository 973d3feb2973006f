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

#include "psu/sha3.h"

#include <openssl/evp.h>

#include <memory>

#include "psu/error.h"

namespace psu {

Digest256 Sha3_256(std::span<const uint8_t> data) {
  Digest256 out{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha3_256(),
                 nullptr) != 1 ||
      len != out.size()) {
    throw Error(ErrorCode::kRngFailure, "EVP_Digest(sha3-256) failed");
  }
  return out;
}

Digest256 Sha3_256(std::string_view data) {
  return Sha3_256(std::span<const uint8_t>(
      reinterpret_cast<const uint8_t*>(data.data()), data.size()));
}

}  // namespace psu
