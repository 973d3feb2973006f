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

#include <string_view>
#include <vector>

#include "psu/group_math.h"
#include "psu/sha3.h"
#include "psu/tokenizer.h"

namespace psu {

// Per feature, one group element per n-gram (same shape as the tokens).
struct HashedIdentifier {
  std::vector<std::vector<GroupElement>> features;

  friend bool operator==(const HashedIdentifier&,
                         const HashedIdentifier&) = default;
};

// SHA3-256 of the UTF-8 bytes, read as a big-endian integer, projected into
// QR(Z_p*). Tiny test groups collide freely; real presets do not in practice.
GroupElement HashToken(std::string_view token, const GroupParams& g);

HashedIdentifier HashIdentifier(const TokenizedIdentifier& tok,
                                const GroupParams& g);

}  // namespace psu
