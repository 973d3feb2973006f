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

#include "psu/hasher.h"

namespace psu {

GroupElement HashToken(std::string_view token, const GroupParams& g) {
  Digest256 digest = Sha3_256(token);
  return ProjectToQr(BytesToInteger(digest), g);
}

HashedIdentifier HashIdentifier(const TokenizedIdentifier& tok,
                                const GroupParams& g) {
  HashedIdentifier out;
  out.features.reserve(tok.features.size());
  for (const auto& feature : tok.features) {
    auto& dst = out.features.emplace_back();
    dst.reserve(feature.size());
    for (const auto& gram : feature) dst.push_back(HashToken(gram, g));
  }
  return out;
}

}  // namespace psu
