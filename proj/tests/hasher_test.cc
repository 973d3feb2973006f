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

#include <set>

#include "gtest/gtest.h"

#include "oracles.h"
#include "psu/hasher.h"
#include "psu/sha3.h"

namespace psu {
namespace {

std::string Hex(const Digest256& d) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  for (uint8_t b : d) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 15]);
  }
  return out;
}

TEST(Sha3Test, ReferenceVectors) {
  EXPECT_EQ(Hex(Sha3_256("")),
            "a7ffc6f8bf1ed76651c14756a061d662f580ff4de43b49fa82d80a4b80f8434a");
  EXPECT_EQ(Hex(Sha3_256("abc")),
            "3a985da74fe225b2045c172d6bd390bd855f086e3e9d525b46bfe24511431532");
}

TEST(HashTokenTest, EmptyTokenProjection) {
  auto g = MakeGroupParams("toy-23");
  mpz_class t("a7ffc6f8bf1ed76651c14756a061d662f580ff4de43b49fa82d80a4b80f8434a", 16);
  mpz_class base = t % 22 + 1;
  mpz_class expected = base * base % 23;
  EXPECT_EQ(HashToken("", g).value(), expected);

  auto big = MakeGroupParams("modp-2048");
  mpz_class base2 = t % (big.p() - 1) + 1;
  EXPECT_EQ(HashToken("", big).value(), oracle::PowMod(base2, 2, big.p()));
}

TEST(HashTokenTest, DeterministicAndDistinct) {
  auto g = MakeGroupParams("modp-2048");
  EXPECT_EQ(HashToken("ab", g), HashToken("ab", g));
  EXPECT_FALSE(HashToken("ab", g) == HashToken("ba", g));
  // Result is a quadratic residue.
  auto x = HashToken("ab", g);
  EXPECT_EQ(oracle::PowMod(x.value(), g.q(), g.p()), 1);
}

TEST(HashIdentifierTest, ShapeAndToyCollisions) {
  auto g = MakeGroupParams("toy-23");
  TokenizedIdentifier tok;
  tok.features = {{"abc", "bcd", "cde"}};
  auto h = HashIdentifier(tok, g);
  ASSERT_EQ(h.features.size(), 1u);
  EXPECT_EQ(h.features[0].size(), 3u);
  EXPECT_EQ(HashIdentifier(tok, g), h);

  // Pigeonhole: more than 11 distinct tokens cannot all map apart.
  std::set<unsigned long> values;
  for (int i = 0; i < 12; ++i) {
    values.insert(HashToken("t" + std::to_string(i), g).value().get_ui());
  }
  EXPECT_LE(values.size(), 11u);
}

}  // namespace
}  // namespace psu
