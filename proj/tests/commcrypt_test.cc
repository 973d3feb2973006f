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

#include <algorithm>
#include <cmath>

#include "gtest/gtest.h"

#include "oracles.h"
#include "psu/commcrypt.h"
#include "psu/error.h"

namespace psu {
namespace {

SecretExponent Exp(unsigned long v, const GroupParams& g) {
  return SecretExponent::FromInteger(mpz_class(v), g);
}

EncryptedIdentifier Ident(std::vector<std::vector<unsigned long>> values,
                          const GroupParams& g) {
  EncryptedIdentifier x;
  for (auto& f : values) {
    std::vector<GroupElement> row;
    for (auto v : f) row.push_back(GroupElement::FromInteger(mpz_class(v), g));
    x.features.push_back(std::move(row));
  }
  return x;
}

std::vector<std::vector<unsigned long>> Values(const EncryptedIdentifier& x) {
  std::vector<std::vector<unsigned long>> out;
  for (const auto& f : x.features) {
    std::vector<unsigned long> row;
    for (const auto& e : f) row.push_back(e.value().get_ui());
    out.push_back(row);
  }
  return out;
}

std::vector<std::vector<unsigned long>> SortedValues(const EncryptedIdentifier& x) {
  auto v = Values(x);
  for (auto& f : v) std::sort(f.begin(), f.end());
  return v;
}

TEST(EncryptIdentifierTest, ToyExamples) {
  auto g = MakeGroupParams("toy-23");
  Rng rng = Rng::FromSeed(1);
  auto x = Ident({{2, 3}}, g);
  auto y = EncryptIdentifier(x, Exp(5, g), EncryptionMode::kOrdered, g, rng);
  EXPECT_EQ(Values(y), (std::vector<std::vector<unsigned long>>{{9, 13}}));
  EXPECT_EQ(Values(y)[0][1], oracle::PowModSlow(3, 5, 23));
  EXPECT_EQ(EncryptIdentifier(x, Exp(1, g), EncryptionMode::kOrdered, g, rng), x);

  auto z = Ident({{2, 3, 4, 6, 8}, {9, 12}}, g);
  auto u = EncryptIdentifier(z, Exp(1, g), EncryptionMode::kUnordered, g, rng);
  EXPECT_EQ(SortedValues(u), SortedValues(z));
  EXPECT_EQ(u.features[1].size(), 2u);
}

TEST(EncryptIdentifierTest, UnorderedIsElementwisePower) {
  auto g = MakeGroupParams("toy-1019");
  Rng rng = Rng::FromSeed(4);
  auto x = Ident({{4, 9, 16, 25}, {36, 49}}, g);
  for (unsigned long s = 1; s < 40; ++s) {
    auto y = EncryptIdentifier(x, Exp(s, g), EncryptionMode::kUnordered, g, rng);
    auto expected = Values(x);
    for (auto& f : expected) {
      for (auto& v : f) v = oracle::PowModSlow(v, s, 1019);
      std::sort(f.begin(), f.end());
    }
    EXPECT_EQ(SortedValues(y), expected);
  }
}

TEST(EncryptSetTest, CommutesAsMultisets) {
  auto g = MakeGroupParams("toy-23");
  Rng rng = Rng::FromSeed(2);
  EncryptedSet s;
  s.items = {Ident({{2, 3}}, g), Ident({{4, 6}}, g), Ident({{8, 9}}, g)};
  auto a = EncryptSet(EncryptSet(s, Exp(5, g), EncryptionMode::kOrdered, g, rng),
                      Exp(7, g), EncryptionMode::kOrdered, g, rng);
  auto b = EncryptSet(EncryptSet(s, Exp(7, g), EncryptionMode::kOrdered, g, rng),
                      Exp(5, g), EncryptionMode::kOrdered, g, rng);
  auto as = std::vector<std::vector<std::vector<unsigned long>>>();
  auto bs = as;
  for (auto& i : a.items) as.push_back(Values(i));
  for (auto& i : b.items) bs.push_back(Values(i));
  std::sort(as.begin(), as.end());
  std::sort(bs.begin(), bs.end());
  EXPECT_EQ(as, bs);

  EncryptedSet single;
  single.items = {Ident({{2}}, g)};
  auto e = EncryptSet(single, Exp(5, g), EncryptionMode::kOrdered, g, rng);
  ASSERT_EQ(e.items.size(), 1u);
  EXPECT_EQ(Values(e.items[0])[0][0], 9u);
}

TEST(EncryptSetTest, ShuffleIsUniform) {
  auto g = MakeGroupParams("toy-23");
  Rng rng = Rng::FromSeed(77);
  EncryptedSet s;
  s.items = {Ident({{1}}, g), Ident({{2}}, g), Ident({{3}}, g), Ident({{4}}, g)};
  const int runs = 4000;
  int counts[4][4] = {};
  for (int r = 0; r < runs; ++r) {
    auto e = EncryptSet(s, Exp(1, g), EncryptionMode::kOrdered, g, rng);
    for (int slot = 0; slot < 4; ++slot) {
      unsigned long v = e.items[slot].features[0][0].value().get_ui();
      int item = v == 1 ? 0 : v == 2 ? 1 : v == 3 ? 2 : 3;
      ++counts[item][slot];
    }
  }
  double mean = runs / 4.0;
  double sigma = std::sqrt(runs * 0.25 * 0.75);
  for (auto& row : counts) {
    for (int c : row) EXPECT_LE(std::abs(c - mean), 3 * sigma);
  }
}

TEST(ComposeCheckTest, Examples) {
  auto g = MakeGroupParams("toy-23");
  HashedIdentifier x;
  x.features = {{GroupElement::FromInteger(mpz_class(2), g)}};
  EXPECT_EQ(ComposeCheck(x, {}, g), x.features);
  std::vector<SecretExponent> s = {Exp(5, g), Exp(7, g)};
  auto out = ComposeCheck(x, s, g);
  EXPECT_EQ(out[0][0].value(), 4);
  EXPECT_EQ(oracle::PowModSlow(2, 35 % 11, 23), 4u);
  std::vector<SecretExponent> r = {Exp(7, g), Exp(5, g)};
  EXPECT_EQ(ComposeCheck(x, r, g), out);
}

TEST(SerializationTest, RoundTripAndErrors) {
  auto g = MakeGroupParams("toy-1019");
  EncryptedSet s;
  s.items = {Ident({{4, 9}, {16}}, g), Ident({{25}, {}}, g)};
  auto bytes = SerializeSet(s, g);
  // u32 count, then per item u32 features, per feature u32 n + 2-byte elements.
  EXPECT_EQ(bytes.size(), 4u + (4 + 4 + 4 + 4 + 2) + (4 + 4 + 2 + 4));
  EXPECT_EQ(bytes[3], 2);
  auto back = ParseSet(bytes, g);
  ASSERT_EQ(back.items.size(), 2u);
  EXPECT_EQ(back.items[0], s.items[0]);
  EXPECT_EQ(back.items[1], s.items[1]);
  bytes.push_back(0);
  EXPECT_THROW(ParseSet(bytes, g), Error);
  bytes.resize(bytes.size() - 3);
  EXPECT_THROW(ParseSet(bytes, g), Error);
  EXPECT_EQ(SerializeIdentifier(s.items[0], g).size(), 4u + 4 + 4 + 4 + 2);
}

}  // namespace
}  // namespace psu
