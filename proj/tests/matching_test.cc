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
#include <set>

#include "gtest/gtest.h"

#include "oracles.h"
#include "psu/bloom_filter.h"
#include "psu/error.h"
#include "psu/hasher.h"
#include "psu/matching.h"

namespace psu {
namespace {

const GroupParams& G() {
  static const GroupParams g = MakeGroupParams("test-512");
  return g;
}

// One feature holding hashes of the given token names.
EncryptedIdentifier FromTokens(const std::vector<std::vector<std::string>>& features) {
  EncryptedIdentifier x;
  for (const auto& f : features) {
    std::vector<GroupElement> row;
    for (const auto& t : f) row.push_back(HashToken(t, G()));
    x.features.push_back(std::move(row));
  }
  return x;
}

std::vector<std::string> Range(int from, int to) {
  std::vector<std::string> out;
  for (int i = from; i < to; ++i) out.push_back("t" + std::to_string(i));
  return out;
}

MatchConfig Cfg(size_t features, size_t length, size_t n, Rational lambda) {
  MatchConfig cfg;
  for (size_t i = 0; i < features; ++i) {
    cfg.features.push_back(FeatureSpec::Make("f" + std::to_string(i), length, n));
  }
  cfg.lambda = lambda;
  cfg.ordered_mode = false;
  return cfg;
}

TEST(CompareTest, ThresholdBoundary) {
  auto cfg = Cfg(1, 12, 3, Rational{7, 10});
  auto x = Range(0, 10);
  auto seven = Range(3, 13);  // shares t3..t9
  auto six = Range(4, 14);    // shares t4..t9
  ASSERT_EQ(oracle::PositionsCovered(x, seven), 7u);
  ASSERT_EQ(oracle::PositionsCovered(x, six), 6u);
  EXPECT_TRUE(Compare(FromTokens({x}), FromTokens({seven}), cfg).is_match);
  EXPECT_FALSE(Compare(FromTokens({x}), FromTokens({six}), cfg).is_match);
  auto r = Compare(FromTokens({x}), FromTokens({seven}), cfg);
  EXPECT_EQ(r.list_match[0], (std::vector<size_t>{3, 4, 5, 6, 7, 8, 9}));
}

TEST(CompareTest, SelfMatchSymmetryAndShape) {
  Rng rng = Rng::FromSeed(3);
  for (auto lambda : {Rational{1, 10}, Rational{7, 10}, Rational{1, 1}}) {
    auto cfg = Cfg(2, 12, 3, lambda);
    auto x = FromTokens({Range(0, 10), Range(20, 30)});
    auto r = Compare(x, x, cfg);
    EXPECT_TRUE(r.is_match);
    EXPECT_EQ(r.list_match[0].size(), 10u);
  }
  auto cfg = Cfg(1, 12, 3, Rational{7, 10});
  for (int trial = 0; trial < 200; ++trial) {
    int a = static_cast<int>(rng.Uniform(6));
    int b = static_cast<int>(rng.Uniform(6));
    auto x = FromTokens({Range(a, a + 10)});
    auto y = FromTokens({Range(b, b + 10)});
    EXPECT_EQ(Compare(x, y, cfg).is_match, Compare(y, x, cfg).is_match);
  }
  auto one = FromTokens({Range(0, 10)});
  auto two = FromTokens({Range(0, 10), Range(0, 10)});
  try {
    Compare(two, one, Cfg(2, 12, 3, Rational{7, 10}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShapeMismatch);
  }
}

TEST(CompareTest, AgreesWithPlaintextOverlap) {
  Rng rng = Rng::FromSeed(11);
  auto cfg = Cfg(1, 12, 3, Rational{7, 10});
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::string> x, y;
    for (int i = 0; i < 10; ++i) {
      x.push_back("g" + std::to_string(rng.Uniform(14)));
      y.push_back("g" + std::to_string(rng.Uniform(14)));
    }
    bool expected = oracle::PositionsCovered(x, y) >= 7;
    EXPECT_EQ(Compare(FromTokens({x}), FromTokens({y}), cfg).is_match, expected);
  }
}

TEST(ProvisionalUnionOrderedTest, SetSemantics) {
  auto a = FromTokens({{"a"}});
  auto b = FromTokens({{"b"}});
  auto c = FromTokens({{"c"}});
  auto d = FromTokens({{"d"}});
  auto e = FromTokens({{"e"}});
  EncryptedSet s1, s2;
  s1.items = {a, b};
  s2.items = {b, c};
  EXPECT_EQ(ProvisionalUnionOrdered({s1, s2}, G()).items.size(), 3u);
  EncryptedSet s3;
  s3.items = {c, d, e};
  EXPECT_EQ(ProvisionalUnionOrdered({s1, s3}, G()).items.size(), 5u);
  EXPECT_EQ(ProvisionalUnionOrdered({s3, s3}, G()).items.size(), 3u);
  // Position matters in ordered mode.
  EncryptedSet s4;
  s4.items = {FromTokens({{"a", "b"}}), FromTokens({{"b", "a"}})};
  EXPECT_EQ(ProvisionalUnionOrdered({s4}, G()).items.size(), 2u);
}

TEST(DedupUnionNoisyTest, Examples) {
  auto cfg = Cfg(1, 12, 3, Rational{7, 10});
  BloomOptions bloom;
  for (bool use_bloom : {true, false}) {
    bloom.enabled = use_bloom;
    Rng rng = Rng::FromSeed(8);

    // Same multiset, different order: one survivor.
    auto x = Range(0, 10);
    auto y = x;
    std::reverse(y.begin(), y.end());
    EncryptedSet s;
    s.items = {FromTokens({x}), FromTokens({y})};
    EXPECT_EQ(DedupUnionNoisy(s, cfg, G(), bloom, rng).items.size(), 1u);

    // A~B, B~C, not A~C: A absorbs B first, C survives.
    EncryptedSet chain;
    chain.items = {FromTokens({Range(0, 10)}), FromTokens({Range(3, 13)}),
                   FromTokens({Range(6, 16)})};
    ASSERT_TRUE(Compare(chain.items[1], chain.items[2], cfg).is_match);
    ASSERT_FALSE(Compare(chain.items[0], chain.items[2], cfg).is_match);
    DedupStats stats;
    auto out = DedupUnionNoisy(chain, cfg, G(), bloom, rng, &stats);
    EXPECT_EQ(out.items.size(), 2u);
    EXPECT_EQ(stats.merges, 1u);
    // Survivor A keeps only tokens shared with B.
    std::set<std::string> shared;
    for (const auto& t : Range(3, 10)) shared.insert(t);
    for (const auto& tok : out.items[0].features[0]) {
      bool found = false;
      for (const auto& t : shared) found = found || HashToken(t, G()) == tok;
      EXPECT_TRUE(found);
    }

    // Disjoint items all survive, trimmed to ceil(0.7 * 10) = 7 tokens.
    EncryptedSet disjoint;
    disjoint.items = {FromTokens({Range(0, 10)}), FromTokens({Range(100, 110)}),
                      FromTokens({Range(200, 210)})};
    auto d = DedupUnionNoisy(disjoint, cfg, G(), bloom, rng);
    ASSERT_EQ(d.items.size(), 3u);
    for (const auto& item : d.items) EXPECT_EQ(item.features[0].size(), 7u);
  }
}

TEST(DedupUnionNoisyTest, SingleSubstitutionPairsMerge) {
  // Clean vs one-substitution variant over L=12, n=3 always merges at 0.7.
  auto cfg = Cfg(1, 12, 3, Rational{7, 10});
  BloomOptions bloom;
  std::string clean = "maple grove ";
  for (size_t pos = 0; pos < 12; ++pos) {
    std::string typo = clean;
    typo[pos] = typo[pos] == 'q' ? 'z' : 'q';
    auto cg = oracle::SlidingWindow(clean, 3);
    auto tg = oracle::SlidingWindow(typo, 3);
    ASSERT_GE(oracle::PositionsCovered(cg, tg), 7u);
    EncryptedSet s;
    s.items = {FromTokens({cg}), FromTokens({tg})};
    Rng rng = Rng::FromSeed(pos);
    auto out = DedupUnionNoisy(s, cfg, G(), bloom, rng);
    ASSERT_EQ(out.items.size(), 1u);
    EXPECT_TRUE(Compare(FromTokens({cg}), out.items[0], cfg).is_match);
    EXPECT_TRUE(Compare(FromTokens({tg}), out.items[0], cfg).is_match);
  }
}

TEST(AssignUniversalIndicesTest, OrderInsensitive) {
  EXPECT_EQ(AssignUniversalIndices({}, G()).size(), 0u);
  auto a = FromTokens({{"a"}});
  auto b = FromTokens({{"b"}});
  auto c = FromTokens({{"c"}});
  auto t1 = AssignUniversalIndices({a, b, c}, G());
  auto t2 = AssignUniversalIndices({c, a, b}, G());
  ASSERT_EQ(t1.size(), 3u);
  for (size_t i = 0; i < 3; ++i) EXPECT_EQ(t1.entries[i], t2.entries[i]);
  OrderedUnionIndex idx(t1, G());
  std::set<size_t> seen;
  for (const auto& x : {a, b, c}) seen.insert(*idx.Find(x));
  EXPECT_EQ(seen, (std::set<size_t>{0, 1, 2}));
  EXPECT_FALSE(idx.Find(FromTokens({{"d"}})).has_value());
}

TEST(NoisyUnionIndexTest, FirstAcceptedEntry) {
  auto cfg = Cfg(1, 12, 3, Rational{7, 10});
  UnionTable t;
  t.entries = {FromTokens({Range(50, 57)}), FromTokens({Range(0, 7)})};
  NoisyUnionIndex idx(t, cfg, G(), BloomOptions{});
  EXPECT_EQ(idx.Find(FromTokens({Range(0, 10)})), std::optional<size_t>(1));
  EXPECT_FALSE(idx.Find(FromTokens({Range(20, 30)})).has_value());
}

TEST(BloomTest, OrderInsensitiveAndEmpty) {
  Rng rng = Rng::FromSeed(21);
  for (int trial = 0; trial < 100; ++trial) {
    auto x = FromTokens({Range(trial, trial + 10), Range(500 + trial, 505 + trial)});
    auto y = x;
    for (auto& f : y.features) rng.Shuffle(f);
    EXPECT_EQ(BloomEncode(x, G(), 1 << 12, 4), BloomEncode(y, G(), 1 << 12, 4));
  }
  EncryptedIdentifier empty;
  empty.features = {{}, {}};
  auto f = BloomEncode(empty, G(), 1 << 10, 3);
  EXPECT_EQ(f.popcount(), 0u);
  auto a = BloomEncode(FromTokens({Range(0, 30)}), G(), 1 << 20, 4);
  auto b = BloomEncode(FromTokens({Range(30, 60)}), G(), 1 << 20, 4);
  EXPECT_FALSE(a == b);
  EXPECT_LE(a.popcount(), 4u * 30u);
}

TEST(BloomTest, Prefilter) {
  auto cfg = Cfg(1, 12, 3, Rational{7, 10});
  auto x = FromTokens({Range(0, 10)});
  auto fx = BloomEncode(x, G(), 1 << 20, 4);
  EXPECT_TRUE(BloomPrefilter(fx, fx, cfg));
  BloomFilter zero(1 << 20, 4);
  EXPECT_FALSE(BloomPrefilter(fx, zero, cfg));
  // Near miss: 6 shared tokens passes the filter but fails compare.
  auto y = FromTokens({Range(4, 14)});
  EXPECT_TRUE(BloomPrefilter(fx, BloomEncode(y, G(), 1 << 20, 4), cfg));
  EXPECT_FALSE(Compare(x, y, cfg).is_match);
  BloomFilter other(1 << 12, 4);
  EXPECT_THROW(BloomPrefilter(fx, other, cfg), Error);
}

TEST(BloomTest, SoundOnRandomPairs) {
  Rng rng = Rng::FromSeed(5);
  auto cfg = Cfg(1, 12, 3, Rational{1, 10});
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::string> x, y;
    for (int i = 0; i < 10; ++i) {
      x.push_back("g" + std::to_string(rng.Uniform(60)));
      y.push_back("g" + std::to_string(rng.Uniform(60)));
    }
    auto ex = FromTokens({x});
    auto ey = FromTokens({y});
    if (Compare(ex, ey, cfg).is_match) {
      EXPECT_TRUE(BloomPrefilter(BloomEncode(ex, G(), 1 << 10, 3),
                                 BloomEncode(ey, G(), 1 << 10, 3), cfg));
    }
  }
}

}  // namespace
}  // namespace psu
