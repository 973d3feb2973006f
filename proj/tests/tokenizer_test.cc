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

#include "gtest/gtest.h"

#include "oracles.h"
#include "psu/error.h"
#include "psu/tokenizer.h"

namespace psu {
namespace {

TEST(RationalTest, ExactCeiling) {
  auto r = Rational::Parse("0.7");
  EXPECT_EQ(r.CeilTimes(10), 7u);
  EXPECT_EQ(Rational::Parse("7/10"), r);
  EXPECT_EQ(Rational::FromDouble(0.7), r);
  EXPECT_EQ(Rational::Parse("0.9").CeilTimes(10), 9u);
  EXPECT_EQ(Rational::Parse("1").CeilTimes(10), 10u);
  EXPECT_EQ(Rational::Parse("0.71").CeilTimes(10), 8u);
  for (size_t count = 0; count < 40; ++count) {
    EXPECT_EQ(Rational::Parse("3/7").CeilTimes(count),
              oracle::CeilFraction(3, 7, count));
  }
  EXPECT_THROW(Rational::Parse("abc"), Error);
}

TEST(MatchConfigTest, Validation) {
  MatchConfig cfg;
  EXPECT_THROW(cfg.Validate(), Error);
  cfg.features = {FeatureSpec::Make("a", 12, 3)};
  cfg.lambda = Rational{7, 10};
  EXPECT_NO_THROW(cfg.Validate());
  EXPECT_EQ(cfg.Threshold(0), 7u);
  cfg.lambda = Rational{0, 1};
  EXPECT_THROW(cfg.Validate(), Error);
  cfg.lambda = Rational{11, 10};
  EXPECT_THROW(cfg.Validate(), Error);
  // n > L raises L.
  auto f = FeatureSpec::Make("b", 2, 3);
  EXPECT_EQ(f.length, 3u);
  EXPECT_EQ(f.gram_count(), 1u);
}

TEST(NormalizeTest, PadAndTruncate) {
  EXPECT_EQ(NormalizeField("ab", FeatureSpec::Make("f", 4, 1)), "ab  ");
  EXPECT_EQ(NormalizeField("abcdef", FeatureSpec::Make("f", 4, 1)), "abcd");
  EXPECT_EQ(NormalizeField("", FeatureSpec::Make("f", 3, 1)), "   ");
}

TEST(NormalizeTest, FoldsCaseAndAccents) {
  auto f = FeatureSpec::Make("f", 4, 1);
  EXPECT_EQ(NormalizeField("Jos\xC3\xA9", f), "jose");
  // Combining acute accent.
  EXPECT_EQ(NormalizeField("Jose\xCC\x81", f), "jose");
  EXPECT_EQ(NormalizeField("M\xC3\xBCLLER", FeatureSpec::Make("f", 6, 1)), "muller");
  EXPECT_EQ(NormalizeField("\xC3\x86sir", FeatureSpec::Make("f", 5, 1)), "aesir");
  EXPECT_EQ(NormalizeField("Stra\xC3\x9F" "e", FeatureSpec::Make("f", 7, 1)),
            "strasse");
  // Length counts code points: the Cyrillic word stays 4 characters.
  auto out = NormalizeField("\xD0\x9C\xD0\x98\xD0\xA0\xD0\x90", f);
  EXPECT_EQ(DecodeUtf8(out).size(), 4u);
  EXPECT_EQ(out, "\xD0\xBC\xD0\xB8\xD1\x80\xD0\xB0");
  for (std::string s : {"Hello World", "ABC-def", "x"}) {
    EXPECT_EQ(NormalizeField(s, FeatureSpec::Make("f", 9, 1)),
              oracle::AsciiNormalize(s, 9));
  }
}

TEST(NgramsTest, SlidingWindow) {
  EXPECT_EQ(Ngrams("abcd", 2), (std::vector<std::string>{"ab", "bc", "cd"}));
  EXPECT_EQ(Ngrams("abcd", 4), (std::vector<std::string>{"abcd"}));
  auto g = Ngrams("123 main st.", 3);
  ASSERT_EQ(g.size(), 10u);
  EXPECT_EQ(g[0], "123");
  EXPECT_EQ(g[1], "23 ");
  EXPECT_EQ(g[2], "3 m");
  EXPECT_EQ(g, oracle::SlidingWindow("123 main st.", 3));
  // Multi-byte characters count once.
  EXPECT_EQ(Ngrams("\xC3\xA9t\xC3\xA9", 2).size(), 2u);
}

TEST(TokenizeRecordTest, Shapes) {
  MatchConfig cfg;
  cfg.features = {FeatureSpec::Make("f", 4, 2)};
  std::vector<std::string> one = {"ab"};
  auto tok = TokenizeRecord(one, cfg);
  ASSERT_EQ(tok.features.size(), 1u);
  EXPECT_EQ(tok.features[0], (std::vector<std::string>{"ab", "b ", "  "}));
  EXPECT_EQ(TokenizeRecord(one, cfg), tok);

  cfg.features.push_back(FeatureSpec::Make("g", 3, 1));
  std::vector<std::string> three = {"a", "b", "c"};
  try {
    TokenizeRecord(three, cfg);
    FAIL() << "expected ArityMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kArityMismatch);
  }
}

TEST(Utf8Test, InvalidBytesBecomeReplacement) {
  auto u = DecodeUtf8("a\xFF" "b");
  EXPECT_EQ(u, (std::u32string{U'a', 0xFFFD, U'b'}));
  EXPECT_EQ(EncodeUtf8(DecodeUtf8("h\xC3\xA9llo")), "h\xC3\xA9llo");
}

}  // namespace
}  // namespace psu
