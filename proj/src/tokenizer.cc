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

#include "psu/tokenizer.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "psu/error.h"

namespace psu {
namespace {

struct FoldEntry {
  char32_t code;
  const char* replacement;
};

// Generated from NFKD + combining-mark removal + lower-case, with explicit
// entries for letters that have no decomposition (ae, oe, ss, o-slash, ...).
constexpr FoldEntry kLatinFold[] = {
    {0x00C0, "a"}, {0x00C1, "a"}, {0x00C2, "a"}, {0x00C3, "a"}, {0x00C4, "a"},
    {0x00C5, "a"}, {0x00C6, "ae"}, {0x00C7, "c"}, {0x00C8, "e"}, {0x00C9, "e"},
    {0x00CA, "e"}, {0x00CB, "e"}, {0x00CC, "i"}, {0x00CD, "i"}, {0x00CE, "i"},
    {0x00CF, "i"}, {0x00D0, "d"}, {0x00D1, "n"}, {0x00D2, "o"}, {0x00D3, "o"},
    {0x00D4, "o"}, {0x00D5, "o"}, {0x00D6, "o"}, {0x00D8, "o"}, {0x00D9, "u"},
    {0x00DA, "u"}, {0x00DB, "u"}, {0x00DC, "u"}, {0x00DD, "y"}, {0x00DE, "th"},
    {0x00DF, "ss"}, {0x00E0, "a"}, {0x00E1, "a"}, {0x00E2, "a"}, {0x00E3, "a"},
    {0x00E4, "a"}, {0x00E5, "a"}, {0x00E6, "ae"}, {0x00E7, "c"}, {0x00E8, "e"},
    {0x00E9, "e"}, {0x00EA, "e"}, {0x00EB, "e"}, {0x00EC, "i"}, {0x00ED, "i"},
    {0x00EE, "i"}, {0x00EF, "i"}, {0x00F0, "d"}, {0x00F1, "n"}, {0x00F2, "o"},
    {0x00F3, "o"}, {0x00F4, "o"}, {0x00F5, "o"}, {0x00F6, "o"}, {0x00F8, "o"},
    {0x00F9, "u"}, {0x00FA, "u"}, {0x00FB, "u"}, {0x00FC, "u"}, {0x00FD, "y"},
    {0x00FE, "th"}, {0x00FF, "y"}, {0x0100, "a"}, {0x0101, "a"}, {0x0102, "a"},
    {0x0103, "a"}, {0x0104, "a"}, {0x0105, "a"}, {0x0106, "c"}, {0x0107, "c"},
    {0x0108, "c"}, {0x0109, "c"}, {0x010A, "c"}, {0x010B, "c"}, {0x010C, "c"},
    {0x010D, "c"}, {0x010E, "d"}, {0x010F, "d"}, {0x0110, "d"}, {0x0111, "d"},
    {0x0112, "e"}, {0x0113, "e"}, {0x0114, "e"}, {0x0115, "e"}, {0x0116, "e"},
    {0x0117, "e"}, {0x0118, "e"}, {0x0119, "e"}, {0x011A, "e"}, {0x011B, "e"},
    {0x011C, "g"}, {0x011D, "g"}, {0x011E, "g"}, {0x011F, "g"}, {0x0120, "g"},
    {0x0121, "g"}, {0x0122, "g"}, {0x0123, "g"}, {0x0124, "h"}, {0x0125, "h"},
    {0x0126, "h"}, {0x0127, "h"}, {0x0128, "i"}, {0x0129, "i"}, {0x012A, "i"},
    {0x012B, "i"}, {0x012C, "i"}, {0x012D, "i"}, {0x012E, "i"}, {0x012F, "i"},
    {0x0130, "i"}, {0x0131, "i"}, {0x0132, "ij"}, {0x0133, "ij"},
    {0x0134, "j"}, {0x0135, "j"}, {0x0136, "k"}, {0x0137, "k"}, {0x0138, "k"},
    {0x0139, "l"}, {0x013A, "l"}, {0x013B, "l"}, {0x013C, "l"}, {0x013D, "l"},
    {0x013E, "l"}, {0x013F, "l"}, {0x0140, "l"}, {0x0141, "l"}, {0x0142, "l"},
    {0x0143, "n"}, {0x0144, "n"}, {0x0145, "n"}, {0x0146, "n"}, {0x0147, "n"},
    {0x0148, "n"}, {0x0149, "n"}, {0x014A, "n"}, {0x014B, "n"}, {0x014C, "o"},
    {0x014D, "o"}, {0x014E, "o"}, {0x014F, "o"}, {0x0150, "o"}, {0x0151, "o"},
    {0x0152, "oe"}, {0x0153, "oe"}, {0x0154, "r"}, {0x0155, "r"},
    {0x0156, "r"}, {0x0157, "r"}, {0x0158, "r"}, {0x0159, "r"}, {0x015A, "s"},
    {0x015B, "s"}, {0x015C, "s"}, {0x015D, "s"}, {0x015E, "s"}, {0x015F, "s"},
    {0x0160, "s"}, {0x0161, "s"}, {0x0162, "t"}, {0x0163, "t"}, {0x0164, "t"},
    {0x0165, "t"}, {0x0166, "t"}, {0x0167, "t"}, {0x0168, "u"}, {0x0169, "u"},
    {0x016A, "u"}, {0x016B, "u"}, {0x016C, "u"}, {0x016D, "u"}, {0x016E, "u"},
    {0x016F, "u"}, {0x0170, "u"}, {0x0171, "u"}, {0x0172, "u"}, {0x0173, "u"},
    {0x0174, "w"}, {0x0175, "w"}, {0x0176, "y"}, {0x0177, "y"}, {0x0178, "y"},
    {0x0179, "z"}, {0x017A, "z"}, {0x017B, "z"}, {0x017C, "z"}, {0x017D, "z"},
    {0x017E, "z"}, {0x017F, "s"},
};

const std::unordered_map<char32_t, std::u32string>& LatinFoldTable() {
  static const auto* table = [] {
    auto* t = new std::unordered_map<char32_t, std::u32string>();
    for (const auto& e : kLatinFold) {
      std::u32string r;
      for (const char* c = e.replacement; *c != '\0'; ++c) r.push_back(*c);
      t->emplace(e.code, std::move(r));
    }
    return t;
  }();
  return *table;
}

bool IsCombiningMark(char32_t c) { return c >= 0x0300 && c <= 0x036F; }

}  // namespace

Rational Rational::Parse(std::string_view text) {
  auto fail = [&] {
    return Error(ErrorCode::kInvalidConfig,
                 "cannot parse rational '" + std::string(text) + "'");
  };
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Rational r;
    auto a = text.substr(0, slash);
    auto b = text.substr(slash + 1);
    if (std::from_chars(a.data(), a.data() + a.size(), r.num).ec !=
            std::errc() ||
        std::from_chars(b.data(), b.data() + b.size(), r.den).ec !=
            std::errc() ||
        r.den <= 0) {
      throw fail();
    }
    int64_t g = std::gcd(r.num, r.den);
    if (g > 1) {
      r.num /= g;
      r.den /= g;
    }
    return r;
  }
  // Decimal: integer part and up to nine fractional digits.
  int64_t num = 0;
  int64_t den = 1;
  bool seen_dot = false;
  bool any_digit = false;
  for (char c : text) {
    if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else if (c >= '0' && c <= '9') {
      if (den >= 1'000'000'000) throw fail();
      num = num * 10 + (c - '0');
      if (seen_dot) den *= 10;
      any_digit = true;
    } else {
      throw fail();
    }
  }
  if (!any_digit) throw fail();
  int64_t g = std::gcd(num, den);
  return Rational{num / (g == 0 ? 1 : g), den / (g == 0 ? 1 : g)};
}

Rational Rational::FromDouble(double value) {
  constexpr int64_t kScale = 1'000'000'000;
  int64_t num = std::llround(value * static_cast<double>(kScale));
  int64_t g = std::gcd(num, kScale);
  if (g == 0) g = 1;
  return Rational{num / g, kScale / g};
}

size_t Rational::CeilTimes(size_t count) const {
  auto prod = static_cast<__int128>(num) * static_cast<__int128>(count);
  auto q = prod / den;
  if (prod % den != 0 && prod > 0) ++q;
  return static_cast<size_t>(q);
}

std::string Rational::ToString() const {
  return std::to_string(num) + "/" + std::to_string(den);
}

FeatureSpec FeatureSpec::Make(std::string name, size_t length, size_t ngram) {
  FeatureSpec f;
  f.name = std::move(name);
  f.ngram = ngram;
  f.length = std::max(length, ngram);
  return f;
}

void MatchConfig::Validate() const {
  PSU_ENFORCE(!features.empty(), ErrorCode::kInvalidConfig,
              "match config needs at least one feature");
  PSU_ENFORCE(lambda.den > 0 && lambda.num > 0 && lambda.num <= lambda.den,
              ErrorCode::kInvalidConfig,
              "lambda must lie in (0, 1], got " + lambda.ToString());
  for (const auto& f : features) {
    PSU_ENFORCE(f.ngram >= 1 && f.ngram <= f.length,
                ErrorCode::kInvalidConfig,
                "feature '" + f.name + "' needs 1 <= n <= L");
  }
}

std::u32string DecodeUtf8(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  size_t i = 0;
  while (i < text.size()) {
    auto b0 = static_cast<unsigned char>(text[i]);
    char32_t cp = 0xFFFD;
    size_t len = 1;
    if (b0 < 0x80) {
      cp = b0;
    } else if ((b0 >> 5) == 0x6) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 >> 4) == 0xE) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 >> 3) == 0x1E) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      len = 0;
    }
    bool ok = len > 0 && i + len <= text.size();
    for (size_t k = 1; ok && k < len; ++k) {
      auto b = static_cast<unsigned char>(text[i + k]);
      if ((b >> 6) != 0x2) {
        ok = false;
      } else {
        cp = (cp << 6) | (b & 0x3F);
      }
    }
    if (!ok) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string EncodeUtf8(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t cp : text) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }
  return out;
}

std::u32string FoldCharacters(std::u32string_view text) {
  const auto& latin = LatinFoldTable();
  std::u32string out;
  out.reserve(text.size());
  for (char32_t c : text) {
    if (IsCombiningMark(c)) continue;
    if (c >= U'A' && c <= U'Z') {
      out.push_back(c + 32);
    } else if (auto it = latin.find(c); it != latin.end()) {
      out += it->second;
    } else if (c >= 0x0391 && c <= 0x03A9 && c != 0x03A2) {
      out.push_back(c + 32);  // Greek capitals
    } else if (c >= 0x0410 && c <= 0x042F) {
      out.push_back(c + 32);  // Cyrillic capitals
    } else if (c >= 0x0400 && c <= 0x040F) {
      out.push_back(c + 80);
    } else {
      out.push_back(c);
    }
  }
  return out;
}

std::string NormalizeField(std::string_view raw, const FeatureSpec& spec) {
  std::u32string folded = FoldCharacters(DecodeUtf8(raw));
  folded.resize(spec.length, U' ');
  return EncodeUtf8(folded);
}

std::vector<std::string> Ngrams(std::string_view field, size_t n) {
  std::u32string chars = DecodeUtf8(field);
  std::vector<std::string> grams;
  if (n == 0 || n > chars.size()) return grams;
  grams.reserve(chars.size() - n + 1);
  for (size_t l = 0; l + n <= chars.size(); ++l) {
    grams.push_back(EncodeUtf8(std::u32string_view(chars).substr(l, n)));
  }
  return grams;
}

TokenizedIdentifier TokenizeRecord(std::span<const std::string> fields,
                                   const MatchConfig& cfg) {
  PSU_ENFORCE(fields.size() == cfg.d_match(), ErrorCode::kArityMismatch,
              "got " + std::to_string(fields.size()) + " fields, expected " +
                  std::to_string(cfg.d_match()));
  TokenizedIdentifier out;
  out.features.reserve(fields.size());
  for (size_t r = 0; r < fields.size(); ++r) {
    const auto& spec = cfg.features[r];
    out.features.push_back(Ngrams(NormalizeField(fields[r], spec), spec.ngram));
  }
  return out;
}

}  // namespace psu
