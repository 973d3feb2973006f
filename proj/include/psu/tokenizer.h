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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace psu {

// Exact rational, so that ceil(lambda * g) is computed without floating-point
// drift (0.7 * 10 must be 7, not 8).
struct Rational {
  int64_t num = 1;
  int64_t den = 1;

  // Accepts "0.7", "7/10" or "1".
  static Rational Parse(std::string_view text);
  // Rounds to the nearest multiple of 1e-9 before reducing.
  static Rational FromDouble(double value);

  // ceil(num * count / den).
  size_t CeilTimes(size_t count) const;
  double ToDouble() const { return static_cast<double>(num) / den; }
  std::string ToString() const;

  friend bool operator==(const Rational&, const Rational&) = default;
};

struct FeatureSpec {
  std::string name;
  size_t length = 1;  // L: canonical length in characters.
  size_t ngram = 1;   // n: gram length in characters.

  // Raises length to ngram when ngram > length.
  static FeatureSpec Make(std::string name, size_t length, size_t ngram);

  size_t gram_count() const { return length - ngram + 1; }
};

struct MatchConfig {
  std::vector<FeatureSpec> features;
  Rational lambda{1, 1};
  bool ordered_mode = true;

  // Throws InvalidConfig unless 0 < lambda <= 1, features is non-empty and
  // every feature has 1 <= n <= L.
  void Validate() const;

  size_t d_match() const { return features.size(); }
  // ceil(lambda * (L_r - n_r + 1)).
  size_t Threshold(size_t feature) const {
    return lambda.CeilTimes(features[feature].gram_count());
  }
};

// Per feature, the ordered n-grams of the normalized field.
struct TokenizedIdentifier {
  std::vector<std::vector<std::string>> features;

  friend bool operator==(const TokenizedIdentifier&,
                         const TokenizedIdentifier&) = default;
};

std::u32string DecodeUtf8(std::string_view text);
std::string EncodeUtf8(std::u32string_view text);

// Lower-case fold plus accent stripping from a fixed table covering Latin-1,
// Latin Extended-A, basic Greek and Cyrillic; combining marks
// (U+0300..U+036F) are dropped.
std::u32string FoldCharacters(std::u32string_view text);

// Fold, then right-pad with spaces or cut the tail to exactly L characters.
std::string NormalizeField(std::string_view raw, const FeatureSpec& spec);

// Sliding window of n characters over a normalized field.
std::vector<std::string> Ngrams(std::string_view field, size_t n);

TokenizedIdentifier TokenizeRecord(std::span<const std::string> fields,
                                   const MatchConfig& cfg);

}  // namespace psu
