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

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "psu/random.h"

namespace psu {

// Safe-prime group: p prime, q = (p - 1) / 2 prime. All masking happens in
// the order-q subgroup of quadratic residues mod p.
class GroupParams {
 public:
  const mpz_class& p() const { return p_; }
  const mpz_class& q() const { return q_; }
  size_t bit_length() const { return bit_length_; }
  // Width of the fixed big-endian element encoding.
  size_t element_bytes() const { return (bit_length_ + 7) / 8; }
  // Preset name, or empty when built from an explicit modulus.
  const std::string& name() const { return name_; }

  friend bool operator==(const GroupParams& a, const GroupParams& b) {
    return a.p_ == b.p_;
  }

 private:
  friend GroupParams MakeGroupParams(const mpz_class& p);
  friend GroupParams MakeGroupParams(std::string_view preset);

  mpz_class p_;
  mpz_class q_;
  size_t bit_length_ = 0;
  std::string name_;
};

// Validates an explicit modulus with 64 probabilistic primality rounds on p and
// (p - 1) / 2. Throws TooSmall, NotPrime or NotSafePrime.
GroupParams MakeGroupParams(const mpz_class& p);

// Presets: "toy-7", "toy-23", "toy-1019", "test-512", "test-1024" and
// "modp-2048" (RFC 3526 group 14, the production default).
GroupParams MakeGroupParams(std::string_view preset);

std::vector<std::string> GroupPresetNames();

inline constexpr std::string_view kDefaultGroupPreset = "modp-2048";

class SecretExponent;

// An element of QR(Z_p*). Only the factories below and the group operations
// produce instances, so a GroupElement is always in range.
class GroupElement {
 public:
  GroupElement() : value_(1) {}

  // Checks 1 <= v < p and v^q = 1 (mod p).
  static GroupElement FromInteger(const mpz_class& v, const GroupParams& g);
  // Range check only; used on the wire where a full Euler test per token
  // would double the receive cost.
  static GroupElement FromBytes(std::span<const uint8_t> bytes,
                                const GroupParams& g);

  const mpz_class& value() const { return value_; }

  void AppendBytes(const GroupParams& g, std::vector<uint8_t>& out) const;
  std::vector<uint8_t> ToBytes(const GroupParams& g) const;

  friend bool operator==(const GroupElement& a, const GroupElement& b) {
    return a.value_ == b.value_;
  }
  friend bool operator<(const GroupElement& a, const GroupElement& b) {
    return a.value_ < b.value_;
  }

 private:
  friend GroupElement ModExp(const GroupElement&, const SecretExponent&,
                             const GroupParams&);
  friend GroupElement ProjectToQr(const mpz_class&, const GroupParams&);
  explicit GroupElement(mpz_class v) : value_(std::move(v)) {}

  mpz_class value_;
};

// Secret exponent in [1, q - 1].
class SecretExponent {
 public:
  static SecretExponent FromInteger(const mpz_class& s, const GroupParams& g);

  const mpz_class& value() const { return value_; }

  // (a * b) mod q; never zero because q is prime.
  static SecretExponent Product(std::span<const SecretExponent> factors,
                                const GroupParams& g);

  friend bool operator==(const SecretExponent& a, const SecretExponent& b) {
    return a.value_ == b.value_;
  }

 private:
  friend SecretExponent SampleExponent(const GroupParams&, Rng&);
  explicit SecretExponent(mpz_class s) : value_(std::move(s)) {}
  mpz_class value_;
};

GroupElement ModExp(const GroupElement& x, const SecretExponent& s,
                    const GroupParams& g);

SecretExponent SampleExponent(const GroupParams& g, Rng& rng);

// ((t mod (p - 1)) + 1)^2 mod p.
GroupElement ProjectToQr(const mpz_class& t, const GroupParams& g);

bool IsQuadraticResidue(const mpz_class& v, const GroupParams& g);

mpz_class BytesToInteger(std::span<const uint8_t> bytes);

}  // namespace psu
