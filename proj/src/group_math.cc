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

#include "psu/group_math.h"


#include "psu/error.h"

namespace psu {
namespace {

constexpr int kPrimalityRounds = 64;

struct Preset {
  const char* name;
  const char* hex;
};

// Every entry passes MakeGroupParams(mpz) validation; see group_math_test.
constexpr Preset kPresets[] = {
    {"toy-7", "7"},
    {"toy-23", "17"},
    {"toy-1019", "3FB"},
    {"test-512",
     "D4C47690996F5F0631D4258EEB02A438C44B0C65364841F63173538C199EF979"
     "CD98D3E5C9B3852F4B082E24534BA6FCFECC05842B52981174CED2533712837B"},
    {"test-1024",
     "EE7ED7A78B08436CF3700A70671B72605C6AF3CFDB9F1ECBD88024882C6829D0"
     "C44D88E008B6E939AD1696E1364F85521D4D96B7EE3966EF8ECDEE42C64105B4"
     "C2F17CEDDB33D5579CF7169CB1D1792C7DAD91269C3775A11FB5D705AC2672E2"
     "124F9294120CDA82DA7741B63B34F2D09E02F58EB1BB84852EFCA29E511B3EB3"},
    {"modp-2048",
     "FFFFFFFFFFFFFFFFC90FDAA22168C234C4C6628B80DC1CD129024E088A67CC74"
     "020BBEA63B139B22514A08798E3404DDEF9519B3CD3A431B302B0A6DF25F1437"
     "4FE1356D6D51C245E485B576625E7EC6F44C42E9A637ED6B0BFF5CB6F406B7ED"
     "EE386BFB5A899FA5AE9F24117C4B1FE649286651ECE45B3DC2007CB8A163BF05"
     "98DA48361C55D39A69163FA8FD24CF5F83655D23DCA3AD961C62F356208552BB"
     "9ED529077096966D670C354E4ABC9804F1746C08CA18217C32905E462E36CE3B"
     "E39E772C180E86039B2783A2EC07A28FB5C55DF06F4C52C9DE2BCBF695581718"
     "3995497CEA956AE515D2261898FA051015728E5A8AACAA68FFFFFFFFFFFFFFFF"},
};

}  // namespace

GroupParams MakeGroupParams(const mpz_class& p) {
  if (p < 7) {
    throw Error(ErrorCode::kTooSmall, "p=" + p.get_str() + " is below 7");
  }
  if (mpz_probab_prime_p(p.get_mpz_t(), kPrimalityRounds) == 0) {
    throw Error(ErrorCode::kNotPrime, "p=" + p.get_str() + " is composite");
  }
  mpz_class q = (p - 1) / 2;
  if (mpz_probab_prime_p(q.get_mpz_t(), kPrimalityRounds) == 0) {
    throw Error(ErrorCode::kNotSafePrime,
                "(p-1)/2=" + q.get_str() + " is composite");
  }
  GroupParams g;
  g.p_ = p;
  g.q_ = std::move(q);
  g.bit_length_ = mpz_sizeinbase(p.get_mpz_t(), 2);
  return g;
}

GroupParams MakeGroupParams(std::string_view preset) {
  for (const auto& entry : kPresets) {
    if (preset == entry.name) {
      // Presets are pre-validated constants; the 2 x 64 primality rounds are
      // skipped so that loading the 2048-bit group stays cheap.
      GroupParams g;
      g.p_ = mpz_class(entry.hex, 16);
      g.q_ = (g.p_ - 1) / 2;
      g.bit_length_ = mpz_sizeinbase(g.p_.get_mpz_t(), 2);
      g.name_ = entry.name;
      return g;
    }
  }
  throw Error(ErrorCode::kUnknownPreset,
              "no group preset named '" + std::string(preset) + "'");
}

std::vector<std::string> GroupPresetNames() {
  std::vector<std::string> names;
  for (const auto& entry : kPresets) names.emplace_back(entry.name);
  return names;
}

bool IsQuadraticResidue(const mpz_class& v, const GroupParams& g) {
  if (v < 1 || v >= g.p()) return false;
  mpz_class r;
  mpz_powm(r.get_mpz_t(), v.get_mpz_t(), g.q().get_mpz_t(),
           g.p().get_mpz_t());
  return r == 1;
}

GroupElement GroupElement::FromInteger(const mpz_class& v,
                                       const GroupParams& g) {
  PSU_ENFORCE(IsQuadraticResidue(v, g), ErrorCode::kShapeMismatch,
              v.get_str() + " is not a quadratic residue mod p");
  return GroupElement(v);
}

GroupElement GroupElement::FromBytes(std::span<const uint8_t> bytes,
                                     const GroupParams& g) {
  PSU_ENFORCE(bytes.size() == g.element_bytes(), ErrorCode::kFramingError,
              "group element must be " + std::to_string(g.element_bytes()) +
                  " bytes");
  mpz_class v = BytesToInteger(bytes);
  PSU_ENFORCE(v >= 1 && v < g.p(), ErrorCode::kFramingError,
              "group element out of range");
  return GroupElement(std::move(v));
}

void GroupElement::AppendBytes(const GroupParams& g,
                               std::vector<uint8_t>& out) const {
  size_t width = g.element_bytes();
  size_t start = out.size();
  out.resize(start + width, 0);
  size_t count = 0;
  size_t needed = (mpz_sizeinbase(value_.get_mpz_t(), 2) + 7) / 8;
  // Leading zero bytes stay in place; mpz_export writes the significant tail.
  mpz_export(out.data() + start + (width - needed), &count, 1, 1, 1, 0,
             value_.get_mpz_t());
}

std::vector<uint8_t> GroupElement::ToBytes(const GroupParams& g) const {
  std::vector<uint8_t> out;
  AppendBytes(g, out);
  return out;
}

SecretExponent SecretExponent::FromInteger(const mpz_class& s,
                                           const GroupParams& g) {
  PSU_ENFORCE(s >= 1 && s < g.q(), ErrorCode::kInvalidConfig,
              "exponent must lie in [1, q-1]");
  return SecretExponent(s);
}

SecretExponent SecretExponent::Product(std::span<const SecretExponent> factors,
                                       const GroupParams& g) {
  mpz_class acc = 1;
  for (const auto& f : factors) {
    acc = (acc * f.value_) % g.q();
  }
  return SecretExponent(acc);
}

GroupElement ModExp(const GroupElement& x, const SecretExponent& s,
                    const GroupParams& g) {
  mpz_class r;
  mpz_powm_sec(r.get_mpz_t(), x.value_.get_mpz_t(), s.value().get_mpz_t(),
               g.p().get_mpz_t());
  return GroupElement(std::move(r));
}

SecretExponent SampleExponent(const GroupParams& g, Rng& rng) {
  PSU_ENFORCE(g.q() >= 3, ErrorCode::kTooSmall, "q must be at least 3");
  // Uniform v in [0, q-2] by masked rejection, then shift to [1, q-1].
  mpz_class range = g.q() - 1;
  size_t bits = mpz_sizeinbase(mpz_class(range - 1).get_mpz_t(), 2);
  size_t nbytes = (bits + 7) / 8;
  std::vector<uint8_t> buf(nbytes);
  uint8_t top_mask = static_cast<uint8_t>(0xFF >> (nbytes * 8 - bits));
  for (int attempt = 0; attempt < 1024; ++attempt) {
    rng.Fill(buf);
    buf[0] &= top_mask;
    mpz_class v = BytesToInteger(buf);
    if (v < range) return SecretExponent(v + 1);
  }
  throw Error(ErrorCode::kRngFailure, "exponent rejection sampling stalled");
}

GroupElement ProjectToQr(const mpz_class& t, const GroupParams& g) {
  mpz_class base = t % (g.p() - 1) + 1;
  mpz_class r;
  mpz_powm_ui(r.get_mpz_t(), base.get_mpz_t(), 2, g.p().get_mpz_t());
  return GroupElement(std::move(r));
}

mpz_class BytesToInteger(std::span<const uint8_t> bytes) {
  mpz_class v;
  if (!bytes.empty()) {
    mpz_import(v.get_mpz_t(), bytes.size(), 1, 1, 1, 0, bytes.data());
  }
  return v;
}

}  // namespace psu
