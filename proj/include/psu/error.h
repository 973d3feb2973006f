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

#include <stdexcept>
#include <string>
#include <string_view>

namespace psu {

enum class ErrorCode {
  kNotPrime,
  kNotSafePrime,
  kTooSmall,
  kUnknownPreset,
  kRngFailure,
  kArityMismatch,
  kInvalidConfig,
  kShapeMismatch,
  kConfigMismatch,
  kPhaseViolation,
  kTransportFailure,
  kNoMatchInUnion,
  kPeerUnreachable,
  kFramingError,
  kConfigDigestMismatch,
  kTimeout,
  kProtocolAbort,
  kConfigError,
  kDatasetError,
  kMissingOutput,
};

std::string_view ErrorCodeName(ErrorCode code);

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

#define PSU_ENFORCE(cond, code, msg)        \
  do {                                      \
    if (!(cond)) {                          \
      throw ::psu::Error((code), (msg));    \
    }                                       \
  } while (false)

}  // namespace psu
