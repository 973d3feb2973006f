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

#include "psu/error.h"

namespace psu {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotPrime: return "NotPrime";
    case ErrorCode::kNotSafePrime: return "NotSafePrime";
    case ErrorCode::kTooSmall: return "TooSmall";
    case ErrorCode::kUnknownPreset: return "UnknownPreset";
    case ErrorCode::kRngFailure: return "RngFailure";
    case ErrorCode::kArityMismatch: return "ArityMismatch";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kConfigMismatch: return "ConfigMismatch";
    case ErrorCode::kPhaseViolation: return "PhaseViolation";
    case ErrorCode::kTransportFailure: return "TransportFailure";
    case ErrorCode::kNoMatchInUnion: return "NoMatchInUnion";
    case ErrorCode::kPeerUnreachable: return "PeerUnreachable";
    case ErrorCode::kFramingError: return "FramingError";
    case ErrorCode::kConfigDigestMismatch: return "ConfigDigestMismatch";
    case ErrorCode::kTimeout: return "Timeout";
    case ErrorCode::kProtocolAbort: return "ProtocolAbort";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kDatasetError: return "DatasetError";
    case ErrorCode::kMissingOutput: return "MissingOutput";
  }
  return "Unknown";
}

}  // namespace psu
