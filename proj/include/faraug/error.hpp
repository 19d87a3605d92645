// faraug/error.hpp

// Copyright 2026  The faraug Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace faraug {

enum class ErrorCode {
  kFileNotFound,
  kMalformedHeader,
  kUnsupportedEncoding,
  kIo,
  kInvalidArgument,
  kTooShort,
  kSampleRateMismatch,
  kZeroPower,
  kShapeMismatch,
  kBackendUnavailable,
  kBackendError,
  kDuplicateId,
  kUnknownId,
  kMissingClass,
  kMissingEmbedding,
  kNoDecaySegments,
  kConfig,
};

inline std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kFileNotFound: return "file_not_found";
    case ErrorCode::kMalformedHeader: return "malformed_header";
    case ErrorCode::kUnsupportedEncoding: return "unsupported_encoding";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kTooShort: return "too_short";
    case ErrorCode::kSampleRateMismatch: return "sample_rate_mismatch";
    case ErrorCode::kZeroPower: return "zero_power";
    case ErrorCode::kShapeMismatch: return "shape_mismatch";
    case ErrorCode::kBackendUnavailable: return "backend_unavailable";
    case ErrorCode::kBackendError: return "backend_error";
    case ErrorCode::kDuplicateId: return "duplicate_id";
    case ErrorCode::kUnknownId: return "unknown_id";
    case ErrorCode::kMissingClass: return "missing_class";
    case ErrorCode::kMissingEmbedding: return "missing_embedding";
    case ErrorCode::kNoDecaySegments: return "no_decay_segments";
    case ErrorCode::kConfig: return "config";
  }
  return "unknown";
}

/// Every failure in the library surfaces as this exception; `code()` says
/// which contract was broken, `what()` carries the detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool cond, ErrorCode code, const std::string& message) {
  if (!cond) fail(code, message);
}

}  // namespace faraug
