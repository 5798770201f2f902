// Copyright 2026 The EMMA-Sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "emma/error.hpp"

namespace emma {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kArgument: return "argument error";
    case ErrorKind::kConformance: return "conformance error";
    case ErrorKind::kDomain: return "domain error";
    case ErrorKind::kLookup: return "lookup error";
    case ErrorKind::kNumericDomain: return "numeric-domain error";
    case ErrorKind::kProtocol: return "protocol error";
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kValidation: return "validation error";
    case ErrorKind::kIo: return "I/O error";
    case ErrorKind::kEmptyOutput: return "empty-output error";
    case ErrorKind::kCorpusFailure: return "corpus failure";
  }
  return "unknown error";
}

}  // namespace emma
