// Copyright 2026 The EMMA-Sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace emma {

/// Classification of every failure the library can raise. The C API maps
/// each kind onto a stable error code.
enum class ErrorKind {
  kArgument,
  kConformance,
  kDomain,
  kLookup,
  kNumericDomain,
  kProtocol,
  kParse,
  kValidation,
  kIo,
  kEmptyOutput,
  kCorpusFailure,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace emma
