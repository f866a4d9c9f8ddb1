// Copyright 2026 the helix-mdc authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace helixmdc {

enum class ErrorCode {
  kInvalidArgument,
  kIoError,
  kCorruptData,
  kUndecodable,
  kUnrecoverableBlock,
  kInternal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void throw_invalid(const std::string& what) {
  throw Error(ErrorCode::kInvalidArgument, what);
}
[[noreturn]] inline void throw_io(const std::string& what) {
  throw Error(ErrorCode::kIoError, what);
}
[[noreturn]] inline void throw_corrupt(const std::string& what) {
  throw Error(ErrorCode::kCorruptData, what);
}

}  // namespace helixmdc
