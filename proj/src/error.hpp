// SPDX-FileCopyrightText: © 2026 The dualmc authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace dualmc {

enum class ErrorCode {
  invalid_argument,
  shape_mismatch,
  parse,
  io,
  numeric,
  unknown_key,
};

/// Library error. Carries a coarse code so the C boundary can map it to a
/// status value; the message is what users see.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) throw Error(code, message);
}

}  // namespace dualmc
