// Copyright 2026 The tcamtree Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tcamtree {

enum class Errc {
  kDuplicatePrefix,
  kLengthOutOfRange,
  kMalformedLine,
  kEmptyDatabase,
  kTargetTooShort,
  kPrefixExceedsCoverage,
  kInvalidArgument,
  kBudgetZero,
  kTagOverflow,
  kCapacityExceeded,
  kStageDepthExceeded,
  kOverflowFull,
  kNotFound,
  kLevelOutOfRange,
};

std::string_view errc_name(Errc code);

// All library failures are reported with this exception; `code()` is stable
// and the message carries the context (line numbers, shortfalls, ...).
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace tcamtree
