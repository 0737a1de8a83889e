// Copyright 2026 The tcamtree Authors
// SPDX-License-Identifier: Apache-2.0

#include "tcamtree/error.hpp"

namespace tcamtree {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::kDuplicatePrefix: return "DuplicatePrefix";
    case Errc::kLengthOutOfRange: return "LengthOutOfRange";
    case Errc::kMalformedLine: return "MalformedLine";
    case Errc::kEmptyDatabase: return "EmptyDatabase";
    case Errc::kTargetTooShort: return "TargetTooShort";
    case Errc::kPrefixExceedsCoverage: return "PrefixExceedsCoverage";
    case Errc::kInvalidArgument: return "InvalidArgument";
    case Errc::kBudgetZero: return "BudgetZero";
    case Errc::kTagOverflow: return "TagOverflow";
    case Errc::kCapacityExceeded: return "CapacityExceeded";
    case Errc::kStageDepthExceeded: return "StageDepthExceeded";
    case Errc::kOverflowFull: return "OverflowFull";
    case Errc::kNotFound: return "NotFound";
    case Errc::kLevelOutOfRange: return "LevelOutOfRange";
  }
  return "Unknown";
}

}  // namespace tcamtree
