// Copyright 2026 The tcamtree Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>

#include "tcamtree/prefixdb.hpp"
#include "tcamtree/rational.hpp"
#include "tcamtree/tiler.hpp"
#include "tcamtree/trie.hpp"

namespace tcamtree {

// ceil(N/D) * D * W: every entry needs at least one W-bit row.
std::int64_t lower_bound_bits(std::int64_t n, const GrainSpec& grain);

struct Baseline {
  std::int64_t blocks = 0;
  std::int64_t bits = 0;
};

// One logical TCAM holding every entry at `width_needed` bits.
Baseline single_tcam_baseline(std::int64_t n, int width_needed, const GrainSpec& grain);

// ceil(M / W).
std::int64_t max_savings_factor(std::int64_t m, std::int64_t w);

// baseline_bits / plan_bits <= factor, compared without division.
bool savings_within(std::int64_t baseline_bits, std::int64_t plan_bits, std::int64_t factor);

struct TilingCondition {
  int level = 0;
  Rational b_percent{0};
  int lhs = 0;  // M - level + ceil(log2 D)
  bool feasible = false;
  Rational epsilon_bound{0};  // 2b / 100
};

// Splitting at `level` keeps every child within one block row when
// lhs < W. Without `b_percent` the measured b of the level is used.
// Throws kLevelOutOfRange.
TilingCondition tiling_condition(int m, const LeanLevelTable& lean, const GrainSpec& grain, int level,
                                 std::optional<Rational> b_percent = std::nullopt);

struct BoundsReport {
  std::int64_t n = 0;
  int m = 0;           // threshold length
  int max_length = 0;  // longest prefix
  GrainSpec grain;
  int baseline_width = 0;
  std::int64_t lower_bound_bits = 0;
  std::int64_t baseline_blocks = 0;
  std::int64_t baseline_bits = 0;
  std::int64_t max_savings_factor_baseline = 0;  // ceil(baseline_width / W)
  std::int64_t max_savings_factor_m = 0;         // ceil(M / W)
  std::optional<TilingCondition> tiling;
};

// `tiling_level` selects the split checked against the tiling condition.
BoundsReport compute_bounds(const PrefixDatabase& db, const GrainSpec& grain, int baseline_width,
                            const Rational& coverage, std::optional<int> tiling_level = std::nullopt);

}  // namespace tcamtree
