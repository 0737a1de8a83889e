// Copyright 2026 The tcamtree Authors
// SPDX-License-Identifier: Apache-2.0

#include "tcamtree/bounds.hpp"

#include <algorithm>
#include <string>

#include "tcamtree/error.hpp"

namespace tcamtree {

std::int64_t lower_bound_bits(std::int64_t n, const GrainSpec& grain) {
  grain.validate();
  if (n < 0) throw Error(Errc::kInvalidArgument, "entry count must be non-negative");
  return ceil_div64(n, grain.depth) * grain.bits_per_block();
}

Baseline single_tcam_baseline(std::int64_t n, int width_needed, const GrainSpec& grain) {
  grain.validate();
  if (n < 0) throw Error(Errc::kInvalidArgument, "entry count must be non-negative");
  if (width_needed < 1) throw Error(Errc::kInvalidArgument, "baseline width must be at least 1");
  Baseline b;
  b.blocks = ceil_div64(n, grain.depth) * ceil_div64(width_needed, grain.width);
  b.bits = b.blocks * grain.bits_per_block();
  return b;
}

std::int64_t max_savings_factor(std::int64_t m, std::int64_t w) {
  if (m < 1 || w < 1) throw Error(Errc::kInvalidArgument, "M and W must be at least 1");
  return ceil_div64(m, w);
}

bool savings_within(std::int64_t baseline_bits, std::int64_t plan_bits, std::int64_t factor) {
  return static_cast<__int128>(baseline_bits) <= static_cast<__int128>(plan_bits) * factor;
}

TilingCondition tiling_condition(int m, const LeanLevelTable& lean, const GrainSpec& grain, int level,
                                 std::optional<Rational> b_percent) {
  grain.validate();
  if (level < 0 || level > lean.max_depth()) {
    throw Error(Errc::kLevelOutOfRange, "level " + std::to_string(level) + " outside 0.." +
                                            std::to_string(lean.max_depth()));
  }
  TilingCondition t;
  t.level = level;
  t.b_percent = b_percent ? *b_percent : lean.level(level).b_percent();
  t.lhs = m - level + grain.default_tag_bits();
  t.feasible = t.lhs < grain.width;
  t.epsilon_bound = 2 * t.b_percent / 100;
  return t;
}

BoundsReport compute_bounds(const PrefixDatabase& db, const GrainSpec& grain, int baseline_width,
                            const Rational& coverage, std::optional<int> tiling_level) {
  BoundsReport r;
  r.n = static_cast<std::int64_t>(db.size());
  r.m = max_threshold_length(db, coverage).length;
  r.max_length = db.max_length();
  r.grain = grain;
  r.baseline_width = baseline_width;
  r.lower_bound_bits = lower_bound_bits(r.n, grain);
  Baseline base = single_tcam_baseline(r.n, baseline_width, grain);
  r.baseline_blocks = base.blocks;
  r.baseline_bits = base.bits;
  r.max_savings_factor_baseline = max_savings_factor(baseline_width, grain.width);
  r.max_savings_factor_m = max_savings_factor(std::max(r.m, 1), grain.width);
  if (tiling_level) {
    UnibitTrie trie(db);
    r.tiling = tiling_condition(r.m, compute_lean_levels(trie, r.n), grain, *tiling_level);
  }
  return r;
}

}  // namespace tcamtree
