// Copyright 2026 The tcamtree Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tcamtree/bounds.hpp"
#include "tcamtree/packing.hpp"
#include "tcamtree/pipeline.hpp"
#include "tcamtree/prefixdb.hpp"
#include "tcamtree/rational.hpp"
#include "tcamtree/tiler.hpp"

namespace tcamtree {

struct PlanConfig {
  int address_width = 32;
  StrideList strides;
  GrainSpec grain;
  int tag_bits = -1;  // -1: ceil(log2 D)
  bool hybridize = false;
  Rational factor{3};
  SramPageSpec sram_page;
  std::optional<PipelineProfile> profile;  // nullopt: synthetic default
  bool skip_pipeline = false;
  Rational coverage{99, 100};
  std::optional<int> baseline_width;  // nullopt: address width
  std::size_t overflow_capacity = 512;
  std::uint64_t seed = 1;

  void validate() const;
  int effective_tag_bits() const { return tag_bits >= 0 ? tag_bits : grain.default_tag_bits(); }
  int effective_baseline_width() const { return baseline_width.value_or(address_width); }
  StateConfig state_config() const;
};

// Lean-level CSV for levels 1..max_level. Throws kEmptyDatabase.
std::string cmd_analyze(const PrefixDatabase& db, int max_level);

struct PlanResult {
  LookupState state;
  ResourceReport resources;
  BoundsReport bounds;
};

PlanResult run_plan(const PrefixDatabase& db, const PlanConfig& cfg);
nlohmann::json plan_report(const PrefixDatabase& db, const PlanConfig& cfg, const PlanResult& result);
// Canonical report text: sorted keys, two-space indent, trailing newline.
std::string cmd_plan(const PrefixDatabase& db, const PlanConfig& cfg);

enum class VerifyMode { kAuto, kExhaustive, kSampled };

struct VerifyOptions {
  VerifyMode mode = VerifyMode::kAuto;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  std::optional<std::string> trace_path;  // replaces generated addresses
  std::size_t report_limit = 10;
  bool inject_fault = false;
};

struct Mismatch {
  Address address = 0;
  std::string got;
  std::string expected;
};

struct VerifyResult {
  bool exhaustive = false;
  std::uint64_t checked = 0;
  std::uint64_t mismatch_count = 0;
  std::vector<Mismatch> mismatches;  // first report_limit
  bool passed() const { return mismatch_count == 0; }
};

// Sampled address set: `samples` draws from mt19937_64(seed) followed by
// every prefix padded with zeros and with ones.
std::vector<Address> sample_addresses(const PrefixDatabase& db, std::uint64_t samples, std::uint64_t seed);

VerifyResult verify_state(const PrefixDatabase& db, const LookupState& state, const VerifyOptions& options);
VerifyResult cmd_verify(const PrefixDatabase& db, const PlanConfig& cfg, const VerifyOptions& options);
std::string format_verify(const VerifyResult& result, int address_width);

enum class DepthRule {
  kConstantArea,  // D = floor(W0 * D0 / w)
  kFixed,
};

struct SweepConfig {
  std::vector<int> widths;
  DepthRule depth_rule = DepthRule::kConstantArea;
  GrainSpec reference;  // W0 x D0 for the constant-area rule
  int fixed_depth = 512;
};

struct SweepRow {
  GrainSpec grain;
  std::int64_t single_blocks = 0;
  std::int64_t single_bits = 0;
  std::int64_t tree_blocks = 0;
  std::int64_t tree_bits = 0;
  std::int64_t mashup_bits = 0;  // min(tree, single)
  Rational improvement{1};       // single / mashup
};

std::vector<SweepRow> sweep_grain(const PrefixDatabase& db, const PlanConfig& cfg, const SweepConfig& sweep);
std::string cmd_sweep_grain(const PrefixDatabase& db, const PlanConfig& cfg, const SweepConfig& sweep);

// Ranked stride candidates as CSV `strides,overhead`, at most `limit` rows.
std::string cmd_strides(const PrefixDatabase& db, const StrideSearchConfig& cfg, std::size_t limit);

}  // namespace tcamtree
