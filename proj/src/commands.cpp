// Copyright 2026 The tcamtree Authors
// SPDX-License-Identifier: Apache-2.0

#include "tcamtree/commands.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include "tcamtree/error.hpp"
#include "tcamtree/trie.hpp"

namespace tcamtree {

using nlohmann::json;

void PlanConfig::validate() const {
  grain.validate();
  sram_page.validate();
  if (address_width < 1 || address_width > kMaxAddressWidth) {
    throw Error(Errc::kInvalidArgument, "address width must be in 1..64");
  }
  if (strides.height() < 1) throw Error(Errc::kInvalidArgument, "a stride list is required");
  if (strides.coverage() > address_width) {
    throw Error(Errc::kInvalidArgument, "strides " + strides.to_string() + " cover more than " +
                                            std::to_string(address_width) + " bits");
  }
  if (tag_bits > 62) throw Error(Errc::kInvalidArgument, "tag bits must be at most 62");
  if (factor < 1) throw Error(Errc::kInvalidArgument, "conversion factor must be >= 1");
  if (coverage <= 0 || coverage > 1) throw Error(Errc::kInvalidArgument, "coverage must be in (0, 1]");
  if (baseline_width && *baseline_width < 1) throw Error(Errc::kInvalidArgument, "baseline width must be >= 1");
  if (profile) profile->validate();
}

StateConfig PlanConfig::state_config() const {
  StateConfig s;
  s.grain = grain;
  s.tag_bits = effective_tag_bits();
  if (hybridize) {
    HybridizationConfig h;
    h.factor = factor;
    h.sram = sram_page;
    h.tag_bits = effective_tag_bits();
    s.hybrid = h;
  }
  s.profile = profile.value_or(PipelineProfile::synthetic_default());
  s.map_pipeline = !skip_pipeline;
  s.overflow_capacity = overflow_capacity;
  return s;
}

std::string cmd_analyze(const PrefixDatabase& db, int max_level) {
  if (db.empty()) throw Error(Errc::kEmptyDatabase, "nothing to analyze");
  if (max_level < 1 || max_level > db.address_width()) {
    throw Error(Errc::kLevelOutOfRange, "max level must be in 1.." + std::to_string(db.address_width()));
  }
  UnibitTrie trie(db);
  return compute_lean_levels(trie, static_cast<std::int64_t>(db.size())).to_csv(1, max_level);
}

PlanResult run_plan(const PrefixDatabase& db, const PlanConfig& cfg) {
  cfg.validate();
  if (db.address_width() != cfg.address_width) {
    throw Error(Errc::kInvalidArgument, "database width " + std::to_string(db.address_width()) +
                                            " differs from configured width " + std::to_string(cfg.address_width));
  }
  if (db.empty()) throw Error(Errc::kEmptyDatabase, "nothing to plan");
  LookupState state = LookupState::build(db, cfg.strides, cfg.state_config());
  std::optional<int> split;
  if (cfg.strides.height() >= 2) split = cfg.strides.offset(1);
  BoundsReport bounds = compute_bounds(db, cfg.grain, cfg.effective_baseline_width(), cfg.coverage, split);
  ResourceReport resources = resource_totals(state.super_tables(), pre_tag_blocks(state.tree(), cfg.grain),
                                             state.sram_entries(), cfg.grain, cfg.sram_page, bounds.baseline_blocks);
  return PlanResult{std::move(state), resources, bounds};
}

namespace {

json spans_json(const Placement& p) {
  json out = json::array();
  for (const auto& s : p.spans) out.push_back({{"stage", s.stage}, {"first", s.first}, {"count", s.count}});
  return out;
}

json tree_json(const LookupState& state, const PlanConfig& cfg) {
  const TcamTree& tree = state.tree();
  json levels = json::array();
  for (int level = 0; level < tree.height(); ++level) {
    std::int64_t tcam_tables = 0, sram_tables = 0, tcam_entries = 0, pre_tag = 0, post_tag = 0, supers = 0;
    std::uint64_t sram_entries = 0;
    for (TableId id : tree.level_tables(level)) {
      const TreeTable& t = tree.table(id);
      if (t.kind() == TableKind::kSram) {
        ++sram_tables;
        sram_entries += t.sram_size();
      } else {
        ++tcam_tables;
        tcam_entries += static_cast<std::int64_t>(t.size());
        pre_tag += blocks_for_table(t.stride_width(), static_cast<std::int64_t>(t.size()), cfg.grain);
      }
    }
    for (const auto& st : state.super_tables()) {
      if (st.level != level) continue;
      ++supers;
      post_tag += st.block_count;
    }
    levels.push_back({{"level", level},
                      {"stride", tree.strides().stride(level)},
                      {"tcam_tables", tcam_tables},
                      {"sram_tables", sram_tables},
                      {"tcam_entries", tcam_entries},
                      {"sram_entries", sram_entries},
                      {"stubs", tree.stub_count_at_level(level)},
                      {"super_tables", supers},
                      {"blocks_pre_tag", pre_tag},
                      {"blocks_post_tag", post_tag}});
  }
  return {{"height", tree.height()},
          {"tables", tree.table_count()},
          {"terminals", tree.terminal_count()},
          {"stubs", tree.stub_count()},
          {"merged", tree.merged_count()},
          {"total_entries", tree.total_entries()},
          {"levels", levels}};
}

json pipeline_json(const LookupState& state) {
  const PipelinePlan& plan = state.plan();
  json supers = json::array();
  for (std::size_t i = 0; i < state.super_tables().size(); ++i) {
    const SuperTable& st = state.super_tables()[i];
    supers.push_back({{"level", st.level},
                      {"tag_bits", st.tag_bits},
                      {"members", st.members.size()},
                      {"entries", st.total_entries},
                      {"effective_width", st.effective_width},
                      {"blocks", st.block_count},
                      {"spans", spans_json(plan.tcam[i])}});
  }
  json pools = json::array();
  for (std::size_t i = 0; i < state.pools().size(); ++i) {
    const SramPool& pool = state.pools()[i];
    pools.push_back({{"level", pool.level}, {"entries", pool.entries}, {"pages", pool.pages}, {"spans", spans_json(plan.sram[i])}});
  }
  json levels = json::array();
  for (std::size_t l = 0; l < plan.levels.size(); ++l) {
    levels.push_back({{"level", l}, {"first_stage", plan.levels[l].first}, {"last_stage", plan.levels[l].last}});
  }
  return {{"profile",
           {{"label", plan.profile.label},
            {"stage_count", plan.profile.stage_count},
            {"tcam_blocks_per_stage", plan.profile.tcam_blocks_per_stage},
            {"sram_pages_per_stage", plan.profile.sram_pages_per_stage}}},
          {"stages_used", plan.stages_used()},
          {"levels", levels},
          {"super_tables", supers},
          {"sram_pools", pools},
          {"dependency_edges", plan.edges.size()},
          {"dependencies_respected", dependencies_respected(plan)}};
}

}  // namespace

json plan_report(const PrefixDatabase& db, const PlanConfig& cfg, const PlanResult& result) {
  const ResourceReport& r = result.resources;
  const BoundsReport& b = result.bounds;
  json config = {{"address_width", cfg.address_width},
                 {"strides", cfg.strides.to_string()},
                 {"grain", cfg.grain.to_string()},
                 {"tag_bits", cfg.effective_tag_bits()},
                 {"hybridize", cfg.hybridize},
                 {"factor", format_exact(cfg.factor)},
                 {"sram_page", cfg.sram_page.to_string()},
                 {"coverage", format_exact(cfg.coverage)},
                 {"baseline_width", cfg.effective_baseline_width()},
                 {"overflow_capacity", cfg.overflow_capacity},
                 {"skip_pipeline", cfg.skip_pipeline}};
  json resources = {{"tcam_blocks_pre_tag", r.tcam_blocks_pre_tag},
                    {"tcam_blocks_post_tag", r.tcam_blocks_post_tag},
                    {"tcam_bits", r.tcam_bits},
                    {"sram_entries", r.sram_entries},
                    {"sram_pages", r.sram_pages},
                    {"baseline_blocks", r.baseline_blocks},
                    {"improvement", r.improvement_text()},
                    {"improvement_exact", r.improvement ? format_exact(*r.improvement) : std::string("inf")}};
  json bounds = {{"n", b.n},
                 {"threshold_length", b.m},
                 {"max_length", b.max_length},
                 {"grain_width", b.grain.width},
                 {"grain_depth", b.grain.depth},
                 {"baseline_width", b.baseline_width},
                 {"lower_bound_bits", b.lower_bound_bits},
                 {"baseline_blocks", b.baseline_blocks},
                 {"baseline_bits", b.baseline_bits},
                 {"max_savings_factor_baseline", b.max_savings_factor_baseline},
                 {"max_savings_factor_threshold", b.max_savings_factor_m},
                 {"post_tag_bits_at_least_lower_bound", r.tcam_bits >= b.lower_bound_bits},
                 {"savings_within_factor", savings_within(b.baseline_bits, r.tcam_bits, b.max_savings_factor_baseline)}};
  if (b.tiling) {
    bounds["tiling_condition"] = {{"level", b.tiling->level},
                                  {"b_percent", format_fixed(b.tiling->b_percent, 4)},
                                  {"lhs", b.tiling->lhs},
                                  {"feasible", b.tiling->feasible},
                                  {"epsilon_bound", format_fixed(b.tiling->epsilon_bound, 6)}};
  }
  const OverflowBuffer& overflow = result.state.overflow();
  return {{"config", config},
          {"database", {{"n", db.size()}, {"max_length", db.max_length()}, {"threshold_length", b.m}}},
          {"tree", tree_json(result.state, cfg)},
          {"resources", resources},
          {"bounds", bounds},
          {"pipeline", pipeline_json(result.state)},
          {"overflow", {{"capacity", overflow.capacity}, {"entries", overflow.entries.size()}}}};
}

std::string cmd_plan(const PrefixDatabase& db, const PlanConfig& cfg) {
  PlanResult result = run_plan(db, cfg);
  return plan_report(db, cfg, result).dump(2) + "\n";
}

namespace {

Address pad(std::uint64_t bits, int length, int width, bool ones) {
  if (length == 0) return ones ? low_mask(width) : 0;
  const int rest = width - length;
  return (bits << rest) | (ones ? low_mask(rest) : 0);
}

std::vector<Address> read_trace(const std::string& path, int width) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kInvalidArgument, "cannot open trace " + path);
  std::vector<Address> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    auto last = line.find_last_not_of(" \t");
    out.push_back(parse_address(std::string_view(line).substr(first, last - first + 1), width));
  }
  return out;
}

}  // namespace

std::vector<Address> sample_addresses(const PrefixDatabase& db, std::uint64_t samples, std::uint64_t seed) {
  const int width = db.address_width();
  std::mt19937_64 rng(seed);
  std::vector<Address> out;
  out.reserve(samples + 2 * db.size());
  for (std::uint64_t i = 0; i < samples; ++i) out.push_back(rng() & low_mask(width));
  for (const Prefix& p : db.entries()) {
    out.push_back(pad(p.bits, p.length, width, false));
    out.push_back(pad(p.bits, p.length, width, true));
  }
  return out;
}

VerifyResult verify_state(const PrefixDatabase& db, const LookupState& state, const VerifyOptions& options) {
  const int width = db.address_width();
  VerifyResult result;
  LpmIndex oracle(db);
  auto check = [&](Address a) {
    ++result.checked;
    std::string got = state.search(a);
    std::string expected = oracle.lookup(a);
    if (got == expected) return;
    ++result.mismatch_count;
    if (result.mismatches.size() < options.report_limit) result.mismatches.push_back({a, got, expected});
  };
  if (options.trace_path) {
    for (Address a : read_trace(*options.trace_path, width)) check(a);
    return result;
  }
  bool exhaustive = options.mode == VerifyMode::kExhaustive || (options.mode == VerifyMode::kAuto && width <= 16);
  if (exhaustive) {
    if (width > 24) throw Error(Errc::kInvalidArgument, "exhaustive verification is limited to 24-bit addresses");
    result.exhaustive = true;
    for (Address a = 0; a <= low_mask(width); ++a) check(a);
    return result;
  }
  for (Address a : sample_addresses(db, options.samples, options.seed)) check(a);
  return result;
}

VerifyResult cmd_verify(const PrefixDatabase& db, const PlanConfig& cfg, const VerifyOptions& options) {
  LookupState state = run_plan(db, cfg).state;
  if (options.inject_fault) state.inject_fault();
  return verify_state(db, state, options);
}

std::string format_verify(const VerifyResult& result, int address_width) {
  std::ostringstream out;
  out << (result.passed() ? "PASS " : "FAIL ") << (result.checked - result.mismatch_count) << "/" << result.checked
      << (result.exhaustive ? " addresses (exhaustive)\n" : " addresses (sampled)\n");
  for (const auto& m : result.mismatches) {
    out << format_address(m.address, address_width) << " got=" << m.got << " expected=" << m.expected << "\n";
  }
  return out.str();
}

std::vector<SweepRow> sweep_grain(const PrefixDatabase& db, const PlanConfig& cfg, const SweepConfig& sweep) {
  if (db.empty()) throw Error(Errc::kEmptyDatabase, "nothing to sweep");
  sweep.reference.validate();
  TcamTree tree = build_tree(db, cfg.strides);
  const auto n = static_cast<std::int64_t>(db.size());
  std::vector<SweepRow> rows;
  for (int w : sweep.widths) {
    if (w < 1) throw Error(Errc::kInvalidArgument, "grain widths must be >= 1");
    SweepRow row;
    row.grain.width = w;
    row.grain.depth = sweep.depth_rule == DepthRule::kFixed
                          ? sweep.fixed_depth
                          : static_cast<int>(std::max<std::int64_t>(1, sweep.reference.bits_per_block() / w));
    row.grain.validate();
    Baseline base = single_tcam_baseline(n, cfg.effective_baseline_width(), row.grain);
    row.single_blocks = base.blocks;
    row.single_bits = base.bits;
    const int tag = cfg.tag_bits >= 0 ? cfg.tag_bits : row.grain.default_tag_bits();
    for (const auto& st : tag_and_pack(tree, PackingConfig{row.grain, tag, true, std::nullopt})) {
      row.tree_blocks += st.block_count;
    }
    row.tree_bits = row.tree_blocks * row.grain.bits_per_block();
    row.mashup_bits = std::min(row.tree_bits, row.single_bits);
    row.improvement = row.mashup_bits > 0 ? Rational(row.single_bits, row.mashup_bits) : Rational(1);
    rows.push_back(row);
  }
  return rows;
}

std::string cmd_sweep_grain(const PrefixDatabase& db, const PlanConfig& cfg, const SweepConfig& sweep) {
  std::ostringstream out;
  out << "grain_width,grain_depth,single_tcam_blocks,single_tcam_bits,tree_blocks,tree_bits,mashup_bits,improvement\n";
  for (const auto& r : sweep_grain(db, cfg, sweep)) {
    out << r.grain.width << ',' << r.grain.depth << ',' << r.single_blocks << ',' << r.single_bits << ','
        << r.tree_blocks << ',' << r.tree_bits << ',' << r.mashup_bits << ',' << format_fixed(r.improvement, 3) << "\n";
  }
  return out.str();
}

std::string cmd_strides(const PrefixDatabase& db, const StrideSearchConfig& cfg, std::size_t limit) {
  std::ostringstream out;
  out << "strides,overhead\n";
  auto candidates = choose_strides(db, cfg);
  for (std::size_t i = 0; i < candidates.size() && i < limit; ++i) {
    out << candidates[i].strides.to_string() << ',' << candidates[i].overhead << "\n";
  }
  return out.str();
}

}  // namespace tcamtree
