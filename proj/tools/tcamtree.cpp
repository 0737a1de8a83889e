// Copyright 2026 The tcamtree Authors
// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tcamtree/commands.hpp"
#include "tcamtree/error.hpp"

namespace {

using namespace tcamtree;

struct Options {
  std::string db;
  int width = 32;
  bool drop_longer = false;
  std::string strides;
  std::string grain = "44x512";
  int tag_bits = -1;
  bool hybridize = false;
  std::string factor = "3";
  std::string sram_page = "128x1024";
  std::string profile;
  bool skip_pipeline = false;
  std::string coverage = "0.99";
  int baseline_width = 0;
  std::size_t overflow_capacity = 512;
  std::uint64_t seed = 1;
  std::string out;
  std::string format;

  int max_level = 0;

  std::string mode = "auto";
  std::uint64_t samples = 100000;
  std::string trace;
  bool inject_fault = false;
  std::size_t limit = 10;

  std::vector<int> widths;
  std::string depth_rule = "constant-area";
  int depth = 512;
  std::string reference_grain = "44x512";

  int height = 2;
  std::int64_t budget = 0;
  int coverage_length = 0;
  std::string final_operand = "last";
};

void add_db_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--db", o.db, "prefix database in canonical text form")->required();
  cmd->add_option("--width", o.width, "address width in bits");
  cmd->add_flag("--drop-longer", o.drop_longer, "skip entries longer than the address width");
  cmd->add_option("--out", o.out, "write output here instead of stdout");
}

void add_plan_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--strides", o.strides, "stride list, e.g. 19-29-16")->required();
  cmd->add_option("--grain", o.grain, "TCAM block WxD");
  cmd->add_option("--tag-bits", o.tag_bits, "super-table tag bits (default ceil(log2 D))");
  cmd->add_flag("--hybridize", o.hybridize, "convert small expansions to SRAM");
  cmd->add_option("--factor", o.factor, "conversion factor C");
  cmd->add_option("--sram-page", o.sram_page, "SRAM page WxD");
  cmd->add_option("--profile", o.profile, "pipeline profile JSON");
  cmd->add_flag("--skip-pipeline", o.skip_pipeline, "place on an unbounded one-stage-per-level profile");
  cmd->add_option("--coverage", o.coverage, "coverage for the threshold length M");
  cmd->add_option("--baseline-width", o.baseline_width, "single-TCAM baseline width (default address width)");
  cmd->add_option("--overflow-capacity", o.overflow_capacity, "overflow buffer entries");
  cmd->add_option("--seed", o.seed, "verification sampling seed");
}

PrefixDatabase load(const Options& o) {
  return load_database(o.db, o.width, ParseOptions{o.drop_longer});
}

PlanConfig plan_config(const Options& o) {
  PlanConfig cfg;
  cfg.address_width = o.width;
  cfg.strides = StrideList::parse(o.strides);
  cfg.grain = GrainSpec::parse(o.grain);
  cfg.tag_bits = o.tag_bits;
  cfg.hybridize = o.hybridize;
  cfg.factor = parse_rational(o.factor);
  cfg.sram_page = SramPageSpec::parse(o.sram_page);
  if (!o.profile.empty()) cfg.profile = PipelineProfile::load(o.profile);
  cfg.skip_pipeline = o.skip_pipeline;
  cfg.coverage = parse_rational(o.coverage);
  if (o.baseline_width > 0) cfg.baseline_width = o.baseline_width;
  cfg.overflow_capacity = o.overflow_capacity;
  cfg.seed = o.seed;
  return cfg;
}

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw Error(Errc::kInvalidArgument, "cannot write " + o.out);
  f << text;
}

// Flattens the report's scalar leaves into key,value rows.
void flatten(const nlohmann::json& j, const std::string& prefix, std::ostringstream& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else if (!j.is_array()) {
    out << prefix << ',' << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
  }
}

int run_plan_cmd(const Options& o) {
  PrefixDatabase db = load(o);
  PlanConfig cfg = plan_config(o);
  if (o.format == "csv") {
    PlanResult result = run_plan(db, cfg);
    std::ostringstream out;
    out << "key,value\n";
    flatten(plan_report(db, cfg, result), "", out);
    emit(o, out.str());
  } else {
    emit(o, cmd_plan(db, cfg));
  }
  return 0;
}

int run_verify_cmd(const Options& o) {
  PrefixDatabase db = load(o);
  PlanConfig cfg = plan_config(o);
  static const std::map<std::string, VerifyMode> modes = {
      {"auto", VerifyMode::kAuto}, {"exhaustive", VerifyMode::kExhaustive}, {"sampled", VerifyMode::kSampled}};
  VerifyOptions v;
  v.mode = modes.at(o.mode);
  v.samples = o.samples;
  v.seed = o.seed;
  if (!o.trace.empty()) v.trace_path = o.trace;
  v.report_limit = o.limit;
  v.inject_fault = o.inject_fault;
  VerifyResult result = cmd_verify(db, cfg, v);
  if (o.format == "json") {
    nlohmann::json mismatches = nlohmann::json::array();
    for (const auto& m : result.mismatches) {
      mismatches.push_back({{"address", format_address(m.address, o.width)}, {"got", m.got}, {"expected", m.expected}});
    }
    nlohmann::json j = {{"passed", result.passed()},
                        {"exhaustive", result.exhaustive},
                        {"checked", result.checked},
                        {"mismatch_count", result.mismatch_count},
                        {"mismatches", mismatches}};
    emit(o, j.dump(2) + "\n");
  } else {
    emit(o, format_verify(result, o.width));
  }
  return result.passed() ? 0 : 1;
}

int run_sweep_cmd(const Options& o) {
  PrefixDatabase db = load(o);
  PlanConfig cfg = plan_config(o);
  cfg.validate();
  SweepConfig sweep;
  sweep.widths = o.widths;
  sweep.depth_rule = o.depth_rule == "fixed" ? DepthRule::kFixed : DepthRule::kConstantArea;
  sweep.fixed_depth = o.depth;
  sweep.reference = GrainSpec::parse(o.reference_grain);
  emit(o, cmd_sweep_grain(db, cfg, sweep));
  return 0;
}

int run_strides_cmd(const Options& o) {
  PrefixDatabase db = load(o);
  StrideSearchConfig cfg;
  cfg.height = o.height;
  cfg.budget = o.budget;
  cfg.grain = GrainSpec::parse(o.grain);
  cfg.tag_bits = o.tag_bits;
  cfg.coverage_length = o.coverage_length > 0 ? o.coverage_length : db.max_length();
  cfg.final_operand = o.final_operand == "terminal" ? FinalSegmentOperand::kTerminalLevel
                                                    : FinalSegmentOperand::kLastChosenLevel;
  emit(o, cmd_strides(db, cfg, o.limit));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fixed-stride TCAM tree planner for longest-prefix match"};
  app.require_subcommand(1);
  Options o;

  auto* analyze = app.add_subcommand("analyze", "lean-level CSV of the prefix trie");
  add_db_options(analyze, o);
  analyze->add_option("--max-level", o.max_level, "last level to report (default address width)");

  auto* plan = app.add_subcommand("plan", "build, pack and map a plan; print the report");
  add_db_options(plan, o);
  add_plan_options(plan, o);
  plan->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  auto* verify = app.add_subcommand("verify", "compare the planned search against the reference LPM");
  add_db_options(verify, o);
  add_plan_options(verify, o);
  verify->add_option("--mode", o.mode, "auto, exhaustive or sampled")->check(CLI::IsMember({"auto", "exhaustive", "sampled"}));
  verify->add_option("--samples", o.samples, "random addresses in sampled mode");
  verify->add_option("--trace", o.trace, "replay addresses from a file, one per line");
  verify->add_flag("--inject-fault", o.inject_fault, "corrupt one entry before verifying");
  verify->add_option("--limit", o.limit, "mismatches to print");
  verify->add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"}));

  auto* sweep = app.add_subcommand("sweep-grain", "CSV of block and bit costs across grain widths");
  add_db_options(sweep, o);
  add_plan_options(sweep, o);
  sweep->add_option("--widths", o.widths, "grain widths, comma separated")->delimiter(',')->required();
  sweep->add_option("--depth-rule", o.depth_rule, "constant-area or fixed")
      ->check(CLI::IsMember({"constant-area", "fixed"}));
  sweep->add_option("--depth", o.depth, "grain depth for the fixed rule");
  sweep->add_option("--reference-grain", o.reference_grain, "WxD whose area the constant-area rule keeps");
  sweep->add_option("--format", o.format, "csv")->check(CLI::IsMember({"csv"}));

  auto* strides = app.add_subcommand("strides", "rank stride lists by estimated pointer overhead");
  add_db_options(strides, o);
  strides->add_option("--height", o.height, "tree height H");
  strides->add_option("--budget", o.budget, "overhead budget B (entries)")->required();
  strides->add_option("--grain", o.grain, "TCAM block WxD");
  strides->add_option("--tag-bits", o.tag_bits, "tag bits (default ceil(log2 D))");
  strides->add_option("--coverage-length", o.coverage_length, "bits covered by the tree (default longest prefix)");
  strides->add_option("--final-operand", o.final_operand, "last or terminal")->check(CLI::IsMember({"last", "terminal"}));
  strides->add_option("--limit", o.limit, "rows to print");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*analyze) {
      PrefixDatabase db = load(o);
      emit(o, cmd_analyze(db, o.max_level > 0 ? o.max_level : o.width));
      return 0;
    }
    if (*plan) return run_plan_cmd(o);
    if (*verify) return run_verify_cmd(o);
    if (*sweep) return run_sweep_cmd(o);
    if (*strides) return run_strides_cmd(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
