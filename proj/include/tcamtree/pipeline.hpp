// Copyright 2026 The tcamtree Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tcamtree/packing.hpp"
#include "tcamtree/prefixdb.hpp"
#include "tcamtree/tiler.hpp"

namespace tcamtree {

struct PipelineProfile {
  int stage_count = 16;
  int tcam_blocks_per_stage = 24;
  int sram_pages_per_stage = 80;
  std::string label = "synthetic default (16 stages x 24 TCAM blocks, 80 SRAM pages per stage)";

  void validate() const;
  std::int64_t total_tcam_blocks() const { return std::int64_t{stage_count} * tcam_blocks_per_stage; }
  std::int64_t total_sram_pages() const { return std::int64_t{stage_count} * sram_pages_per_stage; }

  static PipelineProfile synthetic_default() { return {}; }
  // One stage per level with effectively unlimited capacity.
  static PipelineProfile unbounded(int stages);
  // JSON object with stage_count, tcam_blocks_per_stage, sram_pages_per_stage
  // and an optional label.
  static PipelineProfile load(const std::string& path);
  static PipelineProfile from_json_text(const std::string& text);
};

struct StageSpan {
  int stage = 0;
  int first = 0;  // first block (or page) index inside the stage
  int count = 0;
};

struct Placement {
  std::vector<StageSpan> spans;

  int min_stage() const;
  int max_stage() const;
  std::int64_t total() const;
};

struct SramPool {
  int level = 0;
  std::uint64_t entries = 0;
  std::int64_t pages = 0;
};

// Parent and child are indices into the super-table list.
struct DependencyEdge {
  std::size_t parent = 0;
  std::size_t child = 0;
  friend bool operator==(const DependencyEdge&, const DependencyEdge&) = default;
};

struct LevelStages {
  int first = -1;
  int last = -1;
  bool placed() const { return first >= 0; }
};

struct PipelinePlan {
  PipelineProfile profile;
  std::vector<Placement> tcam;  // parallel to the super-table list
  std::vector<Placement> sram;  // parallel to the SRAM pool list
  std::vector<int> tcam_levels;  // tree level of each TCAM placement
  std::vector<int> sram_levels;
  std::vector<DependencyEdge> edges;
  std::vector<LevelStages> levels;
  std::vector<int> tcam_used;  // per stage
  std::vector<int> sram_used;

  int stages_used() const;
};

// Pools the expanded entries of each level's SRAM tables.
std::vector<SramPool> sram_pools(const TcamTree& tree, const SramPageSpec& page);

std::vector<DependencyEdge> dependency_edges(const TcamTree& tree, std::span<const SuperTable> super_tables);

// Level-by-level greedy placement. Level k starts one stage after the last
// stage used by level k-1; within a level super-tables (then SRAM pools)
// fill stages first-fit and spill into following stages.
// Throws kStageDepthExceeded or kCapacityExceeded.
PipelinePlan map_to_pipeline(const TcamTree& tree, std::span<const SuperTable> super_tables,
                             std::span<const SramPool> pools, const PipelineProfile& profile);

// Every parent stage strictly precedes every child stage.
bool dependencies_respected(const PipelinePlan& plan);

struct OverflowBuffer {
  std::size_t capacity = 512;
  std::vector<Prefix> entries;

  std::optional<std::size_t> match(Address address, int address_width) const;
  std::optional<std::size_t> find(std::uint64_t bits, int length) const;
};

struct StateConfig {
  GrainSpec grain;
  int tag_bits = -1;  // -1: ceil(log2 D)
  bool grouping = true;
  std::optional<std::int64_t> group_entry_cap;
  std::optional<HybridizationConfig> hybrid;
  PipelineProfile profile;
  bool map_pipeline = true;  // false: unbounded one-stage-per-level profile
  std::size_t overflow_capacity = 512;

  int effective_tag_bits() const { return tag_bits >= 0 ? tag_bits : grain.default_tag_bits(); }
};

enum class InsertOutcome { kTree, kOverflow };

// A deployed lookup structure: the tree, its packing and stage placement,
// and the overflow buffer. Search is const and may run from many readers;
// insert/delete need exclusive access.
class LookupState {
 public:
  static LookupState build(const PrefixDatabase& db, const StrideList& strides, const StateConfig& cfg);

  TreeMatch search_match(Address address) const;
  std::string search(Address address) const;

  // Throws kDuplicatePrefix, or kOverflowFull when the entry cannot be
  // placed and the buffer is at capacity.
  InsertOutcome insert_prefix(const Prefix& prefix);
  // Throws kNotFound.
  void delete_prefix(std::uint64_t bits, int length);
  // Drops empty non-root tables and the stubs pointing at them.
  std::size_t collect_garbage();

  bool contains(std::uint64_t bits, int length) const;

  // Negative control for verification: rewrites the value of the longest
  // stored prefix.
  bool inject_fault();

  const TcamTree& tree() const { return tree_; }
  const std::vector<SuperTable>& super_tables() const { return super_tables_; }
  const std::vector<SramPool>& pools() const { return pools_; }
  const PipelinePlan& plan() const { return plan_; }
  const OverflowBuffer& overflow() const { return overflow_; }
  const StateConfig& config() const { return cfg_; }
  std::uint64_t sram_entries() const;
  std::int64_t tcam_blocks() const;
  std::vector<DependencyEdge> current_edges() const { return dependency_edges(tree_, super_tables_); }
  int address_width() const { return tree_.address_width(); }

 private:
  struct Membership {
    std::size_t super_table = SIZE_MAX;
    std::uint32_t tag = 0;
  };
  enum class StepKind { kAddEntry, kMergeTerminal, kAttachChild, kNewTable };
  struct Step {
    StepKind kind;
    int level;
    TableId table;  // kNoTable for kNewTable
    std::uint64_t key;
    int length;
  };
  // Where a table created by an insert will live.
  struct Slot {
    std::size_t super_table;
    std::uint32_t tag;
  };

  LookupState(TcamTree tree, StateConfig cfg);

  std::optional<std::size_t> find_terminal(TableId* table, std::uint64_t bits, int length) const;
  std::vector<Step> plan_insert(const Prefix& p) const;
  std::optional<std::vector<Slot>> reserve(const std::vector<Step>& steps);
  void apply_insert(const Prefix& p, const std::vector<Slot>& slots);
  void place_in_overflow(const Prefix& p);
  void rebuild_membership();
  void after_table_change(TableId id);
  SramPageSpec page_spec() const;

  TcamTree tree_;
  StateConfig cfg_;
  std::vector<SuperTable> super_tables_;
  std::vector<SramPool> pools_;
  PipelinePlan plan_;
  OverflowBuffer overflow_;
  std::vector<std::uint32_t> overflow_labels_;  // interned, parallel to overflow_.entries
  std::vector<Membership> membership_;  // by table id
  std::vector<bool> detached_;
  std::uint64_t next_seq_ = 0;
};

}  // namespace tcamtree
