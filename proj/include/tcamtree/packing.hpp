// Copyright 2026 The tcamtree Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tcamtree/rational.hpp"
#include "tcamtree/tiler.hpp"

namespace tcamtree {

struct SramPageSpec {
  int width = 128;
  int depth = 1024;

  void validate() const;
  static SramPageSpec parse(std::string_view text);  // "128x1024"
  std::string to_string() const;
};

struct HybridizationConfig {
  bool enabled = true;
  Rational factor{3};  // C
  SramPageSpec sram;
  int tag_bits = 9;
  int value_bits = 16;  // SRAM word bits charged per stored value
};

struct HybridizeResult {
  TcamTree tree;
  std::uint64_t sram_entries = 0;
  std::vector<TableId> converted;
};

// Marks tables whose prefix expansion stays within C times their entry count
// (and whose expanded word fits a page) as SRAM tables. Lookup results are
// unchanged.
HybridizeResult hybridize(TcamTree tree, const HybridizationConfig& cfg);

// Size a table would have after expansion to its longest local entry.
std::uint64_t expanded_size(const TreeTable& table);

// Converts one table to SRAM (or refreshes its image) from its current
// entries and flags the parent pointer. Returns the expanded entry count.
std::uint64_t convert_to_sram(TcamTree& tree, TableId id);

struct SuperTableMember {
  std::uint32_t tag = 0;
  TableId table = kNoTable;
};

// Same-level tables sharing one block set, keyed by a tag prefix.
struct SuperTable {
  int level = 0;
  int tag_bits = 0;
  std::vector<SuperTableMember> members;
  int effective_width = 0;          // tag + stride
  std::int64_t total_entries = 0;
  std::int64_t width_factor = 0;    // ceil(effective_width / W)
  std::int64_t rows = 0;            // vertical blocks allocated
  std::int64_t block_count = 0;     // width_factor * rows

  std::optional<TableId> member(std::uint32_t tag) const;
  // Tag-prefixed TCAM search: resolves the member then matches the chunk.
  std::optional<std::size_t> search(const TcamTree& tree, std::uint32_t tag, std::uint64_t chunk) const;
};

struct PackingConfig {
  GrainSpec grain;
  int tag_bits = 9;
  bool grouping = true;
  std::optional<std::int64_t> group_entry_cap;
};

// Per level, TCAM tables in descending size order are grouped into
// super-tables of at most 2^tag_bits members. The root is packed alone
// without a tag. A group that would cost more blocks tagged than as separate
// tables is emitted as untagged single-member super-tables.
std::vector<SuperTable> tag_and_pack(const TcamTree& tree, const PackingConfig& cfg);

// Sum of blocks_for_table over the TCAM tables, before any packing.
std::int64_t pre_tag_blocks(const TcamTree& tree, const GrainSpec& grain);

// Expanded SRAM entries held by each level.
std::vector<std::uint64_t> sram_entries_by_level(const TcamTree& tree);

struct ResourceReport {
  std::int64_t tcam_blocks_pre_tag = 0;
  std::int64_t tcam_blocks_post_tag = 0;
  std::int64_t sram_pages = 0;
  std::int64_t tcam_bits = 0;
  std::uint64_t sram_entries = 0;
  std::int64_t baseline_blocks = 0;
  std::optional<Rational> improvement;  // nullopt: post-tag is zero

  std::string improvement_text() const;  // "7.498" or "inf"
};

ResourceReport resource_totals(std::span<const SuperTable> super_tables, std::int64_t pre_tag, std::uint64_t sram_entries,
                               const GrainSpec& grain, const SramPageSpec& sram, std::int64_t baseline_blocks);

}  // namespace tcamtree
