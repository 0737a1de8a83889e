// Copyright 2026 The tcamtree Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tcamtree/prefixdb.hpp"
#include "tcamtree/trie.hpp"

namespace tcamtree {

// Geometry of one physical TCAM block.
struct GrainSpec {
  int width = 44;
  int depth = 512;

  void validate() const;
  // "44x512"
  static GrainSpec parse(std::string_view text);
  std::string to_string() const;
  int default_tag_bits() const { return ceil_log2(depth); }
  std::int64_t bits_per_block() const { return std::int64_t{width} * depth; }
};

// ceil(width / W) * ceil(depth / D); empty tables cost nothing.
std::int64_t blocks_for_table(std::int64_t table_width, std::int64_t table_depth, const GrainSpec& grain);

class StrideList {
 public:
  StrideList() = default;
  explicit StrideList(std::vector<int> strides);

  // Hyphen-joined form, e.g. "19-29-16".
  static StrideList parse(std::string_view text);
  static StrideList from_cuts(std::span<const int> cut_levels, int coverage);

  std::span<const int> strides() const { return strides_; }
  int stride(int level) const { return strides_[static_cast<std::size_t>(level)]; }
  int height() const { return static_cast<int>(strides_.size()); }
  int coverage() const { return offsets_.empty() ? 0 : offsets_.back(); }
  // First address bit consumed by `level`.
  int offset(int level) const { return offsets_[static_cast<std::size_t>(level)]; }
  // Cumulative boundaries between levels (excludes 0 and the coverage).
  std::vector<int> cut_levels() const;
  std::string to_string() const;

  friend bool operator==(const StrideList& a, const StrideList& b) { return a.strides_ == b.strides_; }

 private:
  std::vector<int> strides_;
  std::vector<int> offsets_;  // size height + 1
};

using TableId = std::uint32_t;
inline constexpr TableId kNoTable = 0xFFFFFFFFU;
inline constexpr std::uint32_t kNoValue = 0xFFFFFFFFU;

// One TCAM word: a local prefix of the table's stride, its best matching
// prefix value (RetBMP) and an optional child table (RetTable).
struct TableEntry {
  std::uint64_t key = 0;
  int length = 0;
  std::uint32_t value = kNoValue;
  int value_length = -1;  // absolute length of the prefix that supplied `value`
  bool terminal = false;  // a database prefix ends here
  TableId child = kNoTable;
  bool child_sram = false;
  std::uint64_t seq = 0;  // database order of the prefix that created the entry

  bool has_value() const { return value != kNoValue; }
  bool is_stub() const { return child != kNoTable; }
  std::string key_bits(int stride) const { return to_ternary(key, length, stride); }
};

enum class TableKind { kTcam, kSram };

// Exact-match word of a hybridized table.
struct SramSlot {
  std::uint32_t value = kNoValue;
  int value_length = -1;
  TableId child = kNoTable;
  bool child_sram = false;
};

class TreeTable {
 public:
  TreeTable(TableId id, int level, int stride_width, TableId parent);

  TableId id() const { return id_; }
  int level() const { return level_; }
  int stride_width() const { return stride_; }
  TableId parent() const { return parent_; }
  TableKind kind() const { return kind_; }

  // Entries in TCAM priority order: descending specified bits, then seq.
  std::span<const TableEntry> entries() const { return entries_; }
  const TableEntry& entry(std::size_t pos) const { return entries_[pos]; }
  TableEntry& mutable_entry(std::size_t pos) { return entries_[pos]; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  int max_entry_length() const;

  std::optional<std::size_t> find(std::uint64_t key, int length) const;
  // Longest local prefix covering the stride-width chunk. Equivalent to the
  // priority encoder over entries() because of the ordering invariant.
  std::optional<std::size_t> match(std::uint64_t chunk) const;
  // First matching entry in priority order, scanned linearly.
  std::optional<std::size_t> match_priority_scan(std::uint64_t chunk) const;
  // Longest terminal entry strictly shorter than `length` covering `key`.
  std::optional<std::size_t> covering_terminal(std::uint64_t key, int length) const;

  std::size_t insert(const TableEntry& entry);
  void erase(std::size_t pos);

  // Bulk construction: entries are appended in any order and sorted once.
  std::size_t append_unsorted(const TableEntry& entry);
  void finalize();

  // SRAM image of a hybridized table, keyed by the first sram_key_length()
  // bits of the chunk.
  void set_sram(int key_length, std::unordered_map<std::uint64_t, SramSlot> slots);
  void clear_sram();
  int sram_key_length() const { return sram_key_length_; }
  std::size_t sram_size() const { return sram_.size(); }
  const std::unordered_map<std::uint64_t, SramSlot>& sram_slots() const { return sram_; }
  const SramSlot* sram_find(std::uint64_t chunk) const;

 private:
  void reindex_from(std::size_t pos);
  static bool before(const TableEntry& a, const TableEntry& b) {
    return a.length != b.length ? a.length > b.length : a.seq < b.seq;
  }

  TableId id_;
  int level_;
  int stride_;
  TableId parent_;
  TableKind kind_ = TableKind::kTcam;
  std::vector<TableEntry> entries_;
  std::unordered_map<PrefixKey, std::uint32_t, PrefixKeyHash> index_;
  std::array<int, kMaxAddressWidth + 1> length_counts_{};
  int sram_key_length_ = 0;
  std::unordered_map<std::uint64_t, SramSlot> sram_;
};

struct TreeMatch {
  std::uint32_t value = kNoValue;
  int length = -1;  // length of the matched database prefix, -1 on default
};

// Fixed-stride tree of match tables. Table 0 is the root.
class TcamTree {
 public:
  TcamTree(int address_width, StrideList strides);

  int address_width() const { return address_width_; }
  const StrideList& strides() const { return strides_; }
  int height() const { return strides_.height(); }

  TableId root() const { return 0; }
  const TreeTable& table(TableId id) const { return tables_[id]; }
  TreeTable& mutable_table(TableId id) { return tables_[id]; }
  std::size_t table_count() const { return tables_.size(); }
  std::span<const TableId> level_tables(int level) const { return levels_[static_cast<std::size_t>(level)]; }
  TableId add_table(int level, TableId parent);

  std::uint32_t intern(std::string_view label);
  const std::string& label(std::uint32_t id) const { return labels_[id]; }
  std::string label_or_default(std::uint32_t id) const;

  // Tree search: walks the levels, keeps the last returned BMP and stops at
  // a miss or a missing child.
  TreeMatch lookup(Address address) const;
  std::string lookup_label(Address address) const { return label_or_default(lookup(address).value); }

  std::size_t terminal_count() const;
  std::size_t stub_count() const;
  std::size_t total_entries() const;
  // Entries that are both terminal and stub.
  std::size_t merged_count() const;
  // Stubs held by level `level` tables (pointers across its lower boundary).
  std::size_t stub_count_at_level(int level) const;

  // Recomputes RetBMP of stub-only entries from the table's terminals.
  void refresh_inherited(TableId id);

 private:
  int address_width_;
  StrideList strides_;
  std::vector<TreeTable> tables_;
  std::vector<std::vector<TableId>> levels_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::uint32_t> label_ids_;
};

// Builds the tree depth-first. Prefixes longer than the stride coverage are
// rejected with kPrefixExceedsCoverage unless `beyond_coverage` is given, in
// which case they are collected there instead.
TcamTree build_tree(const PrefixDatabase& db, const StrideList& strides,
                    std::vector<Prefix>* beyond_coverage = nullptr);

enum class FinalSegmentOperand {
  kLastChosenLevel,  // LL[last cut]
  kTerminalLevel,    // LL[L]
};

struct StrideSearchConfig {
  int height = 2;
  int coverage_length = 32;
  std::int64_t budget = 0;
  GrainSpec grain;
  int tag_bits = -1;  // -1: ceil(log2 D)
  FinalSegmentOperand final_operand = FinalSegmentOperand::kLastChosenLevel;

  int effective_tag_bits() const { return tag_bits >= 0 ? tag_bits : grain.default_tag_bits(); }
};

struct StrideCandidate {
  StrideList strides;
  std::int64_t overhead = 0;
};

// Pointer overhead estimate of one cut combination (ascending levels).
std::int64_t stride_overhead(const StrideSearchConfig& cfg, const LeanLevelTable& lean, std::span<const int> cuts);

// Every (H-1)-subset of levels 1..L-1 whose overhead is below the budget,
// ascending by overhead (ties keep enumeration order).
std::vector<StrideCandidate> choose_strides(const StrideSearchConfig& cfg, const LeanLevelTable& lean);
std::vector<StrideCandidate> choose_strides(const PrefixDatabase& db, const StrideSearchConfig& cfg);

}  // namespace tcamtree
