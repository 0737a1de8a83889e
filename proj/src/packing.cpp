// Copyright 2026 The tcamtree Authors
// SPDX-License-Identifier: Apache-2.0

#include "tcamtree/packing.hpp"

#include <algorithm>
#include <charconv>

#include "tcamtree/error.hpp"
#include "tcamtree/trie.hpp"

namespace tcamtree {

void SramPageSpec::validate() const {
  if (width < 1 || depth < 1) throw Error(Errc::kInvalidArgument, "SRAM page must be at least 1x1");
}

SramPageSpec SramPageSpec::parse(std::string_view text) {
  GrainSpec g = GrainSpec::parse(text);
  return SramPageSpec{g.width, g.depth};
}

std::string SramPageSpec::to_string() const { return std::to_string(width) + "x" + std::to_string(depth); }

namespace {

std::vector<LocalPrefix> local_prefixes(const TreeTable& table) {
  std::vector<LocalPrefix> items;
  items.reserve(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    const TableEntry& e = table.entry(i);
    items.push_back(LocalPrefix{e.key, e.length, static_cast<std::uint32_t>(i)});
  }
  return items;
}

void flag_parent_pointer(TcamTree& tree, TableId id, bool sram) {
  TableId parent = tree.table(id).parent();
  if (parent == kNoTable) return;
  TreeTable& p = tree.mutable_table(parent);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.entry(i).child == id) {
      p.mutable_entry(i).child_sram = sram;
      break;
    }
  }
}

}  // namespace

std::uint64_t expanded_size(const TreeTable& table) {
  if (table.empty()) return 0;
  auto items = local_prefixes(table);
  return count_expanded(items, table.max_entry_length());
}

std::uint64_t convert_to_sram(TcamTree& tree, TableId id) {
  TreeTable& table = tree.mutable_table(id);
  const int key_length = table.empty() ? 0 : table.max_entry_length();
  auto items = local_prefixes(table);
  std::unordered_map<std::uint64_t, SramSlot> slots;
  auto expanded = expand_prefixes(items, key_length);
  slots.reserve(expanded.size());
  for (const auto& k : expanded) {
    const TableEntry& e = table.entry(k.payload);
    slots.emplace(k.key, SramSlot{e.value, e.value_length, e.child, e.child_sram});
  }
  table.set_sram(key_length, std::move(slots));
  flag_parent_pointer(tree, id, true);
  return expanded.size();
}

HybridizeResult hybridize(TcamTree tree, const HybridizationConfig& cfg) {
  HybridizeResult result{std::move(tree), 0, {}};
  if (!cfg.enabled) return result;
  if (cfg.factor < 1) throw Error(Errc::kInvalidArgument, "conversion factor must be >= 1");
  cfg.sram.validate();
  TcamTree& t = result.tree;

  for (TableId id = 0; id < t.table_count(); ++id) {
    const TreeTable& table = t.table(id);
    if (table.empty()) continue;
    const int key_length = table.max_entry_length();
    if (cfg.tag_bits + key_length + cfg.value_bits > cfg.sram.width) continue;
    const std::uint64_t expanded = expanded_size(table);
    // expanded <= C * n, exactly
    const auto lhs = static_cast<__int128>(expanded) * cfg.factor.denominator();
    const auto rhs = static_cast<__int128>(cfg.factor.numerator()) * static_cast<__int128>(table.size());
    if (lhs <= rhs) result.converted.push_back(id);
  }
  // Flag every parent pointer first so each image copies final child kinds.
  for (TableId id : result.converted) flag_parent_pointer(t, id, true);
  for (TableId id : result.converted) result.sram_entries += convert_to_sram(t, id);
  return result;
}

std::optional<TableId> SuperTable::member(std::uint32_t tag) const {
  for (const auto& m : members) {
    if (m.tag == tag) return m.table;
  }
  return std::nullopt;
}

std::optional<std::size_t> SuperTable::search(const TcamTree& tree, std::uint32_t tag, std::uint64_t chunk) const {
  // Tags are assigned sequentially from 0, so the member slot is the tag.
  if (tag < members.size() && members[tag].tag == tag) return tree.table(members[tag].table).match(chunk);
  auto id = member(tag);
  if (!id) return std::nullopt;
  return tree.table(*id).match(chunk);
}

namespace {

SuperTable make_super(const TcamTree& tree, int level, int tag_bits, std::span<const TableId> tables,
                      const GrainSpec& grain) {
  SuperTable st;
  st.level = level;
  st.tag_bits = tag_bits;
  st.effective_width = tag_bits + tree.strides().stride(level);
  std::uint32_t tag = 0;
  for (TableId id : tables) {
    st.members.push_back({tag++, id});
    st.total_entries += static_cast<std::int64_t>(tree.table(id).size());
  }
  st.width_factor = ceil_div64(st.effective_width, grain.width);
  st.rows = ceil_div64(st.total_entries, grain.depth);
  st.block_count = st.width_factor * st.rows;
  return st;
}

}  // namespace

std::vector<SuperTable> tag_and_pack(const TcamTree& tree, const PackingConfig& cfg) {
  cfg.grain.validate();
  if (cfg.tag_bits < 0 || cfg.tag_bits > 62) throw Error(Errc::kInvalidArgument, "tag bits must be in [0, 62]");
  const std::int64_t max_members = std::int64_t{1} << cfg.tag_bits;
  std::vector<SuperTable> out;

  for (int level = 0; level < tree.height(); ++level) {
    std::vector<TableId> tables;
    for (TableId id : tree.level_tables(level)) {
      if (tree.table(id).kind() == TableKind::kTcam) tables.push_back(id);
    }
    if (tables.empty()) continue;
    if (level == 0) {
      out.push_back(make_super(tree, 0, 0, tables, cfg.grain));
      continue;
    }
    std::stable_sort(tables.begin(), tables.end(),
                     [&](TableId a, TableId b) { return tree.table(a).size() > tree.table(b).size(); });

    std::vector<std::vector<TableId>> groups;
    if (!cfg.grouping) {
      if (static_cast<std::int64_t>(tables.size()) > max_members) {
        throw Error(Errc::kTagOverflow, std::to_string(tables.size()) + " tables at level " + std::to_string(level) +
                                            " exceed 2^" + std::to_string(cfg.tag_bits) + " tags");
      }
      groups.push_back(tables);
    } else {
      std::vector<TableId> current;
      std::int64_t entries = 0;
      for (TableId id : tables) {
        auto size = static_cast<std::int64_t>(tree.table(id).size());
        bool full = static_cast<std::int64_t>(current.size()) == max_members;
        bool capped = cfg.group_entry_cap && !current.empty() && entries + size > *cfg.group_entry_cap;
        if (full || capped) {
          groups.push_back(std::move(current));
          current.clear();
          entries = 0;
        }
        current.push_back(id);
        entries += size;
      }
      if (!current.empty()) groups.push_back(std::move(current));
    }

    const int stride = tree.strides().stride(level);
    for (const auto& group : groups) {
      SuperTable tagged = make_super(tree, level, cfg.tag_bits, group, cfg.grain);
      std::int64_t separate = 0;
      for (TableId id : group) separate += blocks_for_table(stride, static_cast<std::int64_t>(tree.table(id).size()), cfg.grain);
      if (separate < tagged.block_count) {
        for (TableId id : group) out.push_back(make_super(tree, level, 0, std::span<const TableId>(&id, 1), cfg.grain));
      } else {
        out.push_back(std::move(tagged));
      }
    }
  }
  return out;
}

std::int64_t pre_tag_blocks(const TcamTree& tree, const GrainSpec& grain) {
  std::int64_t total = 0;
  for (TableId id = 0; id < tree.table_count(); ++id) {
    const TreeTable& t = tree.table(id);
    if (t.kind() == TableKind::kTcam) total += blocks_for_table(t.stride_width(), static_cast<std::int64_t>(t.size()), grain);
  }
  return total;
}

std::vector<std::uint64_t> sram_entries_by_level(const TcamTree& tree) {
  std::vector<std::uint64_t> out(static_cast<std::size_t>(tree.height()), 0);
  for (TableId id = 0; id < tree.table_count(); ++id) {
    const TreeTable& t = tree.table(id);
    if (t.kind() == TableKind::kSram) out[static_cast<std::size_t>(t.level())] += t.sram_size();
  }
  return out;
}

std::string ResourceReport::improvement_text() const {
  return improvement ? format_fixed(*improvement, 3) : std::string("inf");
}

ResourceReport resource_totals(std::span<const SuperTable> super_tables, std::int64_t pre_tag, std::uint64_t sram_entries,
                               const GrainSpec& grain, const SramPageSpec& sram, std::int64_t baseline_blocks) {
  grain.validate();
  sram.validate();
  ResourceReport r;
  r.tcam_blocks_pre_tag = pre_tag;
  for (const auto& st : super_tables) r.tcam_blocks_post_tag += st.block_count;
  r.sram_entries = sram_entries;
  r.sram_pages = ceil_div64(static_cast<std::int64_t>(sram_entries), sram.depth);
  r.tcam_bits = r.tcam_blocks_post_tag * grain.bits_per_block();
  r.baseline_blocks = baseline_blocks;
  if (r.tcam_blocks_post_tag > 0) r.improvement = Rational(baseline_blocks, r.tcam_blocks_post_tag);
  return r;
}

}  // namespace tcamtree
