// Copyright 2026 The tcamtree Authors
// SPDX-License-Identifier: Apache-2.0

#include "tcamtree/tiler.hpp"

#include <algorithm>
#include <charconv>

#include "tcamtree/error.hpp"

namespace tcamtree {

void GrainSpec::validate() const {
  if (width < 1 || depth < 1) {
    throw Error(Errc::kInvalidArgument, "grain must be at least 1x1, got " + to_string());
  }
}

GrainSpec GrainSpec::parse(std::string_view text) {
  auto x = text.find_first_of("xX");
  GrainSpec g{0, 0};
  auto read = [&](std::string_view s, int& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return !s.empty() && ec == std::errc{} && ptr == s.data() + s.size();
  };
  if (x == std::string_view::npos || !read(text.substr(0, x), g.width) || !read(text.substr(x + 1), g.depth)) {
    throw Error(Errc::kInvalidArgument, "grain must look like WxD, got '" + std::string(text) + "'");
  }
  g.validate();
  return g;
}

std::string GrainSpec::to_string() const { return std::to_string(width) + "x" + std::to_string(depth); }

std::int64_t blocks_for_table(std::int64_t table_width, std::int64_t table_depth, const GrainSpec& grain) {
  grain.validate();
  if (table_width < 0 || table_depth < 0) throw Error(Errc::kInvalidArgument, "negative table geometry");
  if (table_width == 0 || table_depth == 0) return 0;
  return ceil_div64(table_width, grain.width) * ceil_div64(table_depth, grain.depth);
}

StrideList::StrideList(std::vector<int> strides) : strides_(std::move(strides)) {
  if (strides_.empty()) throw Error(Errc::kInvalidArgument, "stride list is empty");
  offsets_.push_back(0);
  for (int s : strides_) {
    if (s < 1) throw Error(Errc::kInvalidArgument, "strides must be positive");
    offsets_.push_back(offsets_.back() + s);
  }
  if (offsets_.back() > kMaxAddressWidth) throw Error(Errc::kInvalidArgument, "strides cover more than 64 bits");
}

StrideList StrideList::parse(std::string_view text) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto dash = text.find('-', pos);
    if (dash == std::string_view::npos) dash = text.size();
    std::string_view part = text.substr(pos, dash - pos);
    int v = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || ec != std::errc{} || ptr != part.data() + part.size()) {
      throw Error(Errc::kInvalidArgument, "bad stride list '" + std::string(text) + "'");
    }
    out.push_back(v);
    pos = dash + 1;
  }
  return StrideList(std::move(out));
}

StrideList StrideList::from_cuts(std::span<const int> cut_levels, int coverage) {
  std::vector<int> out;
  int prev = 0;
  for (int c : cut_levels) {
    out.push_back(c - prev);
    prev = c;
  }
  out.push_back(coverage - prev);
  return StrideList(std::move(out));
}

std::vector<int> StrideList::cut_levels() const {
  return {offsets_.begin() + 1, offsets_.end() - 1};
}

std::string StrideList::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < strides_.size(); ++i) {
    if (i) s += '-';
    s += std::to_string(strides_[i]);
  }
  return s;
}

TreeTable::TreeTable(TableId id, int level, int stride_width, TableId parent)
    : id_(id), level_(level), stride_(stride_width), parent_(parent) {}

int TreeTable::max_entry_length() const {
  for (int l = stride_; l >= 0; --l) {
    if (length_counts_[static_cast<std::size_t>(l)] > 0) return l;
  }
  return 0;
}

std::optional<std::size_t> TreeTable::find(std::uint64_t key, int length) const {
  auto it = index_.find(PrefixKey{key, length});
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> TreeTable::match(std::uint64_t chunk) const {
  for (int l = stride_; l >= 0; --l) {
    if (length_counts_[static_cast<std::size_t>(l)] == 0) continue;
    if (auto pos = find(l == 0 ? 0 : chunk >> (stride_ - l), l)) return pos;
  }
  return std::nullopt;
}

std::optional<std::size_t> TreeTable::match_priority_scan(std::uint64_t chunk) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (prefix_covers(entries_[i].key, entries_[i].length, chunk, stride_)) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> TreeTable::covering_terminal(std::uint64_t key, int length) const {
  for (int l = length - 1; l >= 0; --l) {
    if (length_counts_[static_cast<std::size_t>(l)] == 0) continue;
    auto pos = find(l == 0 ? 0 : key >> (length - l), l);
    if (pos && entries_[*pos].terminal) return pos;
  }
  return std::nullopt;
}

std::size_t TreeTable::insert(const TableEntry& entry) {
  if (find(entry.key, entry.length)) {
    throw Error(Errc::kDuplicatePrefix, "table already holds " + entry.key_bits(stride_));
  }
  auto it = std::upper_bound(entries_.begin(), entries_.end(), entry, before);
  auto pos = static_cast<std::size_t>(it - entries_.begin());
  entries_.insert(it, entry);
  ++length_counts_[static_cast<std::size_t>(entry.length)];
  reindex_from(pos);
  return pos;
}

void TreeTable::erase(std::size_t pos) {
  const TableEntry& e = entries_[pos];
  index_.erase(PrefixKey{e.key, e.length});
  --length_counts_[static_cast<std::size_t>(e.length)];
  entries_.erase(entries_.begin() + static_cast<std::ptrdiff_t>(pos));
  reindex_from(pos);
}

std::size_t TreeTable::append_unsorted(const TableEntry& entry) {
  if (find(entry.key, entry.length)) {
    throw Error(Errc::kDuplicatePrefix, "table already holds " + entry.key_bits(stride_));
  }
  index_.emplace(PrefixKey{entry.key, entry.length}, static_cast<std::uint32_t>(entries_.size()));
  ++length_counts_[static_cast<std::size_t>(entry.length)];
  entries_.push_back(entry);
  return entries_.size() - 1;
}

void TreeTable::finalize() {
  std::stable_sort(entries_.begin(), entries_.end(), before);
  reindex_from(0);
}

void TreeTable::reindex_from(std::size_t pos) {
  for (std::size_t i = pos; i < entries_.size(); ++i) {
    index_[PrefixKey{entries_[i].key, entries_[i].length}] = static_cast<std::uint32_t>(i);
  }
}

void TreeTable::set_sram(int key_length, std::unordered_map<std::uint64_t, SramSlot> slots) {
  kind_ = TableKind::kSram;
  sram_key_length_ = key_length;
  sram_ = std::move(slots);
}

void TreeTable::clear_sram() {
  kind_ = TableKind::kTcam;
  sram_key_length_ = 0;
  sram_.clear();
}

const SramSlot* TreeTable::sram_find(std::uint64_t chunk) const {
  std::uint64_t key = sram_key_length_ == 0 ? 0 : chunk >> (stride_ - sram_key_length_);
  auto it = sram_.find(key);
  return it == sram_.end() ? nullptr : &it->second;
}

TcamTree::TcamTree(int address_width, StrideList strides)
    : address_width_(address_width), strides_(std::move(strides)) {
  if (strides_.coverage() > address_width_) {
    throw Error(Errc::kInvalidArgument, "strides " + strides_.to_string() + " cover " +
                                            std::to_string(strides_.coverage()) + " bits but addresses have " +
                                            std::to_string(address_width_));
  }
  levels_.resize(static_cast<std::size_t>(strides_.height()));
  add_table(0, kNoTable);
}

TableId TcamTree::add_table(int level, TableId parent) {
  auto id = static_cast<TableId>(tables_.size());
  tables_.emplace_back(id, level, strides_.stride(level), parent);
  levels_[static_cast<std::size_t>(level)].push_back(id);
  return id;
}

std::uint32_t TcamTree::intern(std::string_view label) {
  auto it = label_ids_.find(std::string(label));
  if (it != label_ids_.end()) return it->second;
  auto id = static_cast<std::uint32_t>(labels_.size());
  labels_.emplace_back(label);
  label_ids_.emplace(labels_.back(), id);
  return id;
}

std::string TcamTree::label_or_default(std::uint32_t id) const {
  return id == kNoValue ? std::string(kDefaultNextHop) : labels_[id];
}

TreeMatch TcamTree::lookup(Address address) const {
  TreeMatch best;
  TableId t = root();
  while (t != kNoTable) {
    const TreeTable& tab = tables_[t];
    std::uint64_t chunk = extract_bits(address, address_width_, strides_.offset(tab.level()), tab.stride_width());
    std::uint32_t value = kNoValue;
    int value_length = -1;
    TableId next = kNoTable;
    if (tab.kind() == TableKind::kSram) {
      const SramSlot* slot = tab.sram_find(chunk);
      if (!slot) break;
      value = slot->value;
      value_length = slot->value_length;
      next = slot->child;
    } else {
      auto pos = tab.match(chunk);
      if (!pos) break;
      const TableEntry& e = tab.entry(*pos);
      value = e.value;
      value_length = e.value_length;
      next = e.child;
    }
    if (value != kNoValue) best = TreeMatch{value, value_length};
    t = next;
  }
  return best;
}

std::size_t TcamTree::terminal_count() const {
  std::size_t n = 0;
  for (const auto& t : tables_)
    for (const auto& e : t.entries()) n += e.terminal ? 1 : 0;
  return n;
}

std::size_t TcamTree::stub_count() const {
  std::size_t n = 0;
  for (const auto& t : tables_)
    for (const auto& e : t.entries()) n += e.is_stub() ? 1 : 0;
  return n;
}

std::size_t TcamTree::total_entries() const {
  std::size_t n = 0;
  for (const auto& t : tables_) n += t.size();
  return n;
}

std::size_t TcamTree::merged_count() const {
  std::size_t n = 0;
  for (const auto& t : tables_)
    for (const auto& e : t.entries()) n += (e.is_stub() && e.terminal) ? 1 : 0;
  return n;
}

std::size_t TcamTree::stub_count_at_level(int level) const {
  std::size_t n = 0;
  for (TableId id : level_tables(level))
    for (const auto& e : tables_[id].entries()) n += e.is_stub() ? 1 : 0;
  return n;
}

void TcamTree::refresh_inherited(TableId id) {
  TreeTable& tab = tables_[id];
  for (std::size_t i = 0; i < tab.size(); ++i) {
    TableEntry& e = tab.mutable_entry(i);
    if (e.terminal || !e.is_stub()) continue;
    if (auto cover = tab.covering_terminal(e.key, e.length)) {
      e.value = tab.entry(*cover).value;
      e.value_length = tab.entry(*cover).value_length;
    } else {
      e.value = kNoValue;
      e.value_length = -1;
    }
  }
}

TcamTree build_tree(const PrefixDatabase& db, const StrideList& strides, std::vector<Prefix>* beyond_coverage) {
  TcamTree tree(db.address_width(), strides);
  const int coverage = strides.coverage();

  for (std::size_t i = 0; i < db.size(); ++i) {
    const Prefix& p = db[i];
    if (p.length > coverage) {
      if (!beyond_coverage) {
        throw Error(Errc::kPrefixExceedsCoverage, p.bitstring() + "/" + std::to_string(p.length) +
                                                      " is longer than the stride coverage " + std::to_string(coverage));
      }
      beyond_coverage->push_back(p);
      continue;
    }
    const std::uint32_t label = tree.intern(p.next_hop);
    TableId t = tree.root();
    int level = 0;
    int offset = 0;
    for (;;) {
      const int stride = strides.stride(level);
      const int local = p.length - offset;
      if (local <= stride) {
        // Case 1: ends here, padded with don't-cares.
        TreeTable& tab = tree.mutable_table(t);
        std::uint64_t key = extract_bits(p.bits, p.length, offset, local);
        if (auto pos = tab.find(key, local)) {
          TableEntry& e = tab.mutable_entry(*pos);
          if (e.terminal) throw Error(Errc::kDuplicatePrefix, p.bitstring() + "/" + std::to_string(p.length));
          e.terminal = true;
          e.value = label;
          e.value_length = p.length;
        } else {
          TableEntry e;
          e.key = key;
          e.length = local;
          e.value = label;
          e.value_length = p.length;
          e.terminal = true;
          e.seq = i;
          tab.append_unsorted(e);
        }
        break;
      }
      // Case 2: crosses the boundary; find or add the stub and its child.
      std::uint64_t key = extract_bits(p.bits, p.length, offset, stride);
      std::size_t pos = 0;
      if (auto found = tree.table(t).find(key, stride)) {
        pos = *found;
      } else {
        TableEntry stub;
        stub.key = key;
        stub.length = stride;
        stub.seq = i;
        pos = tree.mutable_table(t).append_unsorted(stub);
      }
      TableId child = tree.table(t).entry(pos).child;
      if (child == kNoTable) {
        child = tree.add_table(level + 1, t);
        tree.mutable_table(t).mutable_entry(pos).child = child;
      }
      t = child;
      ++level;
      offset += stride;
    }
  }

  for (TableId id = 0; id < tree.table_count(); ++id) {
    tree.mutable_table(id).finalize();
    tree.refresh_inherited(id);
  }
  return tree;
}

std::int64_t stride_overhead(const StrideSearchConfig& cfg, const LeanLevelTable& lean, std::span<const int> cuts) {
  const int tag = cfg.effective_tag_bits();
  const int w = cfg.grain.width;
  std::int64_t overhead = 0;
  int prev = 0;
  for (int lvl : cuts) {
    overhead += (ceil_div64(lvl + tag - prev, w) + 1) * lean.nonleaf_count(lvl);
    prev = lvl;
  }
  int operand = cfg.final_operand == FinalSegmentOperand::kTerminalLevel ? cfg.coverage_length : prev;
  overhead += (ceil_div64(cfg.coverage_length + tag - prev, w) + 1) * lean.nonleaf_count(operand);
  return overhead;
}

std::vector<StrideCandidate> choose_strides(const StrideSearchConfig& cfg, const LeanLevelTable& lean) {
  cfg.grain.validate();
  if (cfg.height < 2) throw Error(Errc::kInvalidArgument, "stride search needs height >= 2");
  if (cfg.budget <= 0) throw Error(Errc::kBudgetZero, "no combination has overhead below a zero budget");
  if (cfg.coverage_length < 1 || cfg.coverage_length > lean.max_depth()) {
    throw Error(Errc::kInvalidArgument, "coverage length outside the lean table");
  }
  const int picks = cfg.height - 1;
  const int last = cfg.coverage_length - 1;
  std::vector<StrideCandidate> out;
  if (picks > last) return out;

  std::vector<int> combo(static_cast<std::size_t>(picks));
  for (int i = 0; i < picks; ++i) combo[static_cast<std::size_t>(i)] = i + 1;
  for (;;) {
    std::int64_t overhead = stride_overhead(cfg, lean, combo);
    if (overhead < cfg.budget) out.push_back({StrideList::from_cuts(combo, cfg.coverage_length), overhead});
    // next combination in lexicographic order
    int i = picks - 1;
    while (i >= 0 && combo[static_cast<std::size_t>(i)] == last - (picks - 1 - i)) --i;
    if (i < 0) break;
    ++combo[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < picks; ++j) combo[static_cast<std::size_t>(j)] = combo[static_cast<std::size_t>(j - 1)] + 1;
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const StrideCandidate& a, const StrideCandidate& b) { return a.overhead < b.overhead; });
  return out;
}

std::vector<StrideCandidate> choose_strides(const PrefixDatabase& db, const StrideSearchConfig& cfg) {
  if (db.empty()) throw Error(Errc::kEmptyDatabase, "stride search needs a non-empty database");
  UnibitTrie trie(db);
  return choose_strides(cfg, compute_lean_levels(trie, static_cast<std::int64_t>(db.size())));
}

}  // namespace tcamtree
