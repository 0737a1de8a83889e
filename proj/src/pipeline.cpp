// Copyright 2026 The tcamtree Authors
// SPDX-License-Identifier: Apache-2.0

#include "tcamtree/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "json.hpp"
#include "tcamtree/error.hpp"
#include "tcamtree/trie.hpp"

namespace tcamtree {

void PipelineProfile::validate() const {
  if (stage_count < 1) throw Error(Errc::kInvalidArgument, "profile needs at least one stage");
  if (tcam_blocks_per_stage < 0 || sram_pages_per_stage < 0) {
    throw Error(Errc::kInvalidArgument, "per-stage capacities must be non-negative");
  }
}

PipelineProfile PipelineProfile::unbounded(int stages) {
  PipelineProfile p;
  p.stage_count = std::max(stages, 1);
  p.tcam_blocks_per_stage = 1 << 30;
  p.sram_pages_per_stage = 1 << 30;
  p.label = "unbounded (one stage per level)";
  return p;
}

PipelineProfile PipelineProfile::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kInvalidArgument, std::string("profile is not valid JSON: ") + e.what());
  }
  PipelineProfile p;
  try {
    p.stage_count = j.at("stage_count").get<int>();
    p.tcam_blocks_per_stage = j.at("tcam_blocks_per_stage").get<int>();
    p.sram_pages_per_stage = j.at("sram_pages_per_stage").get<int>();
    p.label = j.value("label", std::string("custom"));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kInvalidArgument, std::string("bad profile: ") + e.what());
  }
  p.validate();
  return p;
}

PipelineProfile PipelineProfile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kInvalidArgument, "cannot open profile " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

int Placement::min_stage() const {
  int m = -1;
  for (const auto& s : spans) m = (m < 0 || s.stage < m) ? s.stage : m;
  return m;
}

int Placement::max_stage() const {
  int m = -1;
  for (const auto& s : spans) m = std::max(m, s.stage);
  return m;
}

std::int64_t Placement::total() const {
  std::int64_t t = 0;
  for (const auto& s : spans) t += s.count;
  return t;
}

int PipelinePlan::stages_used() const {
  int last = -1;
  for (const auto& l : levels) last = std::max(last, l.last);
  return last + 1;
}

std::vector<SramPool> sram_pools(const TcamTree& tree, const SramPageSpec& page) {
  page.validate();
  std::vector<SramPool> out;
  for (int level = 0; level < tree.height(); ++level) {
    bool any = false;
    std::uint64_t entries = 0;
    for (TableId id : tree.level_tables(level)) {
      const TreeTable& t = tree.table(id);
      if (t.kind() != TableKind::kSram) continue;
      any = true;
      entries += t.sram_size();
    }
    if (any) out.push_back({level, entries, ceil_div64(static_cast<std::int64_t>(entries), page.depth)});
  }
  return out;
}

std::vector<DependencyEdge> dependency_edges(const TcamTree& tree, std::span<const SuperTable> super_tables) {
  std::unordered_map<TableId, std::size_t> where;
  for (std::size_t i = 0; i < super_tables.size(); ++i) {
    for (const auto& m : super_tables[i].members) where[m.table] = i;
  }
  std::set<std::pair<std::size_t, std::size_t>> edges;
  for (TableId id = 0; id < tree.table_count(); ++id) {
    auto parent = where.find(id);
    if (parent == where.end()) continue;
    for (const auto& e : tree.table(id).entries()) {
      if (e.child == kNoTable) continue;
      auto child = where.find(e.child);
      if (child != where.end()) edges.emplace(parent->second, child->second);
    }
  }
  std::vector<DependencyEdge> out;
  out.reserve(edges.size());
  for (auto [p, c] : edges) out.push_back({p, c});
  return out;
}

namespace {

// First-fit over stages [lo, hi]; returns the units that did not fit.
std::int64_t take(std::vector<int>& used, int per_stage, int lo, int hi, std::int64_t count, Placement& out) {
  for (int s = lo; s <= hi && count > 0; ++s) {
    const int free = per_stage - used[static_cast<std::size_t>(s)];
    if (free <= 0) continue;
    const int n = static_cast<int>(std::min<std::int64_t>(free, count));
    out.spans.push_back({s, used[static_cast<std::size_t>(s)], n});
    used[static_cast<std::size_t>(s)] += n;
    count -= n;
  }
  return count;
}

void note_stages(LevelStages& level, const Placement& p) {
  for (const auto& s : p.spans) {
    if (level.first < 0 || s.stage < level.first) level.first = s.stage;
    level.last = std::max(level.last, s.stage);
  }
}

// Stages a level may grow into without crossing its neighbours.
std::pair<int, int> stage_window(const PipelinePlan& plan, int level) {
  int lo = 0;
  int hi = plan.profile.stage_count - 1;
  for (int j = 0; j < static_cast<int>(plan.levels.size()); ++j) {
    const LevelStages& l = plan.levels[static_cast<std::size_t>(j)];
    if (!l.placed()) continue;
    if (j < level) lo = std::max(lo, l.last + 1);
    if (j > level) hi = std::min(hi, l.first - 1);
  }
  return {lo, hi};
}

bool allocate(PipelinePlan& plan, int level, Placement& placement, bool tcam, std::int64_t count) {
  auto [lo, hi] = stage_window(plan, level);
  Placement added;
  std::int64_t left = tcam ? take(plan.tcam_used, plan.profile.tcam_blocks_per_stage, lo, hi, count, added)
                           : take(plan.sram_used, plan.profile.sram_pages_per_stage, lo, hi, count, added);
  if (left > 0) return false;
  note_stages(plan.levels[static_cast<std::size_t>(level)], added);
  placement.spans.insert(placement.spans.end(), added.spans.begin(), added.spans.end());
  return true;
}

}  // namespace

PipelinePlan map_to_pipeline(const TcamTree& tree, std::span<const SuperTable> super_tables,
                             std::span<const SramPool> pools, const PipelineProfile& profile) {
  profile.validate();
  PipelinePlan plan;
  plan.profile = profile;
  plan.tcam.resize(super_tables.size());
  plan.sram.resize(pools.size());
  for (const auto& st : super_tables) plan.tcam_levels.push_back(st.level);
  for (const auto& pool : pools) plan.sram_levels.push_back(pool.level);
  plan.tcam_used.assign(static_cast<std::size_t>(profile.stage_count), 0);
  plan.sram_used.assign(static_cast<std::size_t>(profile.stage_count), 0);
  plan.levels.assign(static_cast<std::size_t>(tree.height()), {});

  const int last_stage = profile.stage_count - 1;
  int start = 0;
  for (int level = 0; level < tree.height(); ++level) {
    bool demand = false;
    for (const auto& st : super_tables) demand |= st.level == level && st.block_count > 0;
    for (const auto& pool : pools) demand |= pool.level == level && pool.pages > 0;
    if (!demand) continue;
    if (start > last_stage) {
      throw Error(Errc::kStageDepthExceeded, "level " + std::to_string(level) + " needs stage " +
                                                 std::to_string(start + 1) + " but the profile has " +
                                                 std::to_string(profile.stage_count));
    }
    std::int64_t tcam_short = 0;
    std::int64_t sram_short = 0;
    LevelStages& stages = plan.levels[static_cast<std::size_t>(level)];
    for (std::size_t i = 0; i < super_tables.size(); ++i) {
      if (super_tables[i].level != level) continue;
      tcam_short += take(plan.tcam_used, profile.tcam_blocks_per_stage, start, last_stage,
                         super_tables[i].block_count, plan.tcam[i]);
      note_stages(stages, plan.tcam[i]);
    }
    for (std::size_t i = 0; i < pools.size(); ++i) {
      if (pools[i].level != level) continue;
      sram_short += take(plan.sram_used, profile.sram_pages_per_stage, start, last_stage, pools[i].pages, plan.sram[i]);
      note_stages(stages, plan.sram[i]);
    }
    if (tcam_short > 0 || sram_short > 0) {
      throw Error(Errc::kCapacityExceeded, "level " + std::to_string(level) + " is short " +
                                               std::to_string(tcam_short) + " TCAM blocks and " +
                                               std::to_string(sram_short) + " SRAM pages");
    }
    start = stages.last + 1;
  }
  plan.edges = dependency_edges(tree, super_tables);
  return plan;
}

bool dependencies_respected(const PipelinePlan& plan) {
  for (const auto& e : plan.edges) {
    const Placement& p = plan.tcam[e.parent];
    const Placement& c = plan.tcam[e.child];
    if (p.spans.empty() || c.spans.empty()) continue;
    if (p.max_stage() >= c.min_stage()) return false;
  }
  // Level ranges recomputed from the spans must be ordered, which also
  // covers SRAM parents and children.
  std::vector<LevelStages> ranges(plan.levels.size());
  auto widen = [&](int level, const Placement& p) { note_stages(ranges[static_cast<std::size_t>(level)], p); };
  for (std::size_t i = 0; i < plan.tcam.size(); ++i) widen(plan.tcam_levels[i], plan.tcam[i]);
  for (std::size_t i = 0; i < plan.sram.size(); ++i) widen(plan.sram_levels[i], plan.sram[i]);
  int prev_last = -1;
  for (const auto& r : ranges) {
    if (!r.placed()) continue;
    if (r.first <= prev_last) return false;
    prev_last = r.last;
  }
  return true;
}

std::optional<std::size_t> OverflowBuffer::match(Address address, int address_width) const {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!entries[i].matches(address, address_width)) continue;
    if (!best || entries[i].length > entries[*best].length) best = i;
  }
  return best;
}

std::optional<std::size_t> OverflowBuffer::find(std::uint64_t bits, int length) const {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].length == length && entries[i].bits == bits) return i;
  }
  return std::nullopt;
}

LookupState::LookupState(TcamTree tree, StateConfig cfg) : tree_(std::move(tree)), cfg_(std::move(cfg)) {}

LookupState LookupState::build(const PrefixDatabase& db, const StrideList& strides, const StateConfig& cfg) {
  cfg.grain.validate();
  std::vector<Prefix> beyond;
  TcamTree tree = build_tree(db, strides, &beyond);
  if (cfg.hybrid && cfg.hybrid->enabled) tree = hybridize(std::move(tree), *cfg.hybrid).tree;

  LookupState st(std::move(tree), cfg);
  if (!cfg.map_pipeline) st.cfg_.profile = PipelineProfile::unbounded(st.tree_.height());
  st.super_tables_ = tag_and_pack(
      st.tree_, PackingConfig{cfg.grain, cfg.effective_tag_bits(), cfg.grouping, cfg.group_entry_cap});
  st.pools_ = sram_pools(st.tree_, st.page_spec());
  st.plan_ = map_to_pipeline(st.tree_, st.super_tables_, st.pools_, st.cfg_.profile);
  st.overflow_.capacity = cfg.overflow_capacity;
  if (beyond.size() > cfg.overflow_capacity) {
    throw Error(Errc::kOverflowFull, std::to_string(beyond.size()) + " prefixes exceed the stride coverage but the "
                                         "overflow buffer holds " + std::to_string(cfg.overflow_capacity));
  }
  for (const Prefix& p : beyond) st.place_in_overflow(p);
  st.next_seq_ = db.size();
  st.rebuild_membership();
  return st;
}

SramPageSpec LookupState::page_spec() const { return cfg_.hybrid ? cfg_.hybrid->sram : SramPageSpec{}; }

void LookupState::rebuild_membership() {
  membership_.assign(tree_.table_count(), {});
  detached_.assign(tree_.table_count(), false);
  for (std::size_t s = 0; s < super_tables_.size(); ++s) {
    for (const auto& m : super_tables_[s].members) membership_[m.table] = {s, m.tag};
  }
}

TreeMatch LookupState::search_match(Address address) const {
  TreeMatch best;
  const int width = tree_.address_width();
  TableId t = tree_.root();
  while (t != kNoTable) {
    const TreeTable& tab = tree_.table(t);
    const std::uint64_t chunk = extract_bits(address, width, tree_.strides().offset(tab.level()), tab.stride_width());
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
      const Membership& m = membership_[t];
      auto pos = m.super_table == SIZE_MAX ? tab.match(chunk) : super_tables_[m.super_table].search(tree_, m.tag, chunk);
      if (!pos) break;
      const TableEntry& e = tab.entry(*pos);
      value = e.value;
      value_length = e.value_length;
      next = e.child;
    }
    if (value != kNoValue) best = TreeMatch{value, value_length};
    t = next;
  }
  // Lengths decide; the overflow buffer wins a tie.
  if (auto o = overflow_.match(address, width); o && overflow_.entries[*o].length >= best.length) {
    best = TreeMatch{overflow_labels_[*o], overflow_.entries[*o].length};
  }
  return best;
}

std::string LookupState::search(Address address) const { return tree_.label_or_default(search_match(address).value); }

std::optional<std::size_t> LookupState::find_terminal(TableId* table, std::uint64_t bits, int length) const {
  if (length > tree_.strides().coverage()) return std::nullopt;
  TableId t = tree_.root();
  int offset = 0;
  for (int level = 0;; ++level) {
    const int stride = tree_.strides().stride(level);
    const int local = length - offset;
    const TreeTable& tab = tree_.table(t);
    if (local <= stride) {
      auto pos = tab.find(extract_bits(bits, length, offset, local), local);
      if (!pos || !tab.entry(*pos).terminal) return std::nullopt;
      *table = t;
      return pos;
    }
    auto pos = tab.find(extract_bits(bits, length, offset, stride), stride);
    if (!pos || tab.entry(*pos).child == kNoTable) return std::nullopt;
    t = tab.entry(*pos).child;
    offset += stride;
  }
}

bool LookupState::contains(std::uint64_t bits, int length) const {
  if (length < 0 || length > tree_.address_width()) return false;
  bits &= low_mask(length);
  if (overflow_.find(bits, length)) return true;
  TableId t = kNoTable;
  return find_terminal(&t, bits, length).has_value();
}

std::vector<LookupState::Step> LookupState::plan_insert(const Prefix& p) const {
  std::vector<Step> steps;
  const StrideList& strides = tree_.strides();
  TableId t = tree_.root();
  int level = 0;
  int offset = 0;
  for (;;) {
    const int stride = strides.stride(level);
    const int local = p.length - offset;
    const TreeTable& tab = tree_.table(t);
    if (local <= stride) {
      const std::uint64_t key = extract_bits(p.bits, p.length, offset, local);
      const StepKind kind = tab.find(key, local) ? StepKind::kMergeTerminal : StepKind::kAddEntry;
      steps.push_back({kind, level, t, key, local});
      return steps;
    }
    const std::uint64_t key = extract_bits(p.bits, p.length, offset, stride);
    auto pos = tab.find(key, stride);
    if (!pos) {
      steps.push_back({StepKind::kAddEntry, level, t, key, stride});
      break;
    }
    if (tab.entry(*pos).child == kNoTable) {
      steps.push_back({StepKind::kAttachChild, level, t, key, stride});
      break;
    }
    t = tab.entry(*pos).child;
    offset += stride;
    ++level;
  }
  // Every level below the break needs a fresh one-entry table.
  for (;;) {
    offset += strides.stride(level);
    ++level;
    steps.push_back({StepKind::kNewTable, level, kNoTable, 0, 0});
    if (p.length - offset <= strides.stride(level)) break;
  }
  return steps;
}

std::optional<std::vector<LookupState::Slot>> LookupState::reserve(const std::vector<Step>& steps) {
  // Work on copies so a failed reservation leaves the state untouched.
  PipelinePlan plan = plan_;
  std::vector<SuperTable> supers = super_tables_;
  std::vector<SramPool> pools = pools_;
  std::vector<Slot> slots;
  const GrainSpec& grain = cfg_.grain;
  const SramPageSpec page = page_spec();

  auto grow = [&](std::size_t s) {
    SuperTable& st = supers[s];
    ++st.total_entries;
    const std::int64_t rows = ceil_div64(st.total_entries, grain.depth);
    if (rows <= st.rows) return true;
    if (!allocate(plan, st.level, plan.tcam[s], true, (rows - st.rows) * st.width_factor)) return false;
    st.rows = rows;
    st.block_count = st.width_factor * rows;
    return true;
  };

  for (const Step& step : steps) {
    if (step.kind == StepKind::kMergeTerminal || step.kind == StepKind::kAttachChild) continue;
    if (step.kind == StepKind::kNewTable) {
      std::optional<std::size_t> join;
      for (std::size_t s = 0; s < supers.size(); ++s) {
        const SuperTable& st = supers[s];
        if (st.level != step.level || st.tag_bits == 0) continue;
        const std::uint64_t next_tag = st.members.empty() ? 0 : std::uint64_t{st.members.back().tag} + 1;
        if (next_tag >= (std::uint64_t{1} << st.tag_bits)) continue;
        if (st.total_entries < st.rows * grain.depth) {
          join = s;
          break;
        }
        if (!join) join = s;
      }
      if (!join) {
        SuperTable st;
        st.level = step.level;
        st.tag_bits = cfg_.grouping ? cfg_.effective_tag_bits() : 0;
        st.effective_width = st.tag_bits + tree_.strides().stride(step.level);
        st.width_factor = ceil_div64(st.effective_width, grain.width);
        supers.push_back(std::move(st));
        plan.tcam.emplace_back();
        plan.tcam_levels.push_back(step.level);
        join = supers.size() - 1;
      }
      SuperTable& st = supers[*join];
      const auto tag = st.members.empty() ? 0U : st.members.back().tag + 1;
      st.members.push_back({tag, kNoTable});
      if (!grow(*join)) return std::nullopt;
      slots.push_back({*join, tag});
      continue;
    }
    const TreeTable& tab = tree_.table(step.table);
    if (tab.kind() == TableKind::kTcam) {
      if (!grow(membership_[step.table].super_table)) return std::nullopt;
      continue;
    }
    // SRAM table: re-expand with the new key and charge the page delta.
    const int key_length = std::max(tab.max_entry_length(), step.length);
    if (cfg_.hybrid && cfg_.hybrid->tag_bits + key_length + cfg_.hybrid->value_bits > page.width) return std::nullopt;
    std::vector<LocalPrefix> items;
    items.reserve(tab.size() + 1);
    for (const auto& e : tab.entries()) items.push_back({e.key, e.length, 0});
    items.push_back({step.key, step.length, 0});
    const std::uint64_t expanded = count_expanded(items, key_length);
    auto pool = std::find_if(pools.begin(), pools.end(), [&](const SramPool& p) { return p.level == step.level; });
    if (pool == pools.end()) {
      pools.push_back({step.level, 0, 0});
      plan.sram.emplace_back();
      plan.sram_levels.push_back(step.level);
      pool = pools.end() - 1;
    }
    // Entries are synced when the image is rebuilt; only pages are reserved here.
    const std::uint64_t entries = pool->entries + expanded - tab.sram_size();
    const std::int64_t pages = ceil_div64(static_cast<std::int64_t>(entries), page.depth);
    if (pages > pool->pages) {
      auto index = static_cast<std::size_t>(pool - pools.begin());
      if (!allocate(plan, step.level, plan.sram[index], false, pages - pool->pages)) return std::nullopt;
      pool->pages = pages;
    }
  }
  plan_ = std::move(plan);
  super_tables_ = std::move(supers);
  pools_ = std::move(pools);
  return slots;
}

void LookupState::after_table_change(TableId id) {
  tree_.refresh_inherited(id);
  const TreeTable& tab = tree_.table(id);
  if (tab.kind() == TableKind::kSram) {
    const std::uint64_t before = tab.sram_size();
    const std::uint64_t after = convert_to_sram(tree_, id);
    for (auto& pool : pools_) {
      if (pool.level == tab.level()) pool.entries = pool.entries + after - before;
    }
    return;
  }
  const Membership& m = membership_[id];
  if (m.super_table == SIZE_MAX) return;
  SuperTable& st = super_tables_[m.super_table];
  st.total_entries = 0;
  for (const auto& member : st.members) {
    if (member.table != kNoTable) st.total_entries += static_cast<std::int64_t>(tree_.table(member.table).size());
  }
}

void LookupState::apply_insert(const Prefix& p, const std::vector<Slot>& slots) {
  const std::uint32_t label = tree_.intern(p.next_hop);
  const std::uint64_t seq = next_seq_++;
  const StrideList& strides = tree_.strides();
  std::size_t next_slot = 0;
  TableId t = tree_.root();
  int offset = 0;
  for (int level = 0;; ++level) {
    const int stride = strides.stride(level);
    const int local = p.length - offset;
    TreeTable& tab = tree_.mutable_table(t);
    if (local <= stride) {
      const std::uint64_t key = extract_bits(p.bits, p.length, offset, local);
      if (auto pos = tab.find(key, local)) {
        TableEntry& e = tab.mutable_entry(*pos);
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
        e.seq = seq;
        tab.insert(e);
      }
      after_table_change(t);
      return;
    }
    const std::uint64_t key = extract_bits(p.bits, p.length, offset, stride);
    bool changed = false;
    std::size_t pos = 0;
    if (auto found = tab.find(key, stride)) {
      pos = *found;
    } else {
      TableEntry stub;
      stub.key = key;
      stub.length = stride;
      stub.seq = seq;
      pos = tab.insert(stub);
      changed = true;
    }
    TableId child = tab.entry(pos).child;
    if (child == kNoTable) {
      child = tree_.add_table(level + 1, t);
      tree_.mutable_table(t).mutable_entry(pos).child = child;
      membership_.resize(tree_.table_count());
      detached_.resize(tree_.table_count(), false);
      const Slot& slot = slots.at(next_slot++);
      for (auto& m : super_tables_[slot.super_table].members) {
        if (m.tag == slot.tag && m.table == kNoTable) m.table = child;
      }
      membership_[child] = {slot.super_table, slot.tag};
      changed = true;
    }
    if (changed) after_table_change(t);
    t = child;
    offset += stride;
  }
}

void LookupState::place_in_overflow(const Prefix& p) {
  if (overflow_.entries.size() >= overflow_.capacity) {
    throw Error(Errc::kOverflowFull, "overflow buffer is full (" + std::to_string(overflow_.capacity) +
                                         " entries); " + p.bitstring() + "/" + std::to_string(p.length) +
                                         " needs a reconfiguration");
  }
  overflow_.entries.push_back(p);
  overflow_labels_.push_back(tree_.intern(p.next_hop));
}

InsertOutcome LookupState::insert_prefix(const Prefix& prefix) {
  if (prefix.length < 0 || prefix.length > tree_.address_width()) {
    throw Error(Errc::kLengthOutOfRange, "length " + std::to_string(prefix.length) + " outside 0.." +
                                             std::to_string(tree_.address_width()));
  }
  Prefix p = prefix;
  p.bits &= low_mask(p.length);
  if (contains(p.bits, p.length)) {
    throw Error(Errc::kDuplicatePrefix, p.bitstring() + "/" + std::to_string(p.length) + " is already stored");
  }
  if (p.length > tree_.strides().coverage()) {
    place_in_overflow(p);
    return InsertOutcome::kOverflow;
  }
  auto slots = reserve(plan_insert(p));
  if (!slots) {
    place_in_overflow(p);
    return InsertOutcome::kOverflow;
  }
  apply_insert(p, *slots);
  return InsertOutcome::kTree;
}

void LookupState::delete_prefix(std::uint64_t bits, int length) {
  if (length >= 0 && length <= tree_.address_width()) {
    bits &= low_mask(length);
    if (auto i = overflow_.find(bits, length)) {
      overflow_.entries.erase(overflow_.entries.begin() + static_cast<std::ptrdiff_t>(*i));
      overflow_labels_.erase(overflow_labels_.begin() + static_cast<std::ptrdiff_t>(*i));
      return;
    }
    TableId t = kNoTable;
    if (auto pos = find_terminal(&t, bits, length)) {
      TreeTable& tab = tree_.mutable_table(t);
      if (tab.entry(*pos).is_stub()) {
        tab.mutable_entry(*pos).terminal = false;  // back to a plain stub
      } else {
        tab.erase(*pos);
      }
      after_table_change(t);
      return;
    }
  }
  throw Error(Errc::kNotFound, to_bitstring(bits, std::max(length, 0)) + "/" + std::to_string(length) + " is not stored");
}

std::size_t LookupState::collect_garbage() {
  std::size_t removed = 0;
  for (bool changed = true; changed;) {
    changed = false;
    // Children are created after their parents, so walking ids downwards
    // clears whole empty chains in one pass.
    for (TableId id = static_cast<TableId>(tree_.table_count()) - 1; id > 0; --id) {
      if (detached_[id] || !tree_.table(id).empty()) continue;
      const TableId parent = tree_.table(id).parent();
      TreeTable& ptab = tree_.mutable_table(parent);
      for (std::size_t i = 0; i < ptab.size(); ++i) {
        if (ptab.entry(i).child != id) continue;
        if (ptab.entry(i).terminal) {
          ptab.mutable_entry(i).child = kNoTable;
          ptab.mutable_entry(i).child_sram = false;
        } else {
          ptab.erase(i);
        }
        break;
      }
      Membership& m = membership_[id];
      if (m.super_table != SIZE_MAX) {
        auto& members = super_tables_[m.super_table].members;
        std::erase_if(members, [&](const SuperTableMember& x) { return x.table == id; });
        m = {};
      }
      detached_[id] = true;
      after_table_change(parent);
      ++removed;
      changed = true;
    }
  }
  return removed;
}

bool LookupState::inject_fault() {
  TableId best_table = kNoTable;
  std::size_t best_pos = 0;
  int best_length = -1;
  for (TableId id = 0; id < tree_.table_count(); ++id) {
    if (detached_[id]) continue;
    const TreeTable& tab = tree_.table(id);
    for (std::size_t i = 0; i < tab.size(); ++i) {
      const TableEntry& e = tab.entry(i);
      if (e.terminal && e.value_length > best_length) {
        best_table = id;
        best_pos = i;
        best_length = e.value_length;
      }
    }
  }
  const std::uint32_t fault = tree_.intern("__fault__");
  if (best_table != kNoTable) {
    tree_.mutable_table(best_table).mutable_entry(best_pos).value = fault;
    after_table_change(best_table);
    return true;
  }
  if (!overflow_labels_.empty()) {
    overflow_labels_.front() = fault;
    return true;
  }
  return false;
}

std::uint64_t LookupState::sram_entries() const {
  std::uint64_t total = 0;
  for (TableId id = 0; id < tree_.table_count(); ++id) {
    if (!detached_[id] && tree_.table(id).kind() == TableKind::kSram) total += tree_.table(id).sram_size();
  }
  return total;
}

std::int64_t LookupState::tcam_blocks() const {
  std::int64_t total = 0;
  for (const auto& st : super_tables_) total += st.block_count;
  return total;
}

}  // namespace tcamtree
