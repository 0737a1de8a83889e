// Copyright 2026 The tcamtree Authors
// SPDX-License-Identifier: Apache-2.0

#include "tcamtree/trie.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "tcamtree/error.hpp"

namespace tcamtree {

UnibitTrie::UnibitTrie(const PrefixDatabase& db) : db_(&db) {
  nodes_.emplace_back();
  for (std::size_t i = 0; i < db.size(); ++i) {
    const Prefix& p = db[i];
    std::uint32_t cur = 0;
    for (int d = 0; d < p.length; ++d) {
      unsigned bit = (p.bits >> (p.length - 1 - d)) & 1U;
      if (nodes_[cur].children[bit] == kNone) {
        Node child;
        child.depth = d + 1;
        nodes_[cur].children[bit] = static_cast<std::uint32_t>(nodes_.size());
        nodes_.push_back(child);
      }
      cur = nodes_[cur].children[bit];
    }
    nodes_[cur].entry = static_cast<std::uint32_t>(i);
  }
}

std::optional<std::size_t> UnibitTrie::match(Address address) const {
  const int width = db_->address_width();
  std::optional<std::size_t> best;
  std::uint32_t cur = 0;
  for (int d = 0;; ++d) {
    if (nodes_[cur].entry != kNone) best = nodes_[cur].entry;
    if (d == width) break;
    unsigned bit = (address >> (width - 1 - d)) & 1U;
    std::uint32_t next = nodes_[cur].children[bit];
    if (next == kNone) break;
    cur = next;
  }
  return best;
}

std::string UnibitTrie::lookup(Address address) const {
  auto m = match(address);
  return m ? (*db_)[*m].next_hop : std::string(kDefaultNextHop);
}

std::optional<std::uint32_t> UnibitTrie::find(std::uint64_t bits, int length) const {
  std::uint32_t cur = 0;
  for (int d = 0; d < length; ++d) {
    unsigned bit = (bits >> (length - 1 - d)) & 1U;
    cur = nodes_[cur].children[bit];
    if (cur == kNone) return std::nullopt;
  }
  return cur;
}

LeanLevelTable::LeanLevelTable(std::vector<std::int64_t> nonleaf_counts, std::int64_t n)
    : nonleaf_(std::move(nonleaf_counts)), n_(n) {
  if (n_ < 1) throw Error(Errc::kEmptyDatabase, "lean levels need N >= 1");
}

std::int64_t LeanLevelTable::nonleaf_count(int depth) const {
  if (depth < 0 || depth > max_depth()) {
    throw Error(Errc::kLevelOutOfRange, "level " + std::to_string(depth) + " not in lean table");
  }
  return nonleaf_[static_cast<std::size_t>(depth)];
}

LeanLevel LeanLevelTable::level(int depth) const { return LeanLevel{depth, nonleaf_count(depth), n_}; }

bool LeanLevelTable::is_lean(int depth, const Rational& b_percent) const {
  return Rational(100 * nonleaf_count(depth)) <= b_percent * n_;
}

std::string LeanLevelTable::to_csv(int first, int last) const {
  std::ostringstream out;
  out << "level,b_percent,worst_overhead_percent\n";
  for (int d = first; d <= last; ++d) {
    LeanLevel l = level(d);
    out << d << ',' << format_fixed(l.b_percent(), 2) << ',' << format_fixed(l.worst_overhead_percent(), 2) << '\n';
  }
  return out.str();
}

LeanLevelTable compute_lean_levels(const UnibitTrie& trie, std::int64_t n) {
  std::vector<std::int64_t> counts(static_cast<std::size_t>(trie.address_width()) + 1, 0);
  for (std::size_t i = 0; i < trie.node_count(); ++i) {
    const auto& node = trie.node(static_cast<std::uint32_t>(i));
    if (node.has_children()) ++counts[static_cast<std::size_t>(node.depth)];
  }
  return LeanLevelTable(std::move(counts), n);
}

namespace {

using u128 = unsigned __int128;

struct Interval {
  u128 start;
  u128 end;
  int length;
  std::uint32_t payload;
};

// Walks the laminar family of prefix ranges in key order and reports every
// maximal run of keys together with its innermost (longest) covering input.
template <typename Emit>
void sweep(std::span<const LocalPrefix> prefixes, int target_length, Emit&& emit) {
  if (target_length < 0 || target_length > 64) {
    throw Error(Errc::kInvalidArgument, "expansion target must be in [0, 64]");
  }
  std::vector<Interval> items;
  items.reserve(prefixes.size());
  for (const auto& p : prefixes) {
    if (p.length > target_length) {
      throw Error(Errc::kTargetTooShort, "prefix of length " + std::to_string(p.length) +
                                            " cannot expand to " + std::to_string(target_length) + " bits");
    }
    int shift = target_length - p.length;
    u128 start = static_cast<u128>(p.bits & low_mask(p.length)) << shift;
    items.push_back(Interval{start, start + (static_cast<u128>(1) << shift), p.length, p.payload});
  }
  std::stable_sort(items.begin(), items.end(), [](const Interval& a, const Interval& b) {
    return a.start != b.start ? a.start < b.start : a.length < b.length;
  });

  std::vector<const Interval*> stack;
  u128 cursor = 0;
  for (const auto& item : items) {
    while (!stack.empty() && stack.back()->end <= item.start) {
      if (cursor < stack.back()->end) emit(cursor, stack.back()->end, stack.back()->payload);
      cursor = std::max(cursor, stack.back()->end);
      stack.pop_back();
    }
    if (!stack.empty() && cursor < item.start) emit(cursor, item.start, stack.back()->payload);
    cursor = std::max(cursor, item.start);
    stack.push_back(&item);
  }
  while (!stack.empty()) {
    if (cursor < stack.back()->end) emit(cursor, stack.back()->end, stack.back()->payload);
    cursor = std::max(cursor, stack.back()->end);
    stack.pop_back();
  }
}

}  // namespace

std::vector<ExpandedKey> expand_prefixes(std::span<const LocalPrefix> prefixes, int target_length) {
  std::vector<ExpandedKey> out;
  sweep(prefixes, target_length, [&](u128 from, u128 to, std::uint32_t payload) {
    for (u128 k = from; k < to; ++k) out.push_back(ExpandedKey{static_cast<std::uint64_t>(k), payload});
  });
  return out;
}

std::uint64_t count_expanded(std::span<const LocalPrefix> prefixes, int target_length) {
  u128 total = 0;
  sweep(prefixes, target_length, [&](u128 from, u128 to, std::uint32_t) { total += to - from; });
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  return total > kMax ? kMax : static_cast<std::uint64_t>(total);
}

}  // namespace tcamtree
