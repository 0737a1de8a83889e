// Copyright 2026 The tcamtree Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tcamtree/prefixdb.hpp"
#include "tcamtree/rational.hpp"

namespace tcamtree {

// Unibit (binary) trie over a prefix database. Nodes live in an arena; node 0
// is the root. Only nodes on the path to some stored prefix exist.
class UnibitTrie {
 public:
  static constexpr std::uint32_t kNone = 0xFFFFFFFFU;

  struct Node {
    std::array<std::uint32_t, 2> children{kNone, kNone};
    std::uint32_t entry = kNone;  // database index of the prefix ending here
    int depth = 0;

    bool has_children() const { return children[0] != kNone || children[1] != kNone; }
  };

  explicit UnibitTrie(const PrefixDatabase& db);

  const Node& root() const { return nodes_.front(); }
  const Node& node(std::uint32_t id) const { return nodes_[id]; }
  std::size_t node_count() const { return nodes_.size(); }
  int address_width() const { return db_->address_width(); }

  // Deepest stored entry along the address path.
  std::optional<std::size_t> match(Address address) const;
  std::string lookup(Address address) const;

  // Node reached by following `bits` (length `length`), if it exists.
  std::optional<std::uint32_t> find(std::uint64_t bits, int length) const;

 private:
  const PrefixDatabase* db_;
  std::vector<Node> nodes_;
};

struct LeanLevel {
  int depth = 0;
  std::int64_t nonleaf_count = 0;
  std::int64_t n = 0;

  // 100 * nonleaf / N, exact.
  Rational b_percent() const { return Rational(100 * nonleaf_count, n); }
  // Pointer waste plus packing waste bound, 2b.
  Rational worst_overhead_percent() const { return 2 * b_percent(); }
};

// Per-depth non-leaf counts, depth 0 .. address width.
class LeanLevelTable {
 public:
  LeanLevelTable() = default;
  LeanLevelTable(std::vector<std::int64_t> nonleaf_counts, std::int64_t n);

  std::int64_t n() const { return n_; }
  int max_depth() const { return static_cast<int>(nonleaf_.size()) - 1; }
  std::int64_t nonleaf_count(int depth) const;
  LeanLevel level(int depth) const;
  // True when depth is an L(b): nonleaf(depth) <= N * b / 100.
  bool is_lean(int depth, const Rational& b_percent) const;

  // CSV rows `level,b_percent,worst_overhead_percent` for depths
  // [first, last], two decimals, with header.
  std::string to_csv(int first, int last) const;

 private:
  std::vector<std::int64_t> nonleaf_;
  std::int64_t n_ = 0;
};

LeanLevelTable compute_lean_levels(const UnibitTrie& trie, std::int64_t n);

// A prefix local to one table: `length` bits of `bits`, tagged with a
// caller-defined payload index.
struct LocalPrefix {
  std::uint64_t bits = 0;
  int length = 0;
  std::uint32_t payload = 0;
};

struct ExpandedKey {
  std::uint64_t key = 0;
  std::uint32_t payload = 0;
  friend bool operator==(const ExpandedKey&, const ExpandedKey&) = default;
};

// Controlled prefix expansion to `target_length` bits. Every key covered by
// some input receives the payload of the longest covering input; the result
// is sorted by key. Inputs must have distinct (bits, length).
// Throws kTargetTooShort if any input is longer than the target.
std::vector<ExpandedKey> expand_prefixes(std::span<const LocalPrefix> prefixes, int target_length);

// Size of expand_prefixes(prefixes, target_length) without materializing it.
std::uint64_t count_expanded(std::span<const LocalPrefix> prefixes, int target_length);

}  // namespace tcamtree
