// Copyright 2026 The tcamtree Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "support/reference.hpp"
#include "tcamtree/error.hpp"
#include "tcamtree/trie.hpp"

namespace tcamtree {
namespace {

PrefixDatabase six_routes() {
  return parse_database("1/1 A\n1000/4 B\n10001/5 C\n10010/5 D\n100110/6 E\n100111/6 F\n", 6);
}

TEST(UnibitTrie, SixRoutesShape) {
  PrefixDatabase db = six_routes();
  UnibitTrie trie(db);
  auto one = trie.find(0b1, 1);
  ASSERT_TRUE(one);
  EXPECT_EQ(db[trie.node(*one).entry].next_hop, "A");
  for (const Prefix& p : db.entries()) {
    auto n = trie.find(p.bits, p.length);
    ASSERT_TRUE(n);
    EXPECT_EQ(trie.node(*n).depth, p.length);
  }
  // Leaves at depths 5 and 6.
  EXPECT_FALSE(trie.node(*trie.find(0b10001, 5)).has_children());
  EXPECT_FALSE(trie.node(*trie.find(0b100111, 6)).has_children());
  // No dead nodes: 1, 10, 100, 1000, 1001, 10001, 10010, 10011, 100110, 100111 plus the root.
  EXPECT_EQ(trie.node_count(), 11U);
}

TEST(UnibitTrie, EmptyAndZeroLength) {
  PrefixDatabase empty(6);
  UnibitTrie t0(empty);
  EXPECT_EQ(t0.node_count(), 1U);
  EXPECT_FALSE(t0.root().has_children());
  EXPECT_EQ(t0.root().entry, UnibitTrie::kNone);

  PrefixDatabase zero = parse_database("/0 X\n", 6);
  UnibitTrie t1(zero);
  EXPECT_EQ(t1.node_count(), 1U);
  EXPECT_EQ(t1.lookup(0b010101), "X");
}

TEST(UnibitTrie, LookupMatchesReference) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    auto routes = reference::random_routes(rng, 12, 200, 0, 12);
    PrefixDatabase db = reference::database_of(routes, 12);
    UnibitTrie trie(db);
    auto expected = reference::lpm_table(routes, 12);
    for (Address a = 0; a < 4096; ++a) ASSERT_EQ(trie.lookup(a), expected[a]);
  }
}

TEST(LeanLevels, SixRoutes) {
  PrefixDatabase db = six_routes();
  LeanLevelTable lean = compute_lean_levels(UnibitTrie(db), 6);
  EXPECT_EQ(lean.nonleaf_count(3), 1);
  EXPECT_EQ(lean.level(3).b_percent(), Rational(50, 3));
  EXPECT_EQ(lean.level(3).worst_overhead_percent(), Rational(100, 3));
  EXPECT_EQ(lean.nonleaf_count(6), 0);
  EXPECT_EQ(lean.level(6).b_percent(), Rational(0));
  EXPECT_EQ(lean.nonleaf_count(4), 2);  // 1000 and 1001
  EXPECT_EQ(lean.nonleaf_count(0), 1);
  EXPECT_TRUE(lean.is_lean(3, Rational(17)));
  EXPECT_FALSE(lean.is_lean(3, Rational(16)));
  EXPECT_THROW(lean.nonleaf_count(7), Error);
}

TEST(LeanLevels, Csv) {
  PrefixDatabase db = six_routes();
  std::string csv = compute_lean_levels(UnibitTrie(db), 6).to_csv(1, 6);
  EXPECT_EQ(csv,
            "level,b_percent,worst_overhead_percent\n"
            "1,16.67,33.33\n2,16.67,33.33\n3,16.67,33.33\n4,33.33,66.67\n5,16.67,33.33\n6,0.00,0.00\n");
}

TEST(LeanLevels, MatchesReferenceCounts) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    auto routes = reference::random_routes(rng, 16, 500, 1, 16);
    PrefixDatabase db = reference::database_of(routes, 16);
    LeanLevelTable lean = compute_lean_levels(UnibitTrie(db), static_cast<std::int64_t>(db.size()));
    for (int h = 0; h <= 16; ++h) {
      const std::int64_t expected = reference::nonleaf_at(routes, h);
      ASSERT_EQ(lean.nonleaf_count(h), expected) << h;
      EXPECT_LE(lean.nonleaf_count(h), std::min<std::int64_t>(std::int64_t{1} << h, static_cast<std::int64_t>(db.size())));
    }
    EXPECT_LE(lean.nonleaf_count(0), 1);
  }
}

TEST(LeanLevels, EmptyRejected) {
  EXPECT_THROW(LeanLevelTable({0}, 0), Error);
}

std::vector<LocalPrefix> locals(std::initializer_list<std::pair<const char*, std::uint32_t>> items) {
  std::vector<LocalPrefix> out;
  for (auto [bits, payload] : items) {
    std::string s(bits);
    out.push_back({reference::parse_bits(s), static_cast<int>(s.size()), payload});
  }
  return out;
}

TEST(Expansion, LongerPrefixWinsCollision) {
  // Sample routes (1000, B) and (10001, C) at length 6.
  auto out = expand_prefixes(locals({{"1000", 0}, {"10001", 1}}), 6);
  ASSERT_EQ(out.size(), 4U);
  EXPECT_EQ(out[0], (ExpandedKey{0b100000, 0}));
  EXPECT_EQ(out[1], (ExpandedKey{0b100001, 0}));
  EXPECT_EQ(out[2], (ExpandedKey{0b100010, 1}));
  EXPECT_EQ(out[3], (ExpandedKey{0b100011, 1}));
}

TEST(Expansion, PureExpansion) {
  auto out = expand_prefixes(locals({{"0", 7}}), 3);
  std::vector<ExpandedKey> want{{0, 7}, {1, 7}, {2, 7}, {3, 7}};
  EXPECT_EQ(out, want);
}

TEST(Expansion, SixRoutesChildNode) {
  // 0**->B, 01*->C, 10*->D, 110->E, 111->F
  auto out = expand_prefixes(locals({{"0", 0}, {"01", 1}, {"10", 2}, {"110", 3}, {"111", 4}}), 3);
  std::vector<ExpandedKey> want{{0, 0}, {1, 0}, {2, 1}, {3, 1}, {4, 2}, {5, 2}, {6, 3}, {7, 4}};
  EXPECT_EQ(out, want);
  EXPECT_EQ(count_expanded(locals({{"0", 0}, {"01", 1}, {"10", 2}, {"110", 3}, {"111", 4}}), 3), 8U);
}

TEST(Expansion, TargetTooShort) {
  try {
    expand_prefixes(locals({{"0101", 0}}), 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kTargetTooShort);
  }
}

TEST(Expansion, MatchesBruteForce) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const int target = 1 + static_cast<int>(rng() % 10);
    auto routes = reference::random_routes(rng, target, 1 + rng() % 20, 0, target);
    std::vector<LocalPrefix> in;
    std::vector<std::pair<std::string, std::size_t>> ref;
    for (std::size_t i = 0; i < routes.size(); ++i) {
      in.push_back({reference::parse_bits(routes[i].bits), static_cast<int>(routes[i].bits.size()),
                    static_cast<std::uint32_t>(i)});
      ref.emplace_back(routes[i].bits, i);
    }
    auto expected = reference::expand(ref, target);
    auto out = expand_prefixes(in, target);
    ASSERT_EQ(out.size(), expected.size());
    EXPECT_EQ(count_expanded(in, target), expected.size());
    std::size_t i = 0;
    for (const auto& [key, payload] : expected) {
      EXPECT_EQ(out[i].key, key);
      EXPECT_EQ(out[i].payload, payload);
      ++i;
    }
  }
}

}  // namespace
}  // namespace tcamtree
