// Copyright 2026 The tcamtree Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "support/reference.hpp"
#include "tcamtree/error.hpp"
#include "tcamtree/prefixdb.hpp"

namespace tcamtree {
namespace {

const char* kSixRoutes =
    "100000/1 A\n"
    "1000**/4 B\n"
    "10001*/5 C\n"
    "10010*/5 D\n"
    "100110/6 E\n"
    "100111/6 F\n";

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return Errc::kInvalidArgument;
}

TEST(ParseDatabase, SixRoutes) {
  PrefixDatabase db = parse_database(kSixRoutes, 6);
  ASSERT_EQ(db.size(), 6U);
  EXPECT_EQ(db[0].bits, 1U);
  EXPECT_EQ(db[0].length, 1);
  EXPECT_EQ(db[1].bitstring(), "1000");
  EXPECT_EQ(db[5].bitstring(), "100111");
  EXPECT_EQ(db[5].next_hop, "F");
  EXPECT_EQ(db.max_length(), 6);
}

TEST(ParseDatabase, EmptyInput) {
  EXPECT_TRUE(parse_database("", 6).empty());
  EXPECT_TRUE(parse_database("# only a comment\n\n", 6).empty());
}

TEST(ParseDatabase, Errors) {
  EXPECT_EQ(code_of([] { parse_database("1000/4 B\n1000/4 B\n", 6); }), Errc::kDuplicatePrefix);
  EXPECT_EQ(code_of([] { parse_database("1/7 A\n", 6); }), Errc::kLengthOutOfRange);
  EXPECT_EQ(code_of([] { parse_database("1000/4\n", 6); }), Errc::kMalformedLine);
  EXPECT_EQ(code_of([] { parse_database("10*0/4 B\n", 6); }), Errc::kMalformedLine);
  EXPECT_EQ(code_of([] { parse_database("10/4 B\n", 6); }), Errc::kMalformedLine);
  try {
    parse_database("1/1 A\nbogus\n", 6);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

TEST(ParseDatabase, CrlfAndComments) {
  PrefixDatabase db = parse_database("# header\r\n1/1 A  # trailing\r\n\r\n0/1 B\r\n", 6);
  ASSERT_EQ(db.size(), 2U);
  EXPECT_EQ(db[1].next_hop, "B");
}

TEST(ParseDatabase, DottedNotation) {
  PrefixDatabase v4 = parse_database("10.0.0.0/8 A\n192.168.1.0/24 B\n0.0.0.0/0 C\n", 32);
  EXPECT_EQ(v4[0].bits, 10U);
  EXPECT_EQ(v4[1].bits, 0xC0A801U);
  EXPECT_EQ(v4[2].length, 0);
  PrefixDatabase v6 = parse_database("2001:db8::/32 X\n", 64);
  EXPECT_EQ(v6[0].bits, 0x20010DB8U);
  EXPECT_EQ(code_of([] { parse_database("10.0.0.0/8 A\n", 64); }), Errc::kMalformedLine);
  EXPECT_EQ(code_of([] { parse_database("2001:db8::/96 X\n", 64); }), Errc::kLengthOutOfRange);
  EXPECT_TRUE(parse_database("2001:db8::/96 X\n", 64, ParseOptions{true}).empty());
}

TEST(ParseDatabase, SerializeRoundTrip) {
  PrefixDatabase db = parse_database(kSixRoutes, 6);
  std::string text = serialize_database(db);
  EXPECT_EQ(text.substr(0, 6), "1/1 A\n");
  PrefixDatabase again = parse_database(text, 6);
  EXPECT_EQ(serialize_database(again), text);
  ASSERT_EQ(again.size(), db.size());
  for (std::size_t i = 0; i < db.size(); ++i) EXPECT_EQ(again[i], db[i]);
}

TEST(Oracle, SixRoutesLookups) {
  PrefixDatabase db = parse_database(kSixRoutes, 6);
  EXPECT_EQ(oracle_lookup(db, 0b100110), "E");
  EXPECT_EQ(oracle_lookup(db, 0b111111), "A");
  EXPECT_EQ(oracle_lookup(db, 0b011111), "default");
  EXPECT_EQ(oracle_lookup(db, 0b100011), "C");
}

TEST(Oracle, AgreesWithReferenceOnRandomDatabases) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int width = 8 + trial % 5;
    auto routes = reference::random_routes(rng, width, 60, 0, width);
    PrefixDatabase db = reference::database_of(routes, width);
    auto expected = reference::lpm_table(routes, width);
    LpmIndex index(db);
    for (Address a = 0; a < (Address{1} << width); ++a) {
      ASSERT_EQ(oracle_lookup(db, a), expected[a]);
      ASSERT_EQ(index.lookup(a), expected[a]);
    }
  }
}

TEST(MaxThreshold, Examples) {
  PrefixDatabase db = parse_database(kSixRoutes, 6);
  EXPECT_EQ(max_threshold_length(db, Rational(1)).length, 6);
  EXPECT_EQ(max_threshold_length(db, Rational(1, 2)).length, 5);
  PrefixDatabase zero = parse_database("/0 X\n", 6);
  EXPECT_EQ(max_threshold_length(zero).length, 0);
  EXPECT_EQ(code_of([] { max_threshold_length(PrefixDatabase(6)); }), Errc::kEmptyDatabase);
}

TEST(MaxThreshold, MonotoneAndMinimal) {
  std::mt19937_64 rng(11);
  auto routes = reference::random_routes(rng, 16, 300, 0, 16);
  PrefixDatabase db = reference::database_of(routes, 16);
  int prev = 0;
  for (int pct = 1; pct <= 100; ++pct) {
    Rational cov(pct, 100);
    int m = max_threshold_length(db, cov).length;
    EXPECT_GE(m, prev);
    prev = m;
    // smallest M with count(len <= M) * 100 >= pct * N
    int expected = 0;
    while (true) {
      std::size_t count = 0;
      for (const auto& r : routes) count += static_cast<int>(r.bits.size()) <= expected ? 1 : 0;
      if (count * 100 >= static_cast<std::size_t>(pct) * routes.size()) break;
      ++expected;
    }
    EXPECT_EQ(m, expected) << pct;
  }
}

TEST(Addresses, ParseAndFormat) {
  EXPECT_EQ(parse_address("100110", 6), 0b100110U);
  EXPECT_EQ(format_address(0b000101, 6), "000101");
  EXPECT_EQ(parse_address("10.1.2.3", 32), 0x0A010203U);
  EXPECT_EQ(code_of([] { parse_address("101", 6); }), Errc::kMalformedLine);
}

}  // namespace
}  // namespace tcamtree
