// Copyright 2026 The tcamtree Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "tcamtree/bits.hpp"
#include "tcamtree/rational.hpp"

namespace tcamtree {

inline constexpr std::string_view kDefaultNextHop = "default";

struct Prefix {
  std::uint64_t bits = 0;  // low `length` bits
  int length = 0;
  std::string next_hop;

  bool matches(Address address, int address_width) const {
    return length == 0 || leading_bits(address, address_width, length) == bits;
  }
  std::string bitstring() const { return to_bitstring(bits, length); }

  friend bool operator==(const Prefix&, const Prefix&) = default;
};

struct PrefixKey {
  std::uint64_t bits = 0;
  int length = 0;
  friend bool operator==(const PrefixKey&, const PrefixKey&) = default;
};

struct PrefixKeyHash {
  std::size_t operator()(const PrefixKey& k) const noexcept {
    return std::hash<std::uint64_t>{}(k.bits * 0x9E3779B97F4A7C15ULL + static_cast<unsigned>(k.length));
  }
};

// An immutable, duplicate-free routing table in file order.
class PrefixDatabase {
 public:
  explicit PrefixDatabase(int address_width = 32);

  // Throws kDuplicatePrefix / kLengthOutOfRange / kInvalidArgument.
  void add(Prefix prefix);

  int address_width() const { return address_width_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::span<const Prefix> entries() const { return entries_; }
  const Prefix& operator[](std::size_t i) const { return entries_[i]; }

  bool contains(std::uint64_t bits, int length) const;
  std::optional<std::size_t> find(std::uint64_t bits, int length) const;
  int max_length() const;

 private:
  int address_width_;
  std::vector<Prefix> entries_;
  std::unordered_map<PrefixKey, std::size_t, PrefixKeyHash> index_;
};

struct ParseOptions {
  // Entries longer than the address width are skipped instead of rejected.
  bool drop_longer = false;
};

// Canonical text: one `<bits-or-address>/<len> <next_hop>` per line, `#`
// comments, LF or CRLF. The address part is a bit string ([01*]), an IPv4
// dotted quad (width 32) or an IPv6 address (width 64, first 64 bits kept).
PrefixDatabase parse_database(std::string_view text, int address_width, const ParseOptions& options = {});
PrefixDatabase load_database(const std::string& path, int address_width, const ParseOptions& options = {});

// Emits `<bits>/<len> <next_hop>` lines, LF terminated.
std::string serialize_database(const PrefixDatabase& db);

// Parses one address (binary string of exactly `address_width` bits, dotted
// IPv4, or IPv6) for trace replay.
Address parse_address(std::string_view text, int address_width);
std::string format_address(Address address, int address_width);

// Reference longest-prefix match: a plain scan for the longest covering entry.
std::optional<std::size_t> oracle_match(const PrefixDatabase& db, Address address);
std::string oracle_lookup(const PrefixDatabase& db, Address address);

// Hash-per-length LPM used for bulk verification of large address sets.
class LpmIndex {
 public:
  explicit LpmIndex(const PrefixDatabase& db);

  std::optional<std::size_t> match(Address address) const;
  std::string lookup(Address address) const;

 private:
  const PrefixDatabase* db_;
  std::vector<int> lengths_;  // descending
  std::vector<std::unordered_map<std::uint64_t, std::size_t>> by_length_;
};

struct MaxThreshold {
  int length = 0;  // M
  Rational coverage{99, 100};
};

inline const Rational kDefaultCoverage{99, 100};

MaxThreshold max_threshold_length(const PrefixDatabase& db, const Rational& coverage = kDefaultCoverage);

}  // namespace tcamtree
