// Copyright 2026 The tcamtree Authors
// SPDX-License-Identifier: Apache-2.0

#include "tcamtree/prefixdb.hpp"

#include <arpa/inet.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "tcamtree/error.hpp"

namespace tcamtree {
namespace {

constexpr std::string_view kSpace = " \t\r\n";

std::string_view trim(std::string_view s) {
  auto b = s.find_first_not_of(kSpace);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(kSpace);
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    i = s.find_first_not_of(kSpace, i);
    if (i == std::string_view::npos) break;
    auto j = s.find_first_of(kSpace, i);
    if (j == std::string_view::npos) j = s.size();
    out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_uint(std::string_view s, int& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size() && out >= 0;
}

// Parsed address text: the leading `available` bits, left-aligned in `bits`
// as a value of width `available`.
struct AddressText {
  std::uint64_t bits = 0;
  int available = 0;
};

std::optional<AddressText> parse_ipv4(std::string_view s) {
  std::string tmp(s);
  in_addr addr{};
  if (inet_pton(AF_INET, tmp.c_str(), &addr) != 1) return std::nullopt;
  return AddressText{ntohl(addr.s_addr), 32};
}

std::optional<AddressText> parse_ipv6(std::string_view s) {
  std::string tmp(s);
  std::array<unsigned char, 16> raw{};
  if (inet_pton(AF_INET6, tmp.c_str(), raw.data()) != 1) return std::nullopt;
  std::uint64_t hi = 0;
  for (int i = 0; i < 8; ++i) hi = (hi << 8) | raw[static_cast<std::size_t>(i)];
  return AddressText{hi, 64};
}

[[noreturn]] void fail_line(Errc code, std::size_t line_no, const std::string& what) {
  throw Error(code, "line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

PrefixDatabase::PrefixDatabase(int address_width) : address_width_(address_width) {
  if (address_width < 1 || address_width > kMaxAddressWidth) {
    throw Error(Errc::kInvalidArgument, "address width must be in [1, 64], got " + std::to_string(address_width));
  }
}

void PrefixDatabase::add(Prefix prefix) {
  if (prefix.length < 0 || prefix.length > address_width_) {
    throw Error(Errc::kLengthOutOfRange, "prefix length " + std::to_string(prefix.length) +
                                             " outside [0, " + std::to_string(address_width_) + "]");
  }
  if (prefix.next_hop.empty()) throw Error(Errc::kInvalidArgument, "empty next hop");
  prefix.bits &= low_mask(prefix.length);
  PrefixKey key{prefix.bits, prefix.length};
  if (index_.contains(key)) {
    throw Error(Errc::kDuplicatePrefix, prefix.bitstring() + "/" + std::to_string(prefix.length));
  }
  index_.emplace(key, entries_.size());
  entries_.push_back(std::move(prefix));
}

bool PrefixDatabase::contains(std::uint64_t bits, int length) const {
  return index_.contains(PrefixKey{bits & low_mask(length), length});
}

std::optional<std::size_t> PrefixDatabase::find(std::uint64_t bits, int length) const {
  auto it = index_.find(PrefixKey{bits & low_mask(length), length});
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int PrefixDatabase::max_length() const {
  int m = 0;
  for (const auto& p : entries_) m = std::max(m, p.length);
  return m;
}

PrefixDatabase parse_database(std::string_view text, int address_width, const ParseOptions& options) {
  PrefixDatabase db(address_width);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) {
      if (eol == text.size()) break;
      continue;
    }

    auto tokens = split_ws(line);
    if (tokens.size() != 2) fail_line(Errc::kMalformedLine, line_no, "expected '<prefix>/<len> <next_hop>'");
    std::string_view spec = tokens[0];
    auto slash = spec.find('/');
    if (slash == std::string_view::npos) fail_line(Errc::kMalformedLine, line_no, "missing '/<len>'");
    std::string_view addr = spec.substr(0, slash);
    int length = 0;
    if (!parse_uint(spec.substr(slash + 1), length)) fail_line(Errc::kMalformedLine, line_no, "bad prefix length");

    Prefix p;
    p.length = length;
    p.next_hop = std::string(tokens[1]);

    if (addr.find(':') != std::string_view::npos || addr.find('.') != std::string_view::npos) {
      bool v6 = addr.find(':') != std::string_view::npos;
      auto parsed = v6 ? parse_ipv6(addr) : parse_ipv4(addr);
      if (!parsed) fail_line(Errc::kMalformedLine, line_no, "bad address '" + std::string(addr) + "'");
      if (parsed->available != address_width) {
        fail_line(Errc::kMalformedLine, line_no,
                  std::string(v6 ? "IPv6" : "IPv4") + " notation requires address width " +
                      std::to_string(parsed->available));
      }
      if (length > (v6 ? 128 : 32)) fail_line(Errc::kLengthOutOfRange, line_no, "prefix length " + std::to_string(length));
      if (length > address_width) {
        if (options.drop_longer) continue;
        fail_line(Errc::kLengthOutOfRange, line_no,
                  "prefix length " + std::to_string(length) + " exceeds address width " + std::to_string(address_width));
      }
      p.bits = leading_bits(parsed->bits, parsed->available, length);
    } else {
      if (addr.size() > static_cast<std::size_t>(address_width)) {
        fail_line(Errc::kLengthOutOfRange, line_no, "bit string longer than address width");
      }
      if (length > address_width) {
        if (options.drop_longer) continue;
        fail_line(Errc::kLengthOutOfRange, line_no,
                  "prefix length " + std::to_string(length) + " exceeds address width " + std::to_string(address_width));
      }
      if (static_cast<std::size_t>(length) > addr.size()) {
        fail_line(Errc::kMalformedLine, line_no, "bit string shorter than prefix length");
      }
      std::uint64_t bits = 0;
      for (std::size_t i = 0; i < addr.size(); ++i) {
        char c = addr[i];
        bool specified = i < static_cast<std::size_t>(length);
        if (c != '0' && c != '1' && c != '*') fail_line(Errc::kMalformedLine, line_no, "bad bit character");
        if (specified && c == '*') fail_line(Errc::kMalformedLine, line_no, "'*' inside the prefix length");
        if (specified) bits = (bits << 1) | (c == '1' ? 1U : 0U);
      }
      p.bits = bits;
    }

    try {
      db.add(std::move(p));
    } catch (const Error& e) {
      fail_line(e.code(), line_no, e.what());
    }
    if (eol == text.size()) break;
  }
  return db;
}

PrefixDatabase load_database(const std::string& path, int address_width, const ParseOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kInvalidArgument, "cannot open database '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_database(ss.str(), address_width, options);
}

std::string serialize_database(const PrefixDatabase& db) {
  std::string out;
  for (const auto& p : db.entries()) {
    out += p.bitstring();
    out += '/';
    out += std::to_string(p.length);
    out += ' ';
    out += p.next_hop;
    out += '\n';
  }
  return out;
}

Address parse_address(std::string_view text, int address_width) {
  text = trim(text);
  if (text.find(':') != std::string_view::npos || text.find('.') != std::string_view::npos) {
    bool v6 = text.find(':') != std::string_view::npos;
    auto parsed = v6 ? parse_ipv6(text) : parse_ipv4(text);
    if (!parsed || parsed->available != address_width) {
      throw Error(Errc::kMalformedLine, "bad address '" + std::string(text) + "' for width " + std::to_string(address_width));
    }
    return parsed->bits;
  }
  if (text.size() != static_cast<std::size_t>(address_width)) {
    throw Error(Errc::kMalformedLine, "address '" + std::string(text) + "' must have " + std::to_string(address_width) + " bits");
  }
  Address a = 0;
  for (char c : text) {
    if (c != '0' && c != '1') throw Error(Errc::kMalformedLine, "bad address '" + std::string(text) + "'");
    a = (a << 1) | (c == '1' ? 1U : 0U);
  }
  return a;
}

std::string format_address(Address address, int address_width) { return to_bitstring(address, address_width); }

std::optional<std::size_t> oracle_match(const PrefixDatabase& db, Address address) {
  std::optional<std::size_t> best;
  int best_len = -1;
  for (std::size_t i = 0; i < db.size(); ++i) {
    const Prefix& p = db[i];
    if (p.length > best_len && p.matches(address, db.address_width())) {
      best = i;
      best_len = p.length;
    }
  }
  return best;
}

std::string oracle_lookup(const PrefixDatabase& db, Address address) {
  auto m = oracle_match(db, address);
  return m ? db[*m].next_hop : std::string(kDefaultNextHop);
}

LpmIndex::LpmIndex(const PrefixDatabase& db) : db_(&db), by_length_(static_cast<std::size_t>(db.address_width()) + 1) {
  for (std::size_t i = 0; i < db.size(); ++i) {
    by_length_[static_cast<std::size_t>(db[i].length)].emplace(db[i].bits, i);
  }
  for (int len = db.address_width(); len >= 0; --len) {
    if (!by_length_[static_cast<std::size_t>(len)].empty()) lengths_.push_back(len);
  }
}

std::optional<std::size_t> LpmIndex::match(Address address) const {
  for (int len : lengths_) {
    const auto& m = by_length_[static_cast<std::size_t>(len)];
    auto it = m.find(leading_bits(address, db_->address_width(), len));
    if (it != m.end()) return it->second;
  }
  return std::nullopt;
}

std::string LpmIndex::lookup(Address address) const {
  auto m = match(address);
  return m ? (*db_)[*m].next_hop : std::string(kDefaultNextHop);
}

MaxThreshold max_threshold_length(const PrefixDatabase& db, const Rational& coverage) {
  if (db.empty()) throw Error(Errc::kEmptyDatabase, "maximum threshold length needs at least one prefix");
  if (coverage <= 0 || coverage > 1) throw Error(Errc::kInvalidArgument, "coverage must lie in (0, 1]");
  std::vector<std::int64_t> per_length(static_cast<std::size_t>(db.address_width()) + 1, 0);
  for (const auto& p : db.entries()) ++per_length[static_cast<std::size_t>(p.length)];
  const auto n = static_cast<std::int64_t>(db.size());
  std::int64_t covered = 0;
  for (int m = 0; m <= db.address_width(); ++m) {
    covered += per_length[static_cast<std::size_t>(m)];
    if (Rational(covered, n) >= coverage) return MaxThreshold{m, coverage};
  }
  return MaxThreshold{db.address_width(), coverage};
}

}  // namespace tcamtree
