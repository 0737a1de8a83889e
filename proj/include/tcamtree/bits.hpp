// Copyright 2026 The tcamtree Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

namespace tcamtree {

// Addresses and prefix bits are kept right-aligned in a 64-bit word: an
// address of width w occupies the low w bits, a prefix of length l the low
// l bits. Widths never exceed 64.
using Address = std::uint64_t;

inline constexpr int kMaxAddressWidth = 64;

constexpr std::uint64_t low_mask(int count) {
  return count >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << count) - 1);
}

// Bits [offset, offset + count) of a width-bit value, most-significant first.
constexpr std::uint64_t extract_bits(std::uint64_t value, int width, int offset, int count) {
  if (count <= 0) return 0;
  return (value >> (width - offset - count)) & low_mask(count);
}

// First `length` bits of a width-bit value.
constexpr std::uint64_t leading_bits(std::uint64_t value, int width, int length) {
  return extract_bits(value, width, 0, length);
}

constexpr bool prefix_covers(std::uint64_t prefix_bits, int prefix_length, std::uint64_t bits,
                             int length) {
  if (prefix_length > length) return false;
  if (prefix_length == 0) return true;
  return (bits >> (length - prefix_length)) == prefix_bits;
}

constexpr int ceil_div(std::int64_t a, std::int64_t b) {
  return static_cast<int>((a + b - 1) / b);
}

constexpr std::int64_t ceil_div64(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

constexpr int ceil_log2(std::int64_t v) {
  int r = 0;
  while ((std::int64_t{1} << r) < v) ++r;
  return r;
}

inline std::string to_bitstring(std::uint64_t bits, int length) {
  std::string s(static_cast<std::size_t>(length), '0');
  for (int i = 0; i < length; ++i) {
    if ((bits >> (length - 1 - i)) & 1U) s[static_cast<std::size_t>(i)] = '1';
  }
  return s;
}

// Ternary rendering: `length` specified bits padded with '*' to `width`.
inline std::string to_ternary(std::uint64_t bits, int length, int width) {
  return to_bitstring(bits, length) + std::string(static_cast<std::size_t>(width - length), '*');
}

}  // namespace tcamtree
