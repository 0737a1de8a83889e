// Copyright 2026 The tcamtree Authors
// SPDX-License-Identifier: Apache-2.0

#include "tcamtree/rational.hpp"

#include <charconv>

#include "tcamtree/error.hpp"

namespace tcamtree {
namespace {

std::int64_t parse_int(std::string_view s, std::string_view whole) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error(Errc::kInvalidArgument, "not a number: '" + std::string(whole) + "'");
  }
  return v;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    std::int64_t den = parse_int(text.substr(slash + 1), text);
    if (den == 0) throw Error(Errc::kInvalidArgument, "zero denominator: '" + std::string(text) + "'");
    return Rational(parse_int(text.substr(0, slash), text), den);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = text.substr(dot + 1);
    if (frac.size() > 15) frac = frac.substr(0, 15);
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    bool negative = !whole.empty() && whole.front() == '-';
    std::int64_t w = whole.empty() || whole == "-" ? 0 : parse_int(whole, text);
    std::int64_t f = frac.empty() ? 0 : parse_int(frac, text);
    std::int64_t magnitude = (w < 0 ? -w : w) * scale + f;
    return Rational(negative ? -magnitude : magnitude, scale);
  }
  return Rational(parse_int(text, text));
}

std::string format_fixed(const Rational& value, int digits) {
  std::int64_t scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  bool negative = value < 0;
  Rational mag = negative ? -value : value;
  // round half up on the magnitude
  __int128 num = static_cast<__int128>(mag.numerator()) * scale * 2 + mag.denominator();
  __int128 den = static_cast<__int128>(mag.denominator()) * 2;
  auto scaled = static_cast<std::int64_t>(num / den);
  std::string out = std::to_string(scaled / scale);
  if (digits > 0) {
    std::string frac = std::to_string(scaled % scale);
    out += '.' + std::string(static_cast<std::size_t>(digits) - frac.size(), '0') + frac;
  }
  return (negative && scaled != 0 ? "-" : "") + out;
}

std::string format_exact(const Rational& value) {
  if (value.denominator() == 1) return std::to_string(value.numerator());
  return std::to_string(value.numerator()) + "/" + std::to_string(value.denominator());
}

}  // namespace tcamtree
