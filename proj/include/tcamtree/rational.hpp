// Copyright 2026 The tcamtree Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

namespace tcamtree {

using Rational = boost::rational<std::int64_t>;

// Accepts "3", "1.5", "0.99" and "3/2".
Rational parse_rational(std::string_view text);

// Round-half-up decimal rendering with a fixed number of digits.
std::string format_fixed(const Rational& value, int digits);

// "num/den" (or just "num" when den == 1).
std::string format_exact(const Rational& value);

}  // namespace tcamtree
