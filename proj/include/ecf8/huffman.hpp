// Copyright (c) 2026 The ECF8 Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>

#include "ecf8/entropy.hpp"

namespace ecf8 {

inline constexpr int kNumSymbols = 16;
inline constexpr int kMaxCodeLength = 16;

// Canonical length-limited prefix code over the 16 exponent symbols.
// lengths[] alone pins the code: words are handed out in (length, symbol)
// order, MSB-first, so the container only ever stores the 16 length bytes.
struct CodeTable {
  std::array<std::uint8_t, kNumSymbols> lengths{};
  std::array<std::uint16_t, kNumSymbols> codes{};

  bool has(unsigned symbol) const {
    return symbol < kNumSymbols && lengths[symbol] != 0;
  }
  int present_count() const;
  int max_length() const;
};

// Optimal code lengths under the 16-bit cap via package-merge, then
// canonicalized. A lone present symbol still gets a 1-bit code: a
// zero-length word would never advance the decoder.
CodeTable build_code(const ExponentHistogram& h);

// Rebuilds canonical code words from bare lengths, validating the cap and
// Kraft feasibility. This is the load path for deserialized tables.
CodeTable canonical_codes(const std::array<std::uint8_t, kNumSymbols>& lengths);

// Average code length in bits under h. Every symbol occurring in h must
// have a code word.
double expected_length(const CodeTable& t, const ExponentHistogram& h);

}  // namespace ecf8
