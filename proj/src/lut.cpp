// Copyright (c) 2026 The ECF8 Authors.
// SPDX-License-Identifier: Apache-2.0

#include "ecf8/lut.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace ecf8 {

namespace {

// Does the byte b continue into any code longer than 8 bits?
bool is_long_prefix(const CodeTable& t, unsigned b) {
  for (int s = 0; s < kNumSymbols; ++s) {
    const int len = t.lengths[s];
    if (len > 8 && static_cast<unsigned>(t.codes[s] >> (len - 8)) == b) return true;
  }
  return false;
}

// Symbol whose code (of length <= 8) matches the top bits of b, or -1.
int short_match(const CodeTable& t, unsigned b) {
  for (int s = 0; s < kNumSymbols; ++s) {
    const int len = t.lengths[s];
    if (len >= 1 && len <= 8 && (b >> (8 - len)) == t.codes[s]) return s;
  }
  return -1;
}

// Symbol whose long code has first byte `prefix` and whose remaining
// len-8 bits match the top of b2, or -1.
int long_match(const CodeTable& t, unsigned prefix, unsigned b2) {
  for (int s = 0; s < kNumSymbols; ++s) {
    const int len = t.lengths[s];
    if (len <= 8) continue;
    if (static_cast<unsigned>(t.codes[s] >> (len - 8)) != prefix) continue;
    const unsigned rest = t.codes[s] & ((1u << (len - 8)) - 1);
    if ((b2 >> (16 - len)) == rest) return s;
  }
  return -1;
}

}  // namespace

CascadedLut build_lut(const CodeTable& t) {
  int fallback = -1;
  std::uint64_t kraft = 0;
  for (int s = 0; s < kNumSymbols; ++s) {
    const int len = t.lengths[s];
    if (len == 0) continue;
    if (len > kMaxCodeLength) throw std::invalid_argument("invalid length vector");
    kraft += 1ull << (kMaxCodeLength - len);
    if (fallback < 0) fallback = s;
  }
  if (fallback < 0 || kraft > (1ull << kMaxCodeLength))
    throw std::invalid_argument("invalid length vector");

  // Root pass discovers the long-code prefixes in byte order.
  std::array<std::uint8_t, 256> root{};
  std::vector<unsigned> prefixes;
  for (unsigned b = 0; b < 256; ++b) {
    const int s = short_match(t, b);
    if (s >= 0) {
      root[b] = static_cast<std::uint8_t>(s);
      continue;
    }
    if (is_long_prefix(t, b)) {
      unsigned idx = 0;
      while (idx < prefixes.size() && prefixes[idx] != b) ++idx;
      if (idx == prefixes.size()) prefixes.push_back(b);
      // Pointer 255 is the first subtable, 254 the second, and so on.
      if (prefixes.size() > 16) throw std::runtime_error("pointer space exhausted");
      root[b] = static_cast<std::uint8_t>(255 - idx);
    } else {
      root[b] = static_cast<std::uint8_t>(fallback);
    }
  }

  CascadedLut lut;
  lut.n_luts = static_cast<std::uint32_t>(2 + prefixes.size());
  lut.entries.assign(256 * lut.n_luts, 0);
  std::copy(root.begin(), root.end(), lut.entries.begin());

  for (std::size_t i = 0; i < prefixes.size(); ++i) {
    std::uint8_t* sub = lut.entries.data() + 256 * (i + 1);
    for (unsigned b2 = 0; b2 < 256; ++b2) {
      const int s = long_match(t, prefixes[i], b2);
      sub[b2] = static_cast<std::uint8_t>(s >= 0 ? s : fallback);
    }
  }

  std::uint8_t* len_table = lut.entries.data() + 256 * (lut.n_luts - 1);
  for (int s = 0; s < kNumSymbols; ++s) len_table[s] = t.lengths[s];
  return lut;
}

}  // namespace ecf8
