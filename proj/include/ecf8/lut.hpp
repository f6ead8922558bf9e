// Copyright (c) 2026 The ECF8 Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "ecf8/huffman.hpp"

namespace ecf8 {

// Byte-indexed decode cascade, flattened into one n_luts x 256 array.
//
//   subtable 0            root, indexed by the window's first byte
//   subtables 1..n-2      continuations for codes longer than 8 bits,
//                         numbered in first-appearance order of their
//                         8-bit prefix in the root scan
//   subtable n-1          symbol -> code length
//
// A decode entry v < 16 is a symbol; v in [240, 255] points at subtable
// 256 - v. Window bytes no code can produce resolve to the lowest present
// symbol, whose length then walks the cursor forward; such bytes only
// ever appear in zero padding past the payload, where the decoded values
// are counted but never written.
struct CascadedLut {
  std::vector<std::uint8_t> entries;
  std::uint32_t n_luts = 0;
};

inline constexpr std::uint32_t kMaxLuts = 18;  // root + 16 pointers + lengths
inline constexpr std::uint32_t kFirstPointer = 240;

CascadedLut build_lut(const CodeTable& t);

struct DecodeStep {
  std::uint8_t symbol;
  std::uint8_t bits;
};

// Resolves the code word at the head of a 16-bit MSB-aligned window.
// At most two table bytes plus the length byte are touched.
inline DecodeStep decode_one(const CascadedLut& lut, std::uint16_t window) {
  const std::uint8_t* e = lut.entries.data();
  std::uint32_t x = e[window >> 8];
  if (x >= kFirstPointer) x = e[256u * (256u - x) + (window & 0xffu)];
  const std::uint8_t bits = e[256u * (lut.n_luts - 1) + x];
  return {static_cast<std::uint8_t>(x), bits};
}

}  // namespace ecf8
