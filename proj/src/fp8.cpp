// Copyright (c) 2026 The ECF8 Authors.
// SPDX-License-Identifier: Apache-2.0

#include "ecf8/fp8.hpp"

namespace ecf8 {

std::vector<std::uint8_t> pack_nibbles(std::span<const SignMantissaNibble> nibbles) {
  std::vector<std::uint8_t> packed((nibbles.size() + 1) / 2, 0);
  for (std::size_t i = 0; i < nibbles.size(); ++i) {
    if (i % 2 == 0) {
      packed[i / 2] = static_cast<std::uint8_t>(nibbles[i] << 4);
    } else {
      packed[i / 2] |= static_cast<std::uint8_t>(nibbles[i] & 0x0f);
    }
  }
  return packed;
}

std::vector<SignMantissaNibble> unpack_nibbles(std::span<const std::uint8_t> packed,
                                               std::size_t n_elem) {
  std::vector<SignMantissaNibble> nibbles(n_elem);
  for (std::size_t i = 0; i < n_elem; ++i) {
    nibbles[i] = static_cast<SignMantissaNibble>(nibble_high(packed, i) >> 4);
  }
  return nibbles;
}

void split_bytes(std::span<const Fp8Byte> fp8, std::vector<ExponentSymbol>& exponents,
                 std::vector<SignMantissaNibble>& nibbles) {
  exponents.resize(fp8.size());
  nibbles.resize(fp8.size());
  for (std::size_t i = 0; i < fp8.size(); ++i) {
    exponents[i] = exponent_of(fp8[i]);
    nibbles[i] = sign_mantissa_of(fp8[i]);
  }
}

}  // namespace ecf8
