// Copyright (c) 2026 The ECF8 Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ecf8 {

// E4M3 byte layout: bit 7 sign, bits 6..3 exponent field, bits 2..0 mantissa.
// The codec is byte-level lossless: all 256 patterns round-trip verbatim,
// NaN encodings included, so nothing here assigns numerical meaning.

using Fp8Byte = std::uint8_t;

// 4-bit exponent field, value < 16.
using ExponentSymbol = std::uint8_t;

// Sign and the 3 mantissa bits packed as [s m2 m1 m0], value < 16.
using SignMantissaNibble = std::uint8_t;

constexpr ExponentSymbol exponent_of(Fp8Byte b) {
  return static_cast<ExponentSymbol>((b >> 3) & 0x0f);
}

constexpr SignMantissaNibble sign_mantissa_of(Fp8Byte b) {
  return static_cast<SignMantissaNibble>(((b >> 4) & 0x08) | (b & 0x07));
}

struct SplitByte {
  ExponentSymbol exponent;
  SignMantissaNibble nibble;
};

constexpr SplitByte split(Fp8Byte b) { return {exponent_of(b), sign_mantissa_of(b)}; }

// Rebuilds a weight byte from its exponent symbol and the sign/mantissa
// nibble sitting in the HIGH half of q_high. The low half of q_high is
// ignored, which lets the decoder pass a shifted packed byte straight in.
constexpr Fp8Byte assemble(ExponentSymbol x, std::uint8_t q_high) {
  return static_cast<Fp8Byte>((x << 3) | (q_high & 0x80) | ((q_high >> 4) & 0x07));
}

// Nibbles are packed two per byte, element 2i in the high half. An odd
// tail leaves the final low half zero.
std::vector<std::uint8_t> pack_nibbles(std::span<const SignMantissaNibble> nibbles);

std::vector<SignMantissaNibble> unpack_nibbles(std::span<const std::uint8_t> packed,
                                               std::size_t n_elem);

// Element i's nibble shifted into the high half; the low half carries
// whatever neighbours the nibble in storage. assemble() masks it off.
inline std::uint8_t nibble_high(std::span<const std::uint8_t> packed, std::uint64_t i) {
  return static_cast<std::uint8_t>(packed[i / 2] << ((i % 2) * 4));
}

void split_bytes(std::span<const Fp8Byte> fp8, std::vector<ExponentSymbol>& exponents,
                 std::vector<SignMantissaNibble>& nibbles);

}  // namespace ecf8
