// Copyright (c) 2026 The ECF8 Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ecf8/fp8.hpp"
#include "ecf8/huffman.hpp"
#include "ecf8/lut.hpp"

namespace ecf8 {

// Decode geometry, CUDA-flavoured: a block of T threads, each thread
// owning an 8-byte (64-bit) window of the bitstream plus 2 bytes of
// lookahead for codes spilling over the right edge.
struct BlockGeometry {
  static constexpr std::uint32_t kBytesPerThread = 8;
  static constexpr std::uint32_t kWindowBits = 64;
  static constexpr std::uint32_t kLookaheadBytes = 2;
  static constexpr std::uint32_t kMaxSymbolsPerWindow = 64;  // 1-bit codes

  std::uint32_t threads_per_block = 256;  // power of two in [1, 1024]
  std::uint64_t n_blocks = 0;

  std::uint64_t thread_count() const { return n_blocks * threads_per_block; }
  std::uint64_t window_bytes() const { return thread_count() * kBytesPerThread; }
  std::uint64_t block_bytes() const {
    return static_cast<std::uint64_t>(threads_per_block) * kBytesPerThread;
  }
};

// Geometry covering a bitstream of the given byte length.
BlockGeometry make_geometry(std::uint64_t bitstream_bytes, std::uint32_t threads_per_block);

// Encoded exponent plane plus the per-thread/per-block sync metadata that
// makes block decode embarrassingly parallel.
struct EncodedStream {
  std::uint64_t n_elem = 0;
  BlockGeometry geometry;
  std::array<std::uint8_t, kNumSymbols> lengths{};  // enough to rebuild the code
  std::vector<std::uint8_t> encoded;  // window_bytes() + 2 lookahead, zero padded
  std::vector<std::uint8_t> gaps;     // 4-bit per thread, even thread in high half
  std::vector<std::uint64_t> outpos;  // n_blocks + 1 exclusive block offsets

  // Bit offset of global thread t_g's first owned symbol from its window
  // start; 0 when the window owns none.
  unsigned gap_at(std::uint64_t t_g) const {
    return (gaps[t_g / 2] >> (4 - (t_g % 2) * 4)) & 0x0f;
  }
};

struct EncodedTensor {
  EncodedStream stream;
  std::vector<std::uint8_t> packed;  // sign/mantissa nibbles, 2 per byte
};

EncodedStream encode(std::span<const ExponentSymbol> exponents, const CodeTable& table,
                     std::uint32_t threads_per_block);

EncodedTensor encode_tensor(std::span<const Fp8Byte> fp8, const CodeTable& table,
                            std::uint32_t threads_per_block);

// Reference decoder: one cursor, start to end. Ignores gaps/outpos.
std::vector<ExponentSymbol> decode_sequential(const EncodedStream& s, const CascadedLut& lut);

// Reference reassembly: decode_sequential plus the nibble plane.
std::vector<Fp8Byte> decode_reference(const EncodedTensor& t, const CascadedLut& lut);

// Number of code words starting inside one 64-bit window given the gap to
// its first owned symbol. window10 is the 8 window bytes plus 2 lookahead.
std::uint32_t count_phase(std::span<const std::uint8_t, 10> window10, unsigned gap,
                          const CascadedLut& lut);

// Per-worker scratch so block decode allocates nothing per call.
struct BlockScratch {
  std::vector<std::uint32_t> counts;  // T
  std::vector<std::uint64_t> accum;   // T + 1
  std::vector<std::uint8_t> staging;  // T * 64

  void resize(const BlockGeometry& g);
};

// Decodes one block into out[outpos[b], outpos[b+1]). The two order spans
// let tests run the count and emit phases over threads in any permutation;
// empty means 0..T-1. Any order must produce identical output.
void decode_block(const EncodedTensor& t, const CascadedLut& lut, std::uint64_t block,
                  std::span<Fp8Byte> out, BlockScratch& scratch,
                  std::span<const std::uint32_t> phase1_order = {},
                  std::span<const std::uint32_t> phase2_order = {});

// Block-parallel decode. out.size() must equal n_elem.
void decode_parallel_into(const EncodedTensor& t, const CascadedLut& lut,
                          std::span<Fp8Byte> out);

std::vector<Fp8Byte> decode_parallel(const EncodedTensor& t, const CascadedLut& lut);

}  // namespace ecf8
