// Copyright (c) 2026 The ECF8 Authors.
// SPDX-License-Identifier: Apache-2.0

#include "ecf8/codec.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <stdexcept>

#include "ecf8/errors.hpp"

namespace ecf8 {

namespace {

std::uint64_t load_be64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | p[i];
  return v;
}

std::uint16_t load_be16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>((p[0] << 8) | p[1]);
}

// 16-bit MSB-aligned window at an arbitrary bit offset, zero past the end.
std::uint16_t window16(std::span<const std::uint8_t> buf, std::uint64_t bit) {
  const std::uint64_t byte = bit >> 3;
  const unsigned sh = static_cast<unsigned>(bit & 7);
  std::uint32_t w = 0;
  for (std::uint64_t i = 0; i < 3; ++i)
    w = (w << 8) | (byte + i < buf.size() ? buf[byte + i] : 0);
  return static_cast<std::uint16_t>(w >> (8 - sh));
}

}  // namespace

BlockGeometry make_geometry(std::uint64_t bitstream_bytes, std::uint32_t threads_per_block) {
  if (threads_per_block == 0 || threads_per_block > 1024 ||
      !std::has_single_bit(threads_per_block))
    throw std::invalid_argument("threads per block must be a power of two in [1, 1024]");
  BlockGeometry g;
  g.threads_per_block = threads_per_block;
  g.n_blocks = (bitstream_bytes + g.block_bytes() - 1) / g.block_bytes();
  return g;
}

EncodedStream encode(std::span<const ExponentSymbol> exponents, const CodeTable& table,
                     std::uint32_t threads_per_block) {
  std::uint64_t total_bits = 0;
  for (auto s : exponents) {
    if (!table.has(s)) throw std::invalid_argument("symbol absent from code table");
    total_bits += table.lengths[s];
  }

  EncodedStream out;
  out.n_elem = exponents.size();
  out.lengths = table.lengths;
  out.geometry = make_geometry((total_bits + 7) / 8, threads_per_block);
  const std::uint64_t n_threads = out.geometry.thread_count();
  out.encoded.assign(out.geometry.window_bytes() + BlockGeometry::kLookaheadBytes, 0);
  out.gaps.assign((n_threads + 1) / 2, 0);
  out.outpos.assign(out.geometry.n_blocks + 1, 0);

  const std::uint32_t T = out.geometry.threads_per_block;
  std::uint64_t pos = 0;  // absolute bit cursor
  std::uint64_t acc = 0;  // MSB-first bit accumulator, < 24 live bits
  unsigned acc_bits = 0;
  std::size_t byte_i = 0;
  std::uint64_t last_window = ~0ull;
  for (auto s : exponents) {
    const std::uint64_t window = pos >> 6;
    if (window != last_window) {
      // First symbol owned by this window. The previous code started in
      // the window before and is at most 16 bits, so the spill fits a
      // nibble.
      const unsigned gap = static_cast<unsigned>(pos & 63);
      assert(gap < 16);
      out.gaps[window / 2] |= static_cast<std::uint8_t>(gap << (4 - (window % 2) * 4));
      last_window = window;
    }
    ++out.outpos[window / T + 1];

    const unsigned len = table.lengths[s];
    acc = (acc << len) | table.codes[s];
    acc_bits += len;
    pos += len;
    while (acc_bits >= 8) {
      out.encoded[byte_i++] = static_cast<std::uint8_t>(acc >> (acc_bits - 8));
      acc_bits -= 8;
    }
  }
  if (acc_bits > 0) out.encoded[byte_i++] = static_cast<std::uint8_t>(acc << (8 - acc_bits));
  for (std::size_t b = 1; b < out.outpos.size(); ++b) out.outpos[b] += out.outpos[b - 1];
  assert(out.outpos.back() == out.n_elem);
  return out;
}

EncodedTensor encode_tensor(std::span<const Fp8Byte> fp8, const CodeTable& table,
                            std::uint32_t threads_per_block) {
  std::vector<ExponentSymbol> exponents;
  std::vector<SignMantissaNibble> nibbles;
  split_bytes(fp8, exponents, nibbles);
  EncodedTensor t;
  t.stream = encode(exponents, table, threads_per_block);
  t.packed = pack_nibbles(nibbles);
  return t;
}

std::vector<ExponentSymbol> decode_sequential(const EncodedStream& s, const CascadedLut& lut) {
  std::vector<ExponentSymbol> out;
  out.reserve(s.n_elem);
  const std::uint64_t bit_capacity = static_cast<std::uint64_t>(s.encoded.size()) * 8;
  std::uint64_t pos = 0;
  for (std::uint64_t i = 0; i < s.n_elem; ++i) {
    if (pos >= bit_capacity) throw FormatError("truncated stream");
    const DecodeStep d = decode_one(lut, window16(s.encoded, pos));
    out.push_back(d.symbol);
    pos += d.bits;
  }
  return out;
}

std::vector<Fp8Byte> decode_reference(const EncodedTensor& t, const CascadedLut& lut) {
  const auto symbols = decode_sequential(t.stream, lut);
  std::vector<Fp8Byte> out(symbols.size());
  for (std::uint64_t i = 0; i < out.size(); ++i)
    out[i] = assemble(symbols[i], nibble_high(t.packed, i));
  return out;
}

std::uint32_t count_phase(std::span<const std::uint8_t, 10> window10, unsigned gap,
                          const CascadedLut& lut) {
  std::uint64_t L = load_be64(window10.data());
  const std::uint16_t S = load_be16(window10.data() + 8);
  L <<= gap;
  unsigned f = gap;
  std::uint32_t c = 0;

  // Head: decode until 16 bits are consumed, then splice the lookahead
  // into the now-vacant tail so the window survives a straddling code.
  while (f < 16) {
    const DecodeStep d = decode_one(lut, static_cast<std::uint16_t>(L >> 48));
    L <<= d.bits;
    f += d.bits;
    ++c;
  }
  L |= static_cast<std::uint64_t>(S) << (f - 16);
  f -= 16;

  // Tail: every further code starting before the 64-bit boundary is ours.
  // f is 16 behind the true cursor here, hence the 48.
  while (f < 48) {
    const DecodeStep d = decode_one(lut, static_cast<std::uint16_t>(L >> 48));
    L <<= d.bits;
    f += d.bits;
    ++c;
  }
  return c;
}

namespace {

// Phase 2 twin of count_phase: same cursor walk, but emits reassembled
// bytes for elements [o, o_end) and stops the moment the quota is filled,
// which also keeps the lookahead splice's shift in range.
void emit_phase(const std::uint8_t* window10, unsigned gap, const CascadedLut& lut,
                std::span<const std::uint8_t> packed, std::uint64_t o, std::uint64_t o_end,
                std::uint64_t o_base, std::uint8_t* staging) {
  if (o >= o_end) return;
  std::uint64_t L = load_be64(window10);
  const std::uint16_t S = load_be16(window10 + 8);
  L <<= gap;
  unsigned f = gap;
  while (f < 16) {
    const DecodeStep d = decode_one(lut, static_cast<std::uint16_t>(L >> 48));
    staging[o - o_base] = assemble(d.symbol, nibble_high(packed, o));
    if (++o == o_end) return;
    L <<= d.bits;
    f += d.bits;
  }
  L |= static_cast<std::uint64_t>(S) << (f - 16);
  while (true) {
    const DecodeStep d = decode_one(lut, static_cast<std::uint16_t>(L >> 48));
    staging[o - o_base] = assemble(d.symbol, nibble_high(packed, o));
    if (++o == o_end) return;
    L <<= d.bits;
  }
}

}  // namespace

void BlockScratch::resize(const BlockGeometry& g) {
  counts.resize(g.threads_per_block);
  accum.resize(g.threads_per_block);
  staging.resize(static_cast<std::size_t>(g.threads_per_block) *
                 BlockGeometry::kMaxSymbolsPerWindow);
}

void decode_block(const EncodedTensor& t, const CascadedLut& lut, std::uint64_t block,
                  std::span<Fp8Byte> out, BlockScratch& scratch,
                  std::span<const std::uint32_t> phase1_order,
                  std::span<const std::uint32_t> phase2_order) {
  const EncodedStream& s = t.stream;
  const BlockGeometry& g = s.geometry;
  const std::uint32_t T = g.threads_per_block;
  assert(scratch.counts.size() >= T && scratch.accum.size() >= T);
  assert(scratch.staging.size() >=
         static_cast<std::size_t>(T) * BlockGeometry::kMaxSymbolsPerWindow);

  const std::uint64_t o_base = s.outpos[block];
  const std::uint64_t o_limit = s.outpos[block + 1];
  if (o_limit == o_base) return;

  // Phase 1: per-thread symbol counts, any order.
  for (std::uint32_t i = 0; i < T; ++i) {
    const std::uint32_t tt = phase1_order.empty() ? i : phase1_order[i];
    const std::uint64_t t_g = block * T + tt;
    const std::uint8_t* w = s.encoded.data() + t_g * BlockGeometry::kBytesPerThread;
    scratch.counts[tt] = count_phase(std::span<const std::uint8_t, 10>(w, 10),
                                     s.gap_at(t_g), lut);
  }

  // Exclusive prefix sum over the counts: up-sweep then down-sweep, in
  // place over a power-of-two array.
  auto& a = scratch.accum;
  for (std::uint32_t i = 0; i < T; ++i) a[i] = scratch.counts[i];
  for (std::uint32_t d = 1; d < T; d <<= 1)
    for (std::uint32_t i = 2 * d - 1; i < T; i += 2 * d) a[i] += a[i - d];
  a[T - 1] = 0;
  for (std::uint32_t d = T >> 1; d >= 1; d >>= 1)
    for (std::uint32_t i = 2 * d - 1; i < T; i += 2 * d) {
      const std::uint64_t left = a[i - d];
      a[i - d] = a[i];
      a[i] += left;
    }

  // Phase 2: re-decode and emit into block-local staging. Counts past the
  // payload's end (zero padding decodes to phantom symbols) are clamped
  // off by o_limit, so they shift offsets of nothing that gets written.
  for (std::uint32_t i = 0; i < T; ++i) {
    const std::uint32_t tt = phase2_order.empty() ? i : phase2_order[i];
    const std::uint64_t o_start = o_base + a[tt];
    if (o_start >= o_limit) continue;
    const std::uint64_t o_end = std::min(o_start + scratch.counts[tt], o_limit);
    const std::uint64_t t_g = block * T + tt;
    const std::uint8_t* w = s.encoded.data() + t_g * BlockGeometry::kBytesPerThread;
    emit_phase(w, s.gap_at(t_g), lut, t.packed, o_start, o_end, o_base,
               scratch.staging.data());
  }

  std::copy_n(scratch.staging.data(), o_limit - o_base, out.data() + o_base);
}

void decode_parallel_into(const EncodedTensor& t, const CascadedLut& lut,
                          std::span<Fp8Byte> out) {
  const EncodedStream& s = t.stream;
  if (out.size() != s.n_elem) throw std::invalid_argument("output size mismatch");
  if (s.outpos.size() != s.geometry.n_blocks + 1 || s.outpos.back() != s.n_elem)
    throw std::invalid_argument("inconsistent block offsets");
  if (s.n_elem == 0) return;

  const std::int64_t nb = static_cast<std::int64_t>(s.geometry.n_blocks);
#pragma omp parallel
  {
    BlockScratch scratch;
    scratch.resize(s.geometry);
#pragma omp for schedule(static)
    for (std::int64_t b = 0; b < nb; ++b)
      decode_block(t, lut, static_cast<std::uint64_t>(b), out, scratch);
  }
}

std::vector<Fp8Byte> decode_parallel(const EncodedTensor& t, const CascadedLut& lut) {
  std::vector<Fp8Byte> out(t.stream.n_elem);
  decode_parallel_into(t, lut, out);
  return out;
}

}  // namespace ecf8
