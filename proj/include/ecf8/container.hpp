// Copyright (c) 2026 The ECF8 Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ecf8/codec.hpp"
#include "ecf8/entropy.hpp"
#include "ecf8/errors.hpp"

namespace ecf8 {

// On-disk layouts, both little-endian:
//
//   raw        "FP8R" u32 version, u32 count, then per tensor
//              u16 name_len, name, u8 rank, u64 dims[rank], dense bytes
//
//   compressed "ECF8" u32 version, u32 count, then per tensor
//              u16 name_len, name, u8 rank, u64 dims[rank], u64 n_elem,
//              u32 threads_per_block, 16 length bytes,
//              u64 encoded_len + encoded, u64 gaps_len + gaps,
//              u64 outpos[n_blocks + 1], u64 packed_len + packed
//
// n_blocks is not stored: it falls out of encoded_len and the geometry.
// The code table is likewise rebuilt from the 16 lengths on load.

inline constexpr std::uint32_t kFormatVersion = 1;

struct TensorShape {
  std::string name;
  std::vector<std::uint64_t> dims;

  std::uint64_t element_count() const;  // checked product of dims
};

struct RawTensor {
  TensorShape shape;
  std::vector<Fp8Byte> data;
};

struct RawTensorFile {
  std::vector<RawTensor> tensors;
};

struct CompressedTensor {
  TensorShape shape;
  EncodedTensor tensor;
};

struct Ecf8File {
  std::vector<CompressedTensor> tensors;
};

std::vector<std::uint8_t> serialize(const RawTensorFile& f);
std::vector<std::uint8_t> serialize(const Ecf8File& f);
RawTensorFile parse_raw(std::span<const std::uint8_t> bytes);
Ecf8File parse_container(std::span<const std::uint8_t> bytes);

// Serialized size of one compressed tensor section, metadata included.
std::uint64_t tensor_section_bytes(const CompressedTensor& t);

std::vector<std::uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, std::span<const std::uint8_t> bytes);

RawTensorFile load_raw_file(const std::string& path);
Ecf8File load_container_file(const std::string& path);

// One code table per tensor, built from its own exponent histogram.
// Tensors compress independently, in parallel.
Ecf8File compress_tensors(const RawTensorFile& raw, std::uint32_t threads_per_block);

// Output buffer shared across tensors: grows only when a tensor exceeds
// every one before it, so sizing it to the largest up front means exactly
// one allocation for a whole container.
class ReusableBuffer {
 public:
  std::span<Fp8Byte> acquire(std::size_t n_bytes) {
    if (n_bytes > buf_.size()) {
      buf_.assign(n_bytes, 0);
      ++allocations_;
    }
    return {buf_.data(), n_bytes};
  }
  std::size_t capacity_bytes() const { return buf_.size(); }
  std::uint64_t allocations() const { return allocations_; }

 private:
  std::vector<Fp8Byte> buf_;
  std::uint64_t allocations_ = 0;
};

struct DecompressStats {
  std::uint64_t buffer_allocations = 0;
  std::uint64_t buffer_capacity_bytes = 0;
};

// Decodes tensor by tensor through one ReusableBuffer, streaming the raw
// layout to `out` without materializing the whole file.
DecompressStats decompress_streaming(const Ecf8File& in, std::ostream& out);

struct VerifyIssue {
  std::string tensor;
  std::uint32_t threads_per_block = 0;
  std::string decoder;  // "sequential" or "parallel"
  std::uint64_t first_mismatch = 0;
};

struct VerifyReport {
  std::vector<VerifyIssue> issues;
  std::uint64_t checks = 0;
  bool ok() const { return issues.empty(); }
};

// Compresses in memory and replays both decoders against the original at
// each requested block width.
VerifyReport verify_tensors(const RawTensorFile& raw,
                            std::span<const std::uint32_t> thread_counts);

std::vector<EntropyReport> make_stats(const RawTensorFile& raw,
                                      std::uint32_t threads_per_block = 256);

void stats_to_csv(std::span<const EntropyReport> reports, std::ostream& out);
void stats_to_json(std::span<const EntropyReport> reports, std::ostream& out);

// Nearest E4M3 byte for a real value: round to nearest, ties to even,
// saturating at +-448, flushing tiny values to signed zero. Never emits a
// NaN pattern. Feeds the synthetic tensor generator.
Fp8Byte e4m3_from_double(double v);

RawTensorFile synth_raw(double alpha, double gamma, std::uint64_t n, std::uint64_t seed);

}  // namespace ecf8
