// Copyright (c) 2026 The ECF8 Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Decode throughput: single-cursor reference vs block-parallel decode at
// several block widths, on a synthetic gaussian-weight tensor.
//
//   bench_decode [--benchmark_filter=...]

#include <benchmark/benchmark.h>

#include <cstdint>
#include <map>
#include <vector>

#include "ecf8/codec.hpp"
#include "ecf8/container.hpp"
#include "ecf8/entropy.hpp"
#include "ecf8/huffman.hpp"
#include "ecf8/lut.hpp"

namespace {

constexpr std::uint64_t kElements = 1ull << 22;

const std::vector<ecf8::Fp8Byte>& tensor() {
  static const std::vector<ecf8::Fp8Byte> t =
      ecf8::synth_raw(2.0, 0.05, kElements, 1).tensors[0].data;
  return t;
}

const ecf8::CodeTable& table() {
  static const ecf8::CodeTable t =
      ecf8::build_code(ecf8::ExponentHistogram::of_bytes(tensor()));
  return t;
}

const ecf8::EncodedTensor& encoded(std::uint32_t threads_per_block) {
  static std::map<std::uint32_t, ecf8::EncodedTensor> cache;
  auto it = cache.find(threads_per_block);
  if (it == cache.end())
    it = cache.emplace(threads_per_block,
                       ecf8::encode_tensor(tensor(), table(), threads_per_block))
             .first;
  return it->second;
}

void bm_decode_sequential(benchmark::State& state) {
  const auto& enc = encoded(static_cast<std::uint32_t>(state.range(0)));
  const ecf8::CascadedLut lut = ecf8::build_lut(table());
  for (auto _ : state) {
    auto out = ecf8::decode_reference(enc, lut);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) * kElements);
}

void bm_decode_parallel(benchmark::State& state) {
  const auto& enc = encoded(static_cast<std::uint32_t>(state.range(0)));
  const ecf8::CascadedLut lut = ecf8::build_lut(table());
  std::vector<ecf8::Fp8Byte> out(kElements);
  for (auto _ : state) {
    ecf8::decode_parallel_into(enc, lut, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) * kElements);
}

void bm_encode(benchmark::State& state) {
  for (auto _ : state) {
    auto enc = ecf8::encode_tensor(tensor(), table(),
                                   static_cast<std::uint32_t>(state.range(0)));
    benchmark::DoNotOptimize(enc.stream.encoded.data());
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) * kElements);
}

}  // namespace

BENCHMARK(bm_decode_sequential)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(bm_decode_parallel)->Arg(1)->Arg(32)->Arg(256)->Arg(1024)
    ->Unit(benchmark::kMillisecond);
BENCHMARK(bm_encode)->Arg(256)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
