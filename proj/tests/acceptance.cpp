// Copyright (c) 2026 The ECF8 Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance gate: one pass/fail line per shipped guarantee. Exit status
// is the number of failed criteria, so CI can gate on zero.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "ecf8/codec.hpp"
#include "ecf8/container.hpp"
#include "ecf8/entropy.hpp"
#include "ecf8/fp8.hpp"
#include "ecf8/huffman.hpp"
#include "ecf8/lut.hpp"
#include "test_util.hpp"

namespace {

int g_failures = 0;

void report(bool ok, const char* name, const std::string& detail) {
  std::printf("%s  %s (%s)\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// ------------------------------------------------------------------
// 1. Byte-exact round-trip over 1,000 randomized tensor files.
void criterion_roundtrip() {
  const auto t0 = std::chrono::steady_clock::now();
  ecf8::SplitMix64 rng(1001);
  const std::uint32_t widths[] = {1, 2, 32, 256};
  std::uint64_t files_ok = 0, total_elems = 0;
  bool ok = true;

  for (int file = 0; file < 1000 && ok; ++file) {
    ecf8::RawTensorFile raw;
    if (file == 0) {
      // Degenerate and maximal sizes plus the full byte alphabet, NaN
      // patterns included.
      for (std::uint64_t n : {0ull, 1ull, 3ull, 100000ull}) {
        ecf8::RawTensor t;
        t.shape.name = "fixed" + std::to_string(n);
        t.shape.dims = {n};
        t.data.resize(n);
        for (std::uint64_t i = 0; i < n; ++i)
          t.data[i] = static_cast<ecf8::Fp8Byte>(i & 0xff);
        raw.tensors.push_back(std::move(t));
      }
    } else {
      const int count = 1 + static_cast<int>(rng.next() % 3);
      for (int k = 0; k < count; ++k) {
        ecf8::RawTensor t;
        t.shape.name = "t" + std::to_string(file) + "_" + std::to_string(k);
        // Log-uniform sizes in [1, 1e5), odd sizes common; sprinkle zeros.
        std::uint64_t n =
            static_cast<std::uint64_t>(std::pow(10.0, 5.0 * rng.next_unit()));
        if (rng.next() % 17 == 0) n = 0;
        t.shape.dims = {n};
        t.data.resize(n);
        const int dist = static_cast<int>(rng.next() % 3);
        for (auto& b : t.data) {
          if (dist == 0)
            b = static_cast<ecf8::Fp8Byte>(rng.next() & 0xff);
          else if (dist == 1)
            b = (rng.next() % 8) ? 0x30 : static_cast<ecf8::Fp8Byte>(rng.next() & 0xff);
          else
            b = static_cast<ecf8::Fp8Byte>(0x80 | (rng.next() & 0x3f));
        }
        raw.tensors.push_back(std::move(t));
      }
    }
    for (const auto& t : raw.tensors) total_elems += t.data.size();

    const auto raw_bytes = ecf8::serialize(raw);
    const ecf8::Ecf8File comp =
        ecf8::compress_tensors(ecf8::parse_raw(raw_bytes), widths[file % 4]);
    const ecf8::Ecf8File reparsed = ecf8::parse_container(ecf8::serialize(comp));
    std::ostringstream out;
    ecf8::decompress_streaming(reparsed, out);
    const std::string got = out.str();
    ok = got.size() == raw_bytes.size() &&
         std::equal(raw_bytes.begin(), raw_bytes.end(),
                    reinterpret_cast<const std::uint8_t*>(got.data()));
    if (ok) ++files_ok;
  }

  const double dt = seconds_since(t0);
  report(ok && files_ok == 1000 && dt < 60.0,
         "byte-exact round-trip through compress and decompress",
         fmt("%.0f files, %.0fk elements, %.1f s, budget 60 s",
             static_cast<double>(files_ok), static_cast<double>(total_elems) / 1000.0,
             dt));
}

// ------------------------------------------------------------------
// 2. Parallel decode equals sequential decode plus nibble reassembly.
void criterion_parallel_eq_sequential() {
  ecf8::SplitMix64 rng(1002);
  bool ok = true;
  std::uint64_t checks = 0;

  std::vector<std::vector<ecf8::Fp8Byte>> tensors;
  for (std::size_t n : {std::size_t{0}, std::size_t{1}, std::size_t{65},
                        std::size_t{4096}, std::size_t{100001}}) {
    std::vector<ecf8::Fp8Byte> t(n);
    for (auto& b : t) b = static_cast<ecf8::Fp8Byte>(rng.next() & 0xff);
    tensors.push_back(std::move(t));
  }

  // Crafted maximal-spill stream: a 16-bit code begins at bit 63, so the
  // next window's first owned symbol sits at window bit 15.
  std::array<std::uint8_t, 16> ladder{};
  for (int s = 0; s < 14; ++s) ladder[s] = static_cast<std::uint8_t>(s + 1);
  ladder[14] = 16;
  ladder[15] = 16;
  const ecf8::CodeTable ladder_table = ecf8::canonical_codes(ladder);
  {
    std::vector<ecf8::Fp8Byte> t;
    for (int i = 0; i < 63; ++i) t.push_back(ecf8::assemble(0, 0x30));
    t.push_back(ecf8::assemble(15, 0xf0));
    t.push_back(ecf8::assemble(14, 0x50));
    for (int i = 0; i < 200; ++i) t.push_back(ecf8::assemble(0, 0x90));
    tensors.push_back(std::move(t));
  }

  for (std::size_t i = 0; i < tensors.size() && ok; ++i) {
    const auto& tensor = tensors[i];
    ecf8::CodeTable table;
    if (i + 1 == tensors.size()) {
      table = ladder_table;
    } else if (tensor.empty()) {
      ecf8::ExponentHistogram h;
      h.counts[0] = 1;
      table = ecf8::build_code(h);
    } else {
      table = ecf8::build_code(ecf8::ExponentHistogram::of_bytes(tensor));
    }
    const ecf8::CascadedLut lut = ecf8::build_lut(table);
    for (std::uint32_t T : {1u, 2u, 32u, 256u}) {
      const ecf8::EncodedTensor enc = ecf8::encode_tensor(tensor, table, T);
      if (i + 1 == tensors.size() && T >= 2 && enc.stream.gap_at(1) != 15) ok = false;
      const auto par = ecf8::decode_parallel(enc, lut);
      const auto seq = ecf8::decode_reference(enc, lut);
      if (par != seq || par != tensor) ok = false;
      ++checks;
    }
  }

  report(ok, "block-parallel decode matches the sequential reference",
         fmt("%.0f tensor/width combinations, straddle case included",
             static_cast<double>(checks)));
}

// ------------------------------------------------------------------
// 3. Exponent-entropy bounds and closed form vs series.
void criterion_entropy_bounds() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  double worst = 0.0;

  const double h2 = ecf8::closed_form_entropy(ecf8::StableModel(2.0));
  if (!(h2 >= 1.6 && h2 <= 2.667)) ok = false;

  int outside = 0;
  double first_outside = 0.0;
  for (int i = 1; i <= 50; ++i) {
    const double alpha = 0.1 + (2.0 - 0.1) * i / 50.0;
    const double closed = ecf8::closed_form_entropy(ecf8::StableModel(alpha));
    const double series = testutil::series_entropy(alpha);
    worst = std::max(worst, std::abs(closed - series));
    const ecf8::EntropyBounds b = ecf8::entropy_bounds(alpha);
    if (!(b.lower <= closed && closed <= b.upper)) {
      if (outside == 0) first_outside = alpha;
      ++outside;
      ok = false;
    }
  }
  if (worst > 1e-9) ok = false;

  const double dt = seconds_since(t0);
  char detail[192];
  std::snprintf(detail, sizeof detail,
                "H(2)=%.7f, closed-vs-series gap %.3f tol 1e-9, %d/50 grid points "
                "outside bounds (first alpha=%.3f), %.2f s, budget 1 s",
                h2, worst, outside, first_outside, dt);
  report(ok && dt < 1.0, "gaussian exponent entropy sits inside its bounds", detail);
}

// ------------------------------------------------------------------
// 4. Empirical exponent entropy concentrates on the closed form.
void criterion_empirical_concentration() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  double worst = 0.0;

  char gaps[128];
  std::size_t off = 0;
  for (double alpha : {1.2, 1.5, 2.0}) {
    const auto xs = ecf8::sample_stable(alpha, 1.0, 1000000, 4242);
    const double emp = ecf8::empirical_exponent_entropy(xs);
    const double closed = ecf8::closed_form_entropy(ecf8::StableModel(alpha));
    worst = std::max(worst, std::abs(emp - closed));
    if (std::abs(emp - closed) >= 0.1) ok = false;
    if (alpha == 2.0 && !(emp >= 1.6 && emp <= 2.67)) ok = false;
    off += std::snprintf(gaps + off, sizeof(gaps) - off, "a=%.1f:%+.3f ", alpha,
                         emp - closed);
  }

  const double dt = seconds_since(t0);
  char detail[192];
  std::snprintf(detail, sizeof detail,
                "3x1e6 draws, emp-closed gaps %stol 0.1, %.1f s, budget 30 s", gaps, dt);
  report(ok && dt < 30.0, "sampled exponent entropy concentrates as modeled", detail);
}

// ------------------------------------------------------------------
// 5. Code lengths are optimal under the cap.
void criterion_huffman_optimality() {
  bool ok = true;
  std::uint64_t enumerated = 0;

  for (int k = 1; k <= 5 && ok; ++k) {
    std::vector<std::uint64_t> counts(k, 1);
    while (true) {
      ecf8::ExponentHistogram h;
      for (int i = 0; i < k; ++i) h.counts[i] = counts[i];
      const ecf8::CodeTable t = ecf8::build_code(h);
      std::uint64_t got = 0;
      for (int s = 0; s < k; ++s) got += counts[s] * t.lengths[s];
      const std::uint64_t want =
          k == 1 ? counts[0] : testutil::min_cost_exhaustive(counts);
      if (got != want) {
        ok = false;
        break;
      }
      ++enumerated;
      int i = 0;
      while (i < k && counts[i] == 8) counts[i++] = 1;
      if (i == k) break;
      ++counts[i];
    }
  }

  ecf8::SplitMix64 rng(1005);
  bool redundancy_ok = true;
  for (int trial = 0; trial < 500; ++trial) {
    ecf8::ExponentHistogram h;
    for (auto& c : h.counts) c = 1 + rng.next() % (1ull << 24);  // all 16 present
    const ecf8::CodeTable t = ecf8::build_code(h);
    const double bps = ecf8::expected_length(t, h);
    const double ent = ecf8::shannon_entropy(h);
    if (!(ent <= bps + 1e-9 && bps < ent + 1.0)) redundancy_ok = false;
  }

  report(ok && redundancy_ok, "code lengths are cost-optimal under the 16-bit cap",
         fmt("%.0f histograms vs exhaustive search, 500 redundancy checks",
             static_cast<double>(enumerated)));
}

// ------------------------------------------------------------------
// 6. Desk-scale compression magnitude on a synthetic gaussian tensor.
void criterion_synthetic_savings() {
  const ecf8::RawTensorFile raw = ecf8::synth_raw(2.0, 0.05, 1000000, 31337);
  const auto reports = ecf8::make_stats(raw, 256);
  const double actual = reports[0].actual_savings;
  const double projected = reports[0].projected_savings;
  const bool ok = actual > 0.0 && std::abs(actual - projected) <= 0.03;
  report(ok, "synthetic gaussian tensor compresses as projected",
         fmt("actual %.1f%%, projected %.1f%%, tolerance 3.0 points", 100 * actual,
             100 * projected));
}

// ------------------------------------------------------------------
// 7. Table-driven decode equals a bit-walk oracle, table by table.
void criterion_lut_oracle() {
  ecf8::SplitMix64 rng(1007);
  bool ok = true;
  std::uint32_t worst_luts = 0;
  std::uint64_t pairs = 0;

  for (int trial = 0; trial < 1000 && ok; ++trial) {
    ecf8::CodeTable t;
    if (trial % 2 == 0) {
      t = ecf8::canonical_codes(testutil::random_lengths(rng));
    } else {
      t = ecf8::build_code(testutil::random_histogram(rng, 16, 1ull << 28));
    }
    const ecf8::CascadedLut lut = ecf8::build_lut(t);
    worst_luts = std::max(worst_luts, lut.n_luts);
    if (lut.n_luts > 18) ok = false;

    // Every code word, padded with adversarial and random suffixes: the
    // table walk and the bit walk must label the window identically.
    for (int s = 0; s < ecf8::kNumSymbols && ok; ++s) {
      if (t.lengths[s] == 0) continue;
      const int pad = 16 - t.lengths[s];
      const auto base = static_cast<std::uint16_t>(t.codes[s] << pad);
      for (int v = 0; v < 10 && ok; ++v) {
        std::uint16_t suffix = 0;
        if (v == 1)
          suffix = static_cast<std::uint16_t>((1u << pad) - 1);
        else if (v > 1)
          suffix = static_cast<std::uint16_t>(rng.next() & ((1u << pad) - 1));
        const std::uint16_t w = base | suffix;
        const auto walked = testutil::walk_decode(t, w);
        const ecf8::DecodeStep step = ecf8::decode_one(lut, w);
        if (!walked || walked->first != s || walked->second != t.lengths[s]) ok = false;
        if (step.symbol != s || step.bits != t.lengths[s]) ok = false;
        ++pairs;
      }
    }

    // Every 20th table: all 65,536 windows against the bit walk, fallback
    // windows resolving to the lowest present symbol.
    if (trial % 20 == 0) {
      const int fb = testutil::lowest_present(t);
      for (std::uint32_t w = 0; w < (1u << 16) && ok; ++w) {
        const auto walked = testutil::walk_decode(t, static_cast<std::uint16_t>(w));
        const ecf8::DecodeStep step =
            ecf8::decode_one(lut, static_cast<std::uint16_t>(w));
        const int want_sym = walked ? walked->first : fb;
        const int want_bits = walked ? walked->second : t.lengths[fb];
        if (step.symbol != want_sym || step.bits != want_bits) ok = false;
      }
    }
  }

  report(ok, "cascaded decode tables agree with a bit-walk oracle",
         fmt("1000 tables, %.0f codeword windows, max %.0f subtables",
             static_cast<double>(pairs), static_cast<double>(worst_luts)));
}

// ------------------------------------------------------------------
// 8. One output buffer for a whole container.
void criterion_buffer_reuse() {
  ecf8::SplitMix64 rng(1008);
  ecf8::RawTensorFile raw;
  std::uint64_t largest = 0;
  for (int i = 0; i < 100; ++i) {
    ecf8::RawTensor t;
    t.shape.name = "layer." + std::to_string(i);
    const std::uint64_t n = 1 + rng.next() % 5000;
    largest = std::max(largest, n);
    t.shape.dims = {n};
    t.data.resize(n);
    for (auto& b : t.data) b = static_cast<ecf8::Fp8Byte>(rng.next() & 0xff);
    raw.tensors.push_back(std::move(t));
  }

  const ecf8::Ecf8File file = ecf8::compress_tensors(raw, 256);
  std::ostringstream sink;
  const ecf8::DecompressStats st = ecf8::decompress_streaming(file, sink);
  const bool ok = st.buffer_allocations == 1 && st.buffer_capacity_bytes == largest;
  report(ok, "one reused output buffer decompresses a whole container",
         fmt("100 tensors, %.0f allocation(s), capacity %.0f bytes",
             static_cast<double>(st.buffer_allocations),
             static_cast<double>(st.buffer_capacity_bytes)));
}

}  // namespace

int main() {
  criterion_roundtrip();
  criterion_parallel_eq_sequential();
  criterion_entropy_bounds();
  criterion_empirical_concentration();
  criterion_huffman_optimality();
  criterion_synthetic_savings();
  criterion_lut_oracle();
  criterion_buffer_reuse();

  if (g_failures == 0)
    std::printf("all 8 criteria passed\n");
  else
    std::printf("%d criteria FAILED\n", g_failures);
  return g_failures;
}
