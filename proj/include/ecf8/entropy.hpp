// Copyright (c) 2026 The ECF8 Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ecf8/fp8.hpp"

namespace ecf8 {

// Histogram over the 16 FP8 exponent-field symbols.
struct ExponentHistogram {
  std::array<std::uint64_t, 16> counts{};

  std::uint64_t total() const;
  void add(ExponentSymbol s) { ++counts[s & 0x0f]; }

  static ExponentHistogram of_bytes(std::span<const Fp8Byte> fp8);
  static ExponentHistogram of_symbols(std::span<const ExponentSymbol> symbols);
};

// Shannon entropy of the histogram in bits, in [0, 4]. Empty histograms
// have no distribution to speak of and are rejected.
double shannon_entropy(const ExponentHistogram& h);

// Symmetric alpha-stable weight model S_alpha(0, gamma, delta). Under it
// the base-2 exponent of a sample is two-sided geometric with ratio
// q = 2^-alpha, which is the whole reason the exponent field compresses.
struct StableModel {
  explicit StableModel(double alpha, double gamma = 1.0, double delta = 0.0);

  double alpha;
  double gamma;
  double delta;

  double q() const;  // 2^-alpha, in (0, 1)
};

// P(E = k) = (1-q)/(1+q) * q^|k| for the exponent E = floor(log2 |X|).
double geometric_pmf(const StableModel& m, int k);

struct EntropyBounds {
  double lower;  // alpha / (1 + 2^-alpha)
  double upper;  // alpha / (1 - 2^-alpha)
};

EntropyBounds entropy_bounds(double alpha);

// Exact entropy of the two-sided geometric law:
//   H = h2((1-q)/(1+q)) + (2q/(1+q)) * |log2 q| / (1-q)
double closed_form_entropy(const StableModel& m);

// Width of the narrowest conceivable floating format for alpha = 2
// (Gaussian) weights: the exponent entropy upper bound plus 1 sign bit
// plus a minimal 1-bit mantissa, 2/(1 - 1/4) + 2 = 14/3 ~ 4.667 bits.
// An 8-bit container with a 3-bit mantissa cannot reach it; it is quoted
// in reports as the reference point FP8 compresses toward.
double compression_floor_bits();

// Chambers-Mallows-Stuck draw of n symmetric alpha-stable samples,
// deterministic in seed. alpha in (0, 2], gamma > 0.
std::vector<double> sample_stable(double alpha, double gamma, std::size_t n,
                                  std::uint64_t seed);

// floor(log2 |x|) for x != 0.
int ideal_exponent(double x);

// Entropy of the unbounded integer exponent over the samples; exact
// zeros carry no exponent and are skipped.
double empirical_exponent_entropy(std::span<const double> xs);

// SplitMix64: tiny, seedable, well-studied 64-bit generator
// (Steele, Lea, Flood, "Fast splittable pseudorandom number generators").
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform on the open interval (0,1): 53-bit grid offset by half a step,
  // so log() and tan() never see an endpoint.
  double next_unit() {
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

// Per-tensor report assembled by the stats path.
struct EntropyReport {
  std::string name;
  std::uint64_t n_elem = 0;
  double entropy_bits = 0.0;       // exponent-field entropy, <= 4
  double bits_per_symbol = 0.0;    // expected code length of the built code
  double bits_per_weight = 0.0;    // 1 + 3 + bits_per_symbol
  double bound_lower = 0.0;        // model bounds at alpha = 2
  double bound_upper = 0.0;
  double projected_savings = 0.0;  // (4 - bits_per_symbol) / 8
  double actual_savings = 0.0;     // 1 - compressed/original, metadata included
};

}  // namespace ecf8
