// Copyright (c) 2026 The ECF8 Authors.
// SPDX-License-Identifier: Apache-2.0

#include "ecf8/entropy.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

namespace ecf8 {

std::uint64_t ExponentHistogram::total() const {
  std::uint64_t t = 0;
  for (auto c : counts) t += c;
  return t;
}

ExponentHistogram ExponentHistogram::of_bytes(std::span<const Fp8Byte> fp8) {
  ExponentHistogram h;
  for (auto b : fp8) ++h.counts[exponent_of(b)];
  return h;
}

ExponentHistogram ExponentHistogram::of_symbols(std::span<const ExponentSymbol> symbols) {
  ExponentHistogram h;
  for (auto s : symbols) ++h.counts[s & 0x0f];
  return h;
}

double shannon_entropy(const ExponentHistogram& h) {
  const std::uint64_t total = h.total();
  if (total == 0) throw std::invalid_argument("empty input");
  const double n = static_cast<double>(total);
  double e = 0.0;
  for (auto c : h.counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    e -= p * std::log2(p);
  }
  return e < 0.0 ? 0.0 : e;
}

StableModel::StableModel(double a, double g, double d) : alpha(a), gamma(g), delta(d) {
  if (!(alpha > 0.0) || !(alpha <= 2.0))
    throw std::invalid_argument("alpha must be in (0, 2]");
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
}

double StableModel::q() const { return std::exp2(-alpha); }

double geometric_pmf(const StableModel& m, int k) {
  const double q = m.q();
  return (1.0 - q) / (1.0 + q) * std::pow(q, std::abs(k));
}

EntropyBounds entropy_bounds(double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  const double q = std::exp2(-alpha);
  return {alpha / (1.0 + q), alpha / (1.0 - q)};
}

namespace {

double binary_entropy(double p) {
  double e = 0.0;
  if (p > 0.0) e -= p * std::log2(p);
  if (p < 1.0) e -= (1.0 - p) * std::log2(1.0 - p);
  return e;
}

}  // namespace

double closed_form_entropy(const StableModel& m) {
  const double q = m.q();
  const double p0 = (1.0 - q) / (1.0 + q);
  return binary_entropy(p0) + (2.0 * q / (1.0 + q)) * (std::fabs(std::log2(q)) / (1.0 - q));
}

double compression_floor_bits() { return entropy_bounds(2.0).upper + 1.0 + 1.0; }

std::vector<double> sample_stable(double alpha, double gamma, std::size_t n,
                                  std::uint64_t seed) {
  if (!(alpha > 0.0) || !(alpha <= 2.0))
    throw std::invalid_argument("alpha must be in (0, 2]");
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");

  std::vector<double> out;
  out.reserve(n);
  SplitMix64 rng(seed);
  const double inv_alpha = 1.0 / alpha;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = std::numbers::pi * (rng.next_unit() - 0.5);  // U(-pi/2, pi/2)
    const double w = -std::log(rng.next_unit());                  // Exp(1)
    double x;
    if (alpha == 1.0) {
      // Cauchy; the general formula's (1-alpha)/alpha exponent degenerates.
      x = std::tan(v);
    } else {
      x = std::sin(alpha * v) / std::pow(std::cos(v), inv_alpha) *
          std::pow(std::cos((1.0 - alpha) * v) / w, (1.0 - alpha) * inv_alpha);
    }
    out.push_back(gamma * x);
  }
  return out;
}

int ideal_exponent(double x) {
  if (x == 0.0) throw std::invalid_argument("zero has no exponent");
  return std::ilogb(x);
}

double empirical_exponent_entropy(std::span<const double> xs) {
  std::map<int, std::uint64_t> hist;
  std::uint64_t total = 0;
  for (double x : xs) {
    if (x == 0.0) continue;
    ++hist[std::ilogb(x)];
    ++total;
  }
  if (total == 0) throw std::invalid_argument("empty input");
  const double n = static_cast<double>(total);
  double e = 0.0;
  for (const auto& [k, c] : hist) {
    const double p = static_cast<double>(c) / n;
    e -= p * std::log2(p);
  }
  return e < 0.0 ? 0.0 : e;
}

}  // namespace ecf8
