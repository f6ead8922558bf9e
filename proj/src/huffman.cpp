// Copyright (c) 2026 The ECF8 Authors.
// SPDX-License-Identifier: Apache-2.0

#include "ecf8/huffman.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>
#include <vector>

namespace ecf8 {

int CodeTable::present_count() const {
  int n = 0;
  for (auto l : lengths)
    if (l != 0) ++n;
  return n;
}

int CodeTable::max_length() const {
  int m = 0;
  for (auto l : lengths) m = std::max<int>(m, l);
  return m;
}

namespace {

// One package-merge item: a singleton leaf or a package of two items from
// the level below. leaves[s] counts how often symbol s appears inside;
// summing it over the chosen items yields the code length of s.
struct PmItem {
  std::uint64_t weight = 0;
  std::array<std::uint32_t, kNumSymbols> leaves{};
};

PmItem combine(const PmItem& a, const PmItem& b) {
  PmItem p;
  p.weight = a.weight + b.weight;
  for (int s = 0; s < kNumSymbols; ++s) p.leaves[s] = a.leaves[s] + b.leaves[s];
  return p;
}

// Weight-ordered merge. Packages win ties: that choice reproduces the
// classic textbook tree shapes for small histograms (deep codes for the
// rare symbols rather than a balanced split of equal-weight subtrees).
std::vector<PmItem> merge_lists(const std::vector<PmItem>& singles,
                                const std::vector<PmItem>& packs) {
  std::vector<PmItem> out;
  out.reserve(singles.size() + packs.size());
  std::size_t i = 0, j = 0;
  while (i < singles.size() || j < packs.size()) {
    if (i == singles.size()) {
      out.push_back(packs[j++]);
    } else if (j == packs.size()) {
      out.push_back(singles[i++]);
    } else if (packs[j].weight <= singles[i].weight) {
      out.push_back(packs[j++]);
    } else {
      out.push_back(singles[i++]);
    }
  }
  return out;
}

std::array<std::uint8_t, kNumSymbols> package_merge_lengths(const ExponentHistogram& h) {
  // Singletons sorted by (count, symbol index).
  std::vector<std::pair<std::uint64_t, int>> present;
  for (int s = 0; s < kNumSymbols; ++s)
    if (h.counts[s] > 0) present.emplace_back(h.counts[s], s);
  std::sort(present.begin(), present.end());

  std::vector<PmItem> singles;
  singles.reserve(present.size());
  for (const auto& [w, s] : present) {
    PmItem it;
    it.weight = w;
    it.leaves[s] = 1;
    singles.push_back(it);
  }

  // The level-L list is just the singletons. Each coarser level pairs off
  // adjacent items (odd leftover dropped) and re-merges with the
  // singletons, down to level 1.
  std::vector<PmItem> items = singles;
  for (int level = kMaxCodeLength - 1; level >= 1; --level) {
    std::vector<PmItem> packs;
    packs.reserve(items.size() / 2);
    for (std::size_t i = 0; i + 1 < items.size(); i += 2)
      packs.push_back(combine(items[i], items[i + 1]));
    items = merge_lists(singles, packs);
  }

  // The 2(n-1) cheapest level-1 items contain each symbol exactly as many
  // times as its optimal code length. With n <= 16 << 2^16 the list is
  // always long enough.
  const std::size_t take = 2 * (present.size() - 1);
  assert(items.size() >= take);
  std::array<std::uint8_t, kNumSymbols> lengths{};
  std::array<std::uint32_t, kNumSymbols> tally{};
  for (std::size_t i = 0; i < take; ++i)
    for (int s = 0; s < kNumSymbols; ++s) tally[s] += items[i].leaves[s];
  for (int s = 0; s < kNumSymbols; ++s) {
    assert(tally[s] <= kMaxCodeLength);
    lengths[s] = static_cast<std::uint8_t>(tally[s]);
  }
  return lengths;
}

}  // namespace

CodeTable build_code(const ExponentHistogram& h) {
  if (h.total() == 0) throw std::invalid_argument("empty input");

  std::array<std::uint8_t, kNumSymbols> lengths{};
  int only = -1;
  int n_present = 0;
  for (int s = 0; s < kNumSymbols; ++s) {
    if (h.counts[s] > 0) {
      ++n_present;
      only = s;
    }
  }
  if (n_present == 1) {
    lengths[only] = 1;
  } else {
    lengths = package_merge_lengths(h);
  }
  return canonical_codes(lengths);
}

CodeTable canonical_codes(const std::array<std::uint8_t, kNumSymbols>& lengths) {
  // (length, symbol) order; Kraft sum tracked in units of 2^-16.
  std::vector<std::pair<std::uint8_t, int>> order;
  std::uint64_t kraft = 0;
  for (int s = 0; s < kNumSymbols; ++s) {
    if (lengths[s] == 0) continue;
    if (lengths[s] > kMaxCodeLength) throw std::invalid_argument("invalid length vector");
    kraft += 1ull << (kMaxCodeLength - lengths[s]);
    order.emplace_back(lengths[s], s);
  }
  if (order.empty() || kraft > (1ull << kMaxCodeLength))
    throw std::invalid_argument("invalid length vector");
  std::sort(order.begin(), order.end());

  CodeTable t;
  t.lengths = lengths;
  std::uint32_t code = 0;
  int prev_len = order.front().first;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const auto [len, sym] = order[i];
    if (i > 0) code = (code + 1) << (len - prev_len);
    assert(code < (1u << len));
    t.codes[sym] = static_cast<std::uint16_t>(code);
    prev_len = len;
  }
  return t;
}

double expected_length(const CodeTable& t, const ExponentHistogram& h) {
  const std::uint64_t total = h.total();
  if (total == 0) throw std::invalid_argument("empty input");
  std::uint64_t bits = 0;
  for (int s = 0; s < kNumSymbols; ++s) {
    if (h.counts[s] == 0) continue;
    if (t.lengths[s] == 0) throw std::invalid_argument("symbol absent from code table");
    bits += h.counts[s] * t.lengths[s];
  }
  return static_cast<double>(bits) / static_cast<double>(total);
}

}  // namespace ecf8
