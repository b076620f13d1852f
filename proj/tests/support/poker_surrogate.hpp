#pragma once

// Stand-in for the POKER-HAND stream: uniformly drawn five-card hands
// (suit 1-4, rank 1-13, ten features) labeled with the ten hand classes.

#include <algorithm>
#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "curie/sca.hpp"

namespace surrogate {

inline curie::Label poker_class(const std::array<int, 5>& suit, const std::array<int, 5>& rank) {
  std::array<int, 14> count{};
  for (int r : rank) ++count[r];
  std::array<int, 5> sorted = rank;
  std::sort(sorted.begin(), sorted.end());

  const bool flush = std::all_of(suit.begin(), suit.end(), [&](int s) { return s == suit[0]; });
  bool distinct = true;
  for (int i = 1; i < 5; ++i) distinct = distinct && sorted[i] != sorted[i - 1];
  const bool royal = distinct && sorted[0] == 1 && sorted[1] == 10 && sorted[4] == 13;
  const bool straight = distinct && (sorted[4] - sorted[0] == 4 || royal);

  if (royal && flush) return 9;
  if (straight && flush) return 8;
  int pairs = 0;
  int threes = 0;
  int fours = 0;
  for (int c : count) {
    pairs += c == 2;
    threes += c == 3;
    fours += c == 4;
  }
  if (fours) return 7;
  if (threes && pairs) return 6;
  if (flush) return 5;
  if (straight) return 4;
  if (threes) return 3;
  if (pairs == 2) return 2;
  if (pairs == 1) return 1;
  return 0;
}

inline std::vector<curie::LabeledInstance> poker_stream(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<curie::LabeledInstance> out;
  out.reserve(n);
  std::array<int, 52> deck{};
  for (int i = 0; i < 52; ++i) deck[i] = i;
  for (std::size_t t = 0; t < n; ++t) {
    // Partial Fisher-Yates: five distinct cards.
    for (int i = 0; i < 5; ++i) {
      const auto j = i + static_cast<int>(rng() % static_cast<std::uint64_t>(52 - i));
      std::swap(deck[i], deck[j]);
    }
    std::array<int, 5> suit{};
    std::array<int, 5> rank{};
    curie::LabeledInstance inst;
    for (int i = 0; i < 5; ++i) {
      suit[i] = deck[i] / 13 + 1;
      rank[i] = deck[i] % 13 + 1;
      inst.features.push_back(suit[i]);
      inst.features.push_back(rank[i]);
    }
    inst.label = poker_class(suit, rank);
    out.push_back(std::move(inst));
  }
  return out;
}

}  // namespace surrogate
