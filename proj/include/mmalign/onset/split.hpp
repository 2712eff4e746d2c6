#pragma once

// Show-level train/validation/test partition.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "mmalign/error.hpp"
#include "mmalign/random.hpp"

namespace mmalign::onset {

enum class Fold { train, val, test };

inline std::string to_string(Fold f) {
  switch (f) {
    case Fold::train: return "train";
    case Fold::val: return "val";
    case Fold::test: return "test";
  }
  return "?";
}

using SplitRatios = std::array<double, 3>;
inline constexpr SplitRatios kDefaultSplitRatios = {62.0 / 90.0, 14.0 / 90.0, 14.0 / 90.0};

struct SplitAssignment {
  std::map<std::string, Fold> fold_of;

  std::vector<std::string> shows(Fold f) const {
    std::vector<std::string> out;
    for (const auto& [id, g] : fold_of) {
      if (g == f) out.push_back(id);
    }
    return out;
  }
  std::size_t size(Fold f) const {
    return static_cast<std::size_t>(
        std::count_if(fold_of.begin(), fold_of.end(), [f](const auto& kv) { return kv.second == f; }));
  }
};

/// Fold sizes for n shows: floor(n * ratio), then leftover shows go one each
/// to the folds with the largest fractional parts (ties in train, val, test
/// order). Any fold left empty takes a show from the largest fold.
inline std::array<std::size_t, 3> split_sizes(std::size_t n, const SplitRatios& ratios) {
  double sum = 0.0;
  for (double r : ratios) {
    if (!(r >= 0.0)) throw InvariantError("split ratios must be non-negative");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InvariantError("split ratios must sum to 1");
  if (n < 3) throw InvariantError("need at least 3 shows for a train/val/test split, got " + std::to_string(n));

  std::array<std::size_t, 3> sizes{};
  std::array<double, 3> frac{};
  std::size_t used = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double exact = static_cast<double>(n) * ratios[i];
    // Guard against 62/90 * 90 landing just below an integer.
    const double fl = std::floor(exact + 1e-9);
    sizes[i] = static_cast<std::size_t>(fl);
    frac[i] = std::max(0.0, exact - fl);
    used += sizes[i];
  }
  std::array<std::size_t, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return frac[a] > frac[b] + 1e-12; });
  for (std::size_t k = 0; used < n; k = (k + 1) % 3) {
    ++sizes[order[k]];
    ++used;
  }
  for (std::size_t i = 0; i < 3; ++i) {
    if (sizes[i] > 0) continue;
    const auto donor = static_cast<std::size_t>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
    --sizes[donor];
    ++sizes[i];
  }
  return sizes;
}

/// Seeded shuffle of the (sorted, de-duplicated) show ids, cut into folds by
/// split_sizes. The result does not depend on the input order.
inline SplitAssignment group_split(std::span<const std::string> show_ids, const SplitRatios& ratios,
                                   std::uint64_t seed) {
  std::vector<std::string> ids(show_ids.begin(), show_ids.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  const auto sizes = split_sizes(ids.size(), ratios);
  Rng rng(seed);
  shuffle(std::span<std::string>(ids), rng);
  SplitAssignment out;
  std::size_t i = 0;
  for (std::size_t f = 0; f < 3; ++f) {
    for (std::size_t k = 0; k < sizes[f]; ++k) out.fold_of[ids[i++]] = static_cast<Fold>(f);
  }
  return out;
}

}  // namespace mmalign::onset
