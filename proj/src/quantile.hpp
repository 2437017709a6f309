#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace autostyle::detail {

/// Quantile with linear interpolation between order statistics, on data that
/// is already sorted ascending.
inline double quantile_sorted(const std::vector<float>& sorted, double level) {
  size_t n = sorted.size();
  if (n == 1) return sorted[0];
  double pos = level * static_cast<double>(n - 1);
  size_t i0 = static_cast<size_t>(pos);
  if (i0 >= n - 1) return sorted[n - 1];
  double frac = pos - static_cast<double>(i0);
  return sorted[i0] + frac * (sorted[i0 + 1] - sorted[i0]);
}

/// Same quantile rule evaluated with exact selection instead of a full sort.
/// Mutates `scratch`. Cheaper than sorting for one or two levels on large
/// planes; results are identical to quantile_sorted.
inline double quantile_select(std::vector<float>& scratch, double level) {
  size_t n = scratch.size();
  if (n == 1) return scratch[0];
  double pos = level * static_cast<double>(n - 1);
  size_t i0 = static_cast<size_t>(pos);
  if (i0 >= n - 1) {
    return *std::max_element(scratch.begin(), scratch.end());
  }
  double frac = pos - static_cast<double>(i0);
  std::nth_element(scratch.begin(), scratch.begin() + i0, scratch.end());
  double v0 = scratch[i0];
  if (frac == 0.0) return v0;
  double v1 = *std::min_element(scratch.begin() + i0 + 1, scratch.end());
  return v0 + frac * (v1 - v0);
}

}  // namespace autostyle::detail
