#include "autostyle/stylestats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "autostyle/error.hpp"
#include "quantile.hpp"

namespace autostyle {

namespace {

// Statistics are computed on at most 512^2 samples taken on a regular grid,
// so descriptor extraction stays flat-cost on large photographs while
// remaining deterministic.
constexpr size_t kMaxStatSamples = 512 * 512;

int sample_stride(int width, int height) {
  int stride = 1;
  auto samples = [&](int s) {
    return (static_cast<size_t>(width) + s - 1) / s *
           ((static_cast<size_t>(height) + s - 1) / s);
  };
  while (samples(stride) > kMaxStatSamples) ++stride;
  return stride;
}

template <typename Fn>
void for_each_sample(const LabImage& img, Fn&& fn) {
  int stride = sample_stride(img.width, img.height);
  for (int y = 0; y < img.height; y += stride) {
    for (int x = 0; x < img.width; x += stride) {
      fn(img.at(x, y));
    }
  }
}

}  // namespace

ChromaStats chroma_stats(const LabImage& img) {
  double sum_a = 0.0, sum_b = 0.0;
  size_t n = 0;
  for_each_sample(img, [&](size_t i) {
    sum_a += img.a[i];
    sum_b += img.b[i];
    ++n;
  });
  double mean_a = sum_a / static_cast<double>(n);
  double mean_b = sum_b / static_cast<double>(n);

  double saa = 0.0, sab = 0.0, sbb = 0.0;
  for_each_sample(img, [&](size_t i) {
    double da = img.a[i] - mean_a;
    double db = img.b[i] - mean_b;
    saa += da * da;
    sab += da * db;
    sbb += db * db;
  });
  double inv_n = 1.0 / static_cast<double>(n);

  ChromaStats stats;
  stats.mean = {mean_a, mean_b};
  stats.cov = {saa * inv_n, sab * inv_n, sab * inv_n, sbb * inv_n};
  return stats;
}

LumaFeature luma_feature(const LabImage& img) {
  std::vector<float> samples;
  samples.reserve(std::min(img.pixel_count(), size_t{512 * 512}));
  for_each_sample(img, [&](size_t i) { samples.push_back(img.L[i]); });
  std::sort(samples.begin(), samples.end());

  LumaFeature f;
  for (int i = 0; i < kLumaFeatureSize; ++i) {
    double level = (i + 0.5) / kLumaFeatureSize;
    f.q[i] = detail::quantile_sorted(samples, level);
  }
  return f;
}

Mat2 sqrt_spd2(const Mat2& m) {
  double scale = std::max(1.0, std::abs(m.m00) + std::abs(m.m11));
  if (std::abs(m.m01 - m.m10) > 1e-9 * scale) {
    throw Error(Errc::not_symmetric, "matrix square root needs symmetry");
  }
  Mat2 s = m.symmetrized();
  double tr = s.trace();
  double det = s.det();
  // Smallest eigenvalue of a symmetric 2x2: (tr - sqrt(disc)) / 2.
  double disc = (s.m00 - s.m11) * (s.m00 - s.m11) + 4.0 * s.m01 * s.m01;
  double min_eig = 0.5 * (tr - std::sqrt(disc));
  if (min_eig < -1e-9 * scale) {
    throw Error(Errc::negative_eigenvalue,
                "matrix square root needs a PSD matrix");
  }

  double root_det = std::sqrt(std::max(det, 0.0));
  double denom_sq = std::max(tr, 0.0) + 2.0 * root_det;
  if (denom_sq <= 0.0) return Mat2{};  // zero matrix
  double inv_denom = 1.0 / std::sqrt(denom_sq);
  Mat2 out = (s + Mat2::identity() * root_det) * inv_denom;
  return out.symmetrized();
}

StyleDescriptor style_descriptor(const LabImage& img) {
  return {chroma_stats(img), luma_feature(img)};
}

}  // namespace autostyle
