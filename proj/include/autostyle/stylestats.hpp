#pragma once

#include <array>

#include "autostyle/image.hpp"
#include "autostyle/mat2.hpp"

namespace autostyle {

inline constexpr int kLumaFeatureSize = 32;

/// Mean and population covariance of the (a,b) chrominance planes, i.e. the
/// Gaussian N(mu, Sigma) that the chroma mapping and both style metrics
/// operate on.
struct ChromaStats {
  Vec2 mean;
  Mat2 cov;
};

/// 32 uniformly sampled percentiles of the luminance CDF, nondecreasing,
/// levels (i+0.5)/32.
struct LumaFeature {
  std::array<double, kLumaFeatureSize> q{};
};

/// Complete per-image style representation.
struct StyleDescriptor {
  ChromaStats chroma;
  LumaFeature luma;
};

ChromaStats chroma_stats(const LabImage& img);

LumaFeature luma_feature(const LabImage& img);

/// Principal square root of a symmetric PSD 2x2 matrix via the closed form
/// S = (M + sqrt(det M) I) / sqrt(tr M + 2 sqrt(det M)). The zero matrix maps
/// to the zero matrix. Throws Errc::not_symmetric / Errc::negative_eigenvalue
/// when the input is outside the SPD cone beyond tolerance.
Mat2 sqrt_spd2(const Mat2& m);

StyleDescriptor style_descriptor(const LabImage& img);

}  // namespace autostyle
