#pragma once

// Shared test oracles and fixture builders. Reference implementations here
// are deliberately written on different code paths than the library (matrix
// derived from chromaticity coordinates, eigendecomposition square root) so
// agreement is evidence, not tautology.

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "autostyle/image.hpp"
#include "autostyle/mat2.hpp"

namespace testutil {

// ---------------------------------------------------------------------------
// Reference CIELab converter. The RGB->XYZ matrix is solved from the sRGB
// primaries and D65 white chromaticities instead of using tabulated entries.

struct RefLab {
  double L = 0, a = 0, b = 0;  // L in [0,100]
};

struct RefMatrices {
  std::array<std::array<double, 3>, 3> rgb_to_xyz;
  std::array<double, 3> white;  // Xn, Yn, Zn
};

inline RefMatrices ref_matrices() {
  // primaries (x, y): R(0.64, 0.33) G(0.30, 0.60) B(0.15, 0.06), D65 white
  // (0.3127, 0.3290). Columns are primary XYZ scaled so R+G+B = white.
  const double px[3] = {0.64, 0.30, 0.15};
  const double py[3] = {0.33, 0.60, 0.06};
  const double wx = 0.3127, wy = 0.3290;
  const std::array<double, 3> white = {wx / wy, 1.0, (1.0 - wx - wy) / wy};

  // unscaled primary columns
  double m[3][3];
  for (int c = 0; c < 3; ++c) {
    m[0][c] = px[c] / py[c];
    m[1][c] = 1.0;
    m[2][c] = (1.0 - px[c] - py[c]) / py[c];
  }
  // solve m * s = white by Cramer's rule
  auto det3 = [](const double a[3][3]) {
    return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
           a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
           a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
  };
  const double d = det3(m);
  std::array<double, 3> s;
  for (int c = 0; c < 3; ++c) {
    double t[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) t[i][j] = (j == c) ? white[i] : m[i][j];
    s[c] = det3(t) / d;
  }
  RefMatrices out;
  for (int i = 0; i < 3; ++i)
    for (int c = 0; c < 3; ++c) out.rgb_to_xyz[i][c] = m[i][c] * s[c];
  out.white = white;
  return out;
}

inline double ref_srgb_linearize(double v) {
  return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

inline double ref_lab_f(double t) {
  const double eps = 216.0 / 24389.0;
  const double kappa = 24389.0 / 27.0;
  return t > eps ? std::cbrt(t) : (kappa * t + 16.0) / 116.0;
}

/// gamma is the compression denominator: v^(1/gamma) before linearization.
inline RefLab ref_srgb_to_lab(double r, double g, double b, double gamma) {
  static const RefMatrices M = ref_matrices();
  const double cr = ref_srgb_linearize(std::pow(r, 1.0 / gamma));
  const double cg = ref_srgb_linearize(std::pow(g, 1.0 / gamma));
  const double cb = ref_srgb_linearize(std::pow(b, 1.0 / gamma));
  double xyz[3];
  for (int i = 0; i < 3; ++i)
    xyz[i] = M.rgb_to_xyz[i][0] * cr + M.rgb_to_xyz[i][1] * cg +
             M.rgb_to_xyz[i][2] * cb;
  const double fx = ref_lab_f(xyz[0] / M.white[0]);
  const double fy = ref_lab_f(xyz[1] / M.white[1]);
  const double fz = ref_lab_f(xyz[2] / M.white[2]);
  return RefLab{116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

// ---------------------------------------------------------------------------
// Eigendecomposition square root of a symmetric PSD 2x2 (oracle for the
// closed-form sqrt_spd2).

inline autostyle::Mat2 eig_sqrt(const autostyle::Mat2& m) {
  const double a = m.m00, b = 0.5 * (m.m01 + m.m10), c = m.m11;
  const double half_tr = 0.5 * (a + c);
  const double disc = std::sqrt(std::max(0.0, 0.25 * (a - c) * (a - c) + b * b));
  const double l1 = std::max(0.0, half_tr + disc);
  const double l2 = std::max(0.0, half_tr - disc);
  double vx, vy;  // unit eigenvector for l1
  if (std::abs(b) > 1e-300) {
    vx = b;
    vy = (half_tr + disc) - a;
  } else {
    vx = a >= c ? 1.0 : 0.0;
    vy = a >= c ? 0.0 : 1.0;
  }
  const double n = std::sqrt(vx * vx + vy * vy);
  vx /= n;
  vy /= n;
  const double s1 = std::sqrt(l1), s2 = std::sqrt(l2);
  // S = s1 v v^T + s2 (perp v)(perp v)^T  with perp v = (-vy, vx)
  return autostyle::Mat2{s1 * vx * vx + s2 * vy * vy,
                         s1 * vx * vy - s2 * vy * vx,
                         s1 * vy * vx - s2 * vx * vy,
                         s1 * vy * vy + s2 * vx * vx};
}

/// Random SPD matrix with eigenvalues in [lo, hi].
inline autostyle::Mat2 random_spd(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double theta = u01(rng) * 2.0 * 3.14159265358979323846;
  const double l1 = lo + (hi - lo) * u01(rng);
  const double l2 = lo + (hi - lo) * u01(rng);
  const double cs = std::cos(theta), sn = std::sin(theta);
  return autostyle::Mat2{l1 * cs * cs + l2 * sn * sn, (l1 - l2) * cs * sn,
                         (l1 - l2) * cs * sn, l1 * sn * sn + l2 * cs * cs};
}

// ---------------------------------------------------------------------------
// Synthetic images.

inline autostyle::RgbImage random_rgb(int w, int h, uint64_t seed) {
  autostyle::RgbImage img(w, h);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  for (size_t i = 0; i < img.pixel_count(); ++i) {
    img.r[i] = u(rng);
    img.g[i] = u(rng);
    img.b[i] = u(rng);
  }
  return img;
}

inline autostyle::LabImage random_lab(int w, int h, uint64_t seed,
                                      float ab_span = 40.0f) {
  autostyle::LabImage img(w, h);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> ul(0.0f, 1.0f);
  std::uniform_real_distribution<float> uab(-ab_span, ab_span);
  for (size_t i = 0; i < img.pixel_count(); ++i) {
    img.L[i] = ul(rng);
    img.a[i] = uab(rng);
    img.b[i] = uab(rng);
  }
  return img;
}

/// Lab image whose (a,b) samples are drawn from N(mean, cov) via Cholesky.
inline autostyle::LabImage gaussian_chroma_lab(int w, int h, uint64_t seed,
                                               autostyle::Vec2 mean,
                                               autostyle::Mat2 cov) {
  autostyle::LabImage img(w, h);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<float> ul(0.05f, 0.95f);
  const double c00 = std::sqrt(cov.m00);
  const double c10 = cov.m01 / c00;
  const double c11 = std::sqrt(std::max(0.0, cov.m11 - c10 * c10));
  for (size_t i = 0; i < img.pixel_count(); ++i) {
    const double z0 = gauss(rng), z1 = gauss(rng);
    img.L[i] = ul(rng);
    img.a[i] = float(mean.x + c00 * z0);
    img.b[i] = float(mean.y + c10 * z0 + c11 * z1);
  }
  return img;
}

inline autostyle::LabImage constant_lab(int w, int h, float L, float a,
                                        float b) {
  autostyle::LabImage img(w, h);
  std::fill(img.L.begin(), img.L.end(), L);
  std::fill(img.a.begin(), img.a.end(), a);
  std::fill(img.b.begin(), img.b.end(), b);
  return img;
}

/// Deterministic natural-ish photograph: smooth color gradients plus mild
/// texture noise, different palette per seed.
inline autostyle::RgbImage synth_photo(uint64_t seed, int w, int h) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  const float base_r = 0.2f + 0.6f * u(rng);
  const float base_g = 0.2f + 0.6f * u(rng);
  const float base_b = 0.2f + 0.6f * u(rng);
  const auto clamp01 = [](float v) {
    return v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v);
  };
  autostyle::RgbImage img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const size_t i = img.at(x, y);
      const float fx = float(x) / w, fy = float(y) / h;
      img.r[i] = clamp01(base_r + 0.3f * std::sin(6.28f * fx) +
                         0.1f * (u(rng) - 0.5f));
      img.g[i] = clamp01(base_g + 0.3f * fy + 0.1f * (u(rng) - 0.5f));
      img.b[i] = clamp01(base_b + 0.2f * std::cos(6.28f * fy) +
                         0.1f * (u(rng) - 0.5f));
    }
  return img;
}

}  // namespace testutil
