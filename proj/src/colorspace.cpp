#include "autostyle/colorspace.hpp"

#include <algorithm>
#include <cmath>

#include "autostyle/error.hpp"
#include "quantile.hpp"

namespace autostyle {

namespace {

// D65 reference white, 2 degree observer.
constexpr double kXn = 0.95047;
constexpr double kYn = 1.00000;
constexpr double kZn = 1.08883;

// CIE constants in their exact rational form.
constexpr double kLabEps = 216.0 / 24389.0;   // (6/29)^3
constexpr double kLabKappa = 24389.0 / 27.0;  // (29/3)^3
constexpr double kLabCube = 6.0 / 29.0;

// IEC 61966-2-1 sRGB <-> XYZ (D65) matrices.
constexpr double kRgbToXyz[9] = {0.4124564, 0.3575761, 0.1804375,
                                 0.2126729, 0.7151522, 0.0721750,
                                 0.0193339, 0.1191920, 0.9503041};
constexpr float kXyzToRgb[9] = {3.2404542f,  -1.5371385f, -0.4985314f,
                                -0.9692660f, 1.8760108f,  0.0415560f,
                                0.0556434f,  -0.2040259f, 1.0572252f};

inline float srgb_linearize(float u) {
  return u <= 0.04045f ? u * (1.0f / 12.92f)
                       : std::pow((u + 0.055f) * (1.0f / 1.055f), 2.4f);
}

inline float srgb_encode(float u) {
  return u <= 0.0031308f ? 12.92f * u
                         : 1.055f * std::pow(u, 1.0f / 2.4f) - 0.055f;
}

inline float lab_f(float t) {
  return t > static_cast<float>(kLabEps)
             ? std::cbrt(t)
             : (static_cast<float>(kLabKappa) * t + 16.0f) * (1.0f / 116.0f);
}

inline float lab_f_inv(float t) {
  return t > static_cast<float>(kLabCube)
             ? t * t * t
             : (116.0f * t - 16.0f) * static_cast<float>(1.0 / kLabKappa);
}

inline float clamp01(float v) { return std::clamp(v, 0.0f, 1.0f); }

}  // namespace

LabImage srgb_to_lab(const RgbImage& rgb, double gamma) {
  LabImage out(rgb.width, rgb.height);
  const float inv_gamma = static_cast<float>(1.0 / gamma);
  const size_t n = rgb.pixel_count();
  for (size_t i = 0; i < n; ++i) {
    float r = srgb_linearize(std::pow(rgb.r[i], inv_gamma));
    float g = srgb_linearize(std::pow(rgb.g[i], inv_gamma));
    float b = srgb_linearize(std::pow(rgb.b[i], inv_gamma));

    float x = static_cast<float>(kRgbToXyz[0]) * r +
              static_cast<float>(kRgbToXyz[1]) * g +
              static_cast<float>(kRgbToXyz[2]) * b;
    float y = static_cast<float>(kRgbToXyz[3]) * r +
              static_cast<float>(kRgbToXyz[4]) * g +
              static_cast<float>(kRgbToXyz[5]) * b;
    float z = static_cast<float>(kRgbToXyz[6]) * r +
              static_cast<float>(kRgbToXyz[7]) * g +
              static_cast<float>(kRgbToXyz[8]) * b;

    float fx = lab_f(x * static_cast<float>(1.0 / kXn));
    float fy = lab_f(y * static_cast<float>(1.0 / kYn));
    float fz = lab_f(z * static_cast<float>(1.0 / kZn));

    out.L[i] = (116.0f * fy - 16.0f) * 0.01f;
    out.a[i] = 500.0f * (fx - fy);
    out.b[i] = 200.0f * (fy - fz);
  }
  return out;
}

RgbImage lab_to_srgb(const LabImage& lab, double gamma) {
  RgbImage out(lab.width, lab.height);
  const float g = static_cast<float>(gamma);
  const size_t n = lab.pixel_count();
  for (size_t i = 0; i < n; ++i) {
    float fy = (100.0f * lab.L[i] + 16.0f) * (1.0f / 116.0f);
    float fx = fy + lab.a[i] * (1.0f / 500.0f);
    float fz = fy - lab.b[i] * (1.0f / 200.0f);

    float x = static_cast<float>(kXn) * lab_f_inv(fx);
    float y = static_cast<float>(kYn) * lab_f_inv(fy);
    float z = static_cast<float>(kZn) * lab_f_inv(fz);

    float r = kXyzToRgb[0] * x + kXyzToRgb[1] * y + kXyzToRgb[2] * z;
    float gg = kXyzToRgb[3] * x + kXyzToRgb[4] * y + kXyzToRgb[5] * z;
    float b = kXyzToRgb[6] * x + kXyzToRgb[7] * y + kXyzToRgb[8] * z;

    out.r[i] = clamp01(std::pow(srgb_encode(clamp01(r)), g));
    out.g[i] = clamp01(std::pow(srgb_encode(clamp01(gg)), g));
    out.b[i] = clamp01(std::pow(srgb_encode(clamp01(b)), g));
  }
  return out;
}

LabImage stretch_luminance(const LabImage& lab, double clip_fraction) {
  std::vector<float> scratch = lab.L;
  double lo = detail::quantile_select(scratch, clip_fraction);
  double hi = detail::quantile_select(scratch, 1.0 - clip_fraction);
  if (hi <= lo) {
    throw Error(Errc::degenerate_luminance,
                "luminance quantiles coincide; nothing to stretch");
  }
  LabImage out = lab;
  const float flo = static_cast<float>(lo);
  const float scale = static_cast<float>(1.0 / (hi - lo));
  for (float& v : out.L) {
    v = clamp01((v - flo) * scale);
  }
  return out;
}

LabImage preprocess_image(const RgbImage& rgb, double gamma,
                          double clip_fraction, bool* stretch_skipped) {
  LabImage lab = srgb_to_lab(rgb, gamma);
  if (stretch_skipped) *stretch_skipped = false;
  try {
    return stretch_luminance(lab, clip_fraction);
  } catch (const Error& e) {
    if (e.code() != Errc::degenerate_luminance) throw;
    if (stretch_skipped) *stretch_skipped = true;
    return lab;
  }
}

}  // namespace autostyle
