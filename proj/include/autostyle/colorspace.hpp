#pragma once

#include "autostyle/image.hpp"

namespace autostyle {

inline constexpr double kDefaultGamma = 2.2;
inline constexpr double kDefaultClipFraction = 0.005;

/// Compresses each channel with v^(1/gamma), then converts the compressed
/// values through sRGB -> XYZ (D65) -> CIELab. L is stored as L*/100.
LabImage srgb_to_lab(const RgbImage& rgb, double gamma = kDefaultGamma);

/// Inverse of srgb_to_lab. Out-of-gamut pixels are clamped to [0,1].
RgbImage lab_to_srgb(const LabImage& lab, double gamma = kDefaultGamma);

/// Affinely remaps L so the clip_fraction and (1-clip_fraction) quantiles
/// land on 0 and 1, clamping the tails. Chrominance is untouched.
/// Throws Errc::degenerate_luminance when the two quantiles coincide.
LabImage stretch_luminance(const LabImage& lab,
                           double clip_fraction = kDefaultClipFraction);

/// Preprocessing chain used ahead of every statistic and transfer:
/// gamma compression, Lab conversion, luminance stretch. A constant-luminance
/// image skips the stretch instead of failing.
LabImage preprocess_image(const RgbImage& rgb, double gamma = kDefaultGamma,
                          double clip_fraction = kDefaultClipFraction,
                          bool* stretch_skipped = nullptr);

}  // namespace autostyle
