#pragma once

#include <cstddef>
#include <vector>

namespace autostyle {

/// Planar RGB image. Samples are gamma-encoded sRGB values in [0,1], exactly
/// as stored in the source file (8-bit values map to v/255 on decode).
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<float> r, g, b;

  RgbImage() = default;
  RgbImage(int w, int h)
      : width(w),
        height(h),
        r(static_cast<size_t>(w) * h, 0.0f),
        g(static_cast<size_t>(w) * h, 0.0f),
        b(static_cast<size_t>(w) * h, 0.0f) {}

  size_t pixel_count() const { return static_cast<size_t>(width) * height; }
  size_t at(int x, int y) const { return static_cast<size_t>(y) * width + x; }
};

/// Planar CIELab image. L is L*/100 so the luminance plane lives in [0,1];
/// a and b stay in standard Lab units (roughly [-128, 127]).
struct LabImage {
  int width = 0;
  int height = 0;
  std::vector<float> L, a, b;

  LabImage() = default;
  LabImage(int w, int h)
      : width(w),
        height(h),
        L(static_cast<size_t>(w) * h, 0.0f),
        a(static_cast<size_t>(w) * h, 0.0f),
        b(static_cast<size_t>(w) * h, 0.0f) {}

  size_t pixel_count() const { return static_cast<size_t>(width) * height; }
  size_t at(int x, int y) const { return static_cast<size_t>(y) * width + x; }
};

}  // namespace autostyle
