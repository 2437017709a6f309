#pragma once

#include <cmath>

namespace autostyle {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const { return std::sqrt(x * x + y * y); }
};

/// Row-major 2x2 matrix: [m00 m01; m10 m11].
struct Mat2 {
  double m00 = 0.0, m01 = 0.0;
  double m10 = 0.0, m11 = 0.0;

  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static Mat2 diagonal(double d0, double d1) { return {d0, 0.0, 0.0, d1}; }

  double trace() const { return m00 + m11; }
  double det() const { return m00 * m11 - m01 * m10; }

  Mat2 transposed() const { return {m00, m10, m01, m11}; }
  Mat2 symmetrized() const {
    double off = 0.5 * (m01 + m10);
    return {m00, off, off, m11};
  }

  Mat2 operator+(const Mat2& o) const {
    return {m00 + o.m00, m01 + o.m01, m10 + o.m10, m11 + o.m11};
  }
  Mat2 operator-(const Mat2& o) const {
    return {m00 - o.m00, m01 - o.m01, m10 - o.m10, m11 - o.m11};
  }
  Mat2 operator*(double s) const { return {m00 * s, m01 * s, m10 * s, m11 * s}; }
  Mat2 operator*(const Mat2& o) const {
    return {m00 * o.m00 + m01 * o.m10, m00 * o.m01 + m01 * o.m11,
            m10 * o.m00 + m11 * o.m10, m10 * o.m01 + m11 * o.m11};
  }
  Vec2 operator*(const Vec2& v) const {
    return {m00 * v.x + m01 * v.y, m10 * v.x + m11 * v.y};
  }

  /// Inverse without singularity checks; callers guard det themselves.
  Mat2 inverse() const {
    double d = det();
    double inv = 1.0 / d;
    return {m11 * inv, -m01 * inv, -m10 * inv, m00 * inv};
  }
};

}  // namespace autostyle
