#include "autostyle/similarity.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include "autostyle/error.hpp"

namespace autostyle {

namespace {

Mat2 regularized(const Mat2& cov) {
  const Mat2 sym = cov.symmetrized();
  if (sym.det() > 0.0) return sym;
  return sym + Mat2::diagonal(1e-9, 1e-9);
}

}  // namespace

double hellinger(const ChromaStats& p, const ChromaStats& s, double epsilon) {
  const Mat2 cp = regularized(p.cov);
  const Mat2 cs = regularized(s.cov);
  const Mat2 avg = (cp + cs) * 0.5;
  const double det_avg = avg.det();
  if (det_avg <= 0.0)
    throw Error(Errc::singular_covariance,
                "averaged chroma covariance is singular");

  const Vec2 mbar{std::abs(p.mean.x - s.mean.x) + epsilon,
                  std::abs(p.mean.y - s.mean.y) + epsilon};
  const Vec2 solved = avg.inverse() * mbar;
  const double quad = mbar.dot(solved);
  // determinant AM-GM keeps this coefficient <= 1 for PSD inputs
  const double coeff =
      std::pow(cp.det() * cs.det(), 0.25) / std::sqrt(det_avg);
  const double d = 1.0 - coeff * std::exp(-0.125 * quad);
  return std::clamp(d, 0.0, 1.0);
}

double style_similarity(const StyleDescriptor& p, const StyleDescriptor& s,
                        const SimilarityParams& params) {
  double de2 = 0.0;
  for (size_t i = 0; i < kLumaFeatureSize; ++i) {
    const double d = p.luma.q[i] - s.luma.q[i];
    de2 += d * d;
  }
  if (params.normalize_luma_distance) de2 /= double(kLumaFeatureSize);
  const double dh = hellinger(p.chroma, s.chroma, params.epsilon);
  return std::exp(-de2 / params.lambda_l) * std::exp(-dh * dh / params.lambda_c);
}

double frechet(const ChromaStats& p, const ChromaStats& q) {
  const double dx = p.mean.x - q.mean.x;
  const double dy = p.mean.y - q.mean.y;
  const double mean_sq = dx * dx + dy * dy;

  Mat2 cp = p.cov.symmetrized();
  Mat2 cq = q.cov.symmetrized();
  // equal covariances reduce to the plain mean distance; ordering the
  // covariance pair makes the trace term independent of argument order,
  // so d(p,q) == d(q,p) and d(p,p) == 0 hold bitwise, not just analytically
  const auto key = [](const Mat2& m) {
    return std::array<double, 3>{m.m00, m.m01, m.m11};
  };
  if (key(cp) == key(cq)) return std::sqrt(mean_sq);
  if (key(cq) < key(cp)) std::swap(cp, cq);

  const Mat2 root_p = sqrt_spd2(cp);
  const Mat2 inner = (root_p * cq * root_p).symmetrized();
  const double cross = sqrt_spd2(inner).trace();
  const double trace_term =
      std::max(0.0, cp.trace() + cq.trace() - 2.0 * cross);
  return std::sqrt(mean_sq + trace_term);
}

}  // namespace autostyle
