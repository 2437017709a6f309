#include "autostyle/transfer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "autostyle/colorspace.hpp"
#include "autostyle/error.hpp"
#include "quantile.hpp"

namespace autostyle {

namespace {

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

}  // namespace

ChromaMap chroma_transform(const ChromaStats& input, const ChromaStats& style,
                           double lambda_r) {
  const Mat2 raw = input.cov.symmetrized();
  double saa = raw.m00;
  double sbb = raw.m11;
  const double var_prod = std::max(saa, 0.0) * std::max(sbb, 0.0);
  double rho = var_prod > 0.0 ? raw.m01 / std::sqrt(var_prod) : 0.0;

  bool clipped = false;
  if (saa < lambda_r) { saa = lambda_r; clipped = true; }
  if (sbb < lambda_r) { sbb = lambda_r; clipped = true; }
  if (rho > 0.999) { rho = 0.999; clipped = true; }
  if (rho < -0.999) { rho = -0.999; clipped = true; }

  // Untouched inputs keep their covariance bit-for-bit so the moment match
  // is exact; otherwise the off-diagonal is rebuilt from the preserved
  // correlation coefficient.
  Mat2 sigma_in = raw;
  if (clipped) {
    const double sab = rho * std::sqrt(saa * sbb);
    sigma_in = Mat2{saa, sab, sab, sbb};
  }
  if (!(sigma_in.det() > 0.0)) {
    throw Error(Errc::singular_covariance,
                "regularized chroma covariance is singular");
  }

  const Mat2 half = sqrt_spd2(sigma_in);
  const Mat2 half_inv = half.inverse();
  const Mat2 mid = (half * style.cov.symmetrized() * half).symmetrized();
  const Mat2 mid_half = sqrt_spd2(mid);

  ChromaMap map;
  map.T = (half_inv * mid_half * half_inv).symmetrized();
  map.mu_in = input.mean;
  map.mu_style = style.mean;
  return map;
}

LabImage apply_chroma(const LabImage& img, const ChromaMap& map) {
  LabImage out = img;
  const double t00 = map.T.m00, t01 = map.T.m01;
  const double t10 = map.T.m10, t11 = map.T.m11;
  const size_t n = img.pixel_count();
  for (size_t i = 0; i < n; ++i) {
    const double a = double(img.a[i]) - map.mu_in.x;
    const double b = double(img.b[i]) - map.mu_in.y;
    out.a[i] = float(t00 * a + t01 * b + map.mu_style.x);
    out.b[i] = float(t10 * a + t11 * b + map.mu_style.y);
  }
  return out;
}

double tone_curve_eval(const ToneCurveParams& params, double l) {
  const double m = params.m;
  const double d = params.delta;
  const double k0 = std::atan(m / d);
  const double k1 = std::atan((1.0 - m) / d);
  return (k0 + std::atan((l - m) / d)) / (k0 + k1);
}

namespace {

struct ToneTarget {
  std::array<double, kLumaFeatureSize> in;
  std::array<double, kLumaFeatureSize> want;
};

double tone_fit_cost(const ToneTarget& t, double m, double d) {
  const double k0 = std::atan(m / d);
  const double k1 = std::atan((1.0 - m) / d);
  const double inv = 1.0 / (k0 + k1);
  double cost = 0.0;
  for (size_t i = 0; i < kLumaFeatureSize; ++i) {
    const double g = (k0 + std::atan((t.in[i] - m) / d)) * inv;
    const double e = g - t.want[i];
    cost += e * e;
  }
  return cost;
}

}  // namespace

ToneCurveParams fit_tone_curve(const LumaFeature& l_in,
                               const LumaFeature& l_style, double tau,
                               bool literal_tau_rule) {
  double d_inf = 0.0;
  for (size_t i = 0; i < kLumaFeatureSize; ++i)
    d_inf = std::max(d_inf, std::abs(l_style.q[i] - l_in.q[i]));

  // Default caps the percentile displacement at tau; the literal variant
  // instead amplifies sub-tau displacements up to the full style distance.
  double factor;
  if (literal_tau_rule)
    factor = d_inf == 0.0 ? 1.0 : tau / std::min(tau, d_inf);
  else
    factor = tau / std::max(tau, d_inf);

  ToneTarget target;
  for (size_t i = 0; i < kLumaFeatureSize; ++i) {
    target.in[i] = l_in.q[i];
    target.want[i] = l_in.q[i] + factor * (l_style.q[i] - l_in.q[i]);
  }

  double best_m = 0.5;
  double best_d = kToneDeltaMax;
  double best_cost = std::numeric_limits<double>::infinity();
  const auto scan = [&](double m_lo, double m_hi, double d_lo, double d_hi,
                        int n) {
    const double ratio = d_hi / d_lo;
    for (int i = 0; i < n; ++i) {
      const double m = m_lo + (m_hi - m_lo) * i / (n - 1);
      for (int j = 0; j < n; ++j) {
        const double d = d_lo * std::pow(ratio, double(j) / (n - 1));
        const double c = tone_fit_cost(target, m, d);
        if (c < best_cost) {
          best_cost = c;
          best_m = m;
          best_d = d;
        }
      }
    }
  };

  // The cost landscape has basins narrower than a coarse sweep resolves, so
  // level 0 is a full 100x100 sweep (a sparser start loses to that density
  // on ~8% of random feature pairs); 4 levels then shrink a +/-1-cell window
  // around the incumbent.
  scan(0.0, 1.0, kToneDeltaMin, kToneDeltaMax, 100);
  double m_step = 1.0 / 99.0;
  double d_ratio = std::pow(kToneDeltaMax / kToneDeltaMin, 1.0 / 99.0);
  for (int level = 0; level < 4; ++level) {
    const double m_lo = std::max(0.0, best_m - m_step);
    const double m_hi = std::min(1.0, best_m + m_step);
    const double d_lo = std::max(kToneDeltaMin, best_d / d_ratio);
    const double d_hi = std::min(kToneDeltaMax, best_d * d_ratio);
    scan(m_lo, m_hi, d_lo, d_hi, 9);
    m_step = (m_hi - m_lo) / 8.0;
    d_ratio = std::pow(d_hi / d_lo, 1.0 / 8.0);
  }
  return ToneCurveParams{best_m, best_d};
}

LabImage apply_tone(const LabImage& img, const ToneCurveParams& params) {
  constexpr int kLutSize = 4096;
  std::array<float, kLutSize> lut;
  for (int i = 0; i < kLutSize; ++i)
    lut[i] = float(tone_curve_eval(params, double(i) / (kLutSize - 1)));
  // algebraically exact endpoints; don't let libm rounding leak in
  lut[0] = 0.0f;
  lut[kLutSize - 1] = 1.0f;

  LabImage out = img;
  const float scale = float(kLutSize - 1);
  const size_t n = img.pixel_count();
  for (size_t i = 0; i < n; ++i) {
    const float l = std::min(1.0f, std::max(0.0f, img.L[i]));
    const float pos = l * scale;
    const int i0 = std::min(int(pos), kLutSize - 2);
    const float frac = pos - float(i0);
    out.L[i] = lut[i0] + frac * (lut[i0 + 1] - lut[i0]);
  }
  return out;
}

LabImage correct_face_exposure(const LabImage& img,
                               const std::vector<FaceRegion>& faces,
                               const FaceCorrectionConfig& cfg) {
  LabImage out = img;
  const int w = img.width;
  const int h = img.height;
  std::vector<float> scratch;
  for (const FaceRegion& face : faces) {
    if (face.r <= 0) continue;
    const int x0 = std::max(0, face.cx - face.r);
    const int x1 = std::min(w - 1, face.cx + face.r);
    const int y0 = std::max(0, face.cy - face.r);
    const int y1 = std::min(h - 1, face.cy + face.r);
    if (x0 > x1 || y0 > y1) continue;

    const auto box_median = [&](const std::vector<float>& plane) {
      scratch.clear();
      for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x)
          scratch.push_back(plane[out.at(x, y)]);
      return detail::quantile_select(scratch, 0.5);
    };

    const double l_med = box_median(out.L);
    if (l_med >= cfg.l_th) continue;

    // Stays below 1 whenever triggered, so the blend can only brighten.
    const double gamma = std::max(cfg.gamma_th, 0.65 * l_med / cfg.l_th);
    const double a_med = box_median(out.a);
    const double b_med = box_median(out.b);
    const double inv_r = 1.0 / double(face.r);

    for (int y = 0; y < h; ++y) {
      const double dy = (y - face.cy) * inv_r;
      for (int x = 0; x < w; ++x) {
        const double dx = (x - face.cx) * inv_r;
        const size_t idx = out.at(x, y);
        const double da = double(out.a[idx]) - a_med;
        const double db = double(out.b[idx]) - b_med;
        const double weight = std::exp(-cfg.alpha_r * (dx * dx + dy * dy)) *
                              std::exp(-cfg.alpha_c * (da * da + db * db));
        const double l = clamp01(double(out.L[idx]));
        out.L[idx] = float((1.0 - weight) * l + weight * std::pow(l, gamma));
      }
    }
  }
  return out;
}

PreparedInput prepare_input(const RgbImage& input, const TransferConfig& cfg) {
  PreparedInput prep;
  prep.lab = preprocess_image(input, cfg.effective_gamma(), cfg.clip_fraction,
                              &prep.stretch_skipped);
  prep.chroma = chroma_stats(prep.lab);
  prep.luma = luma_feature(prep.lab);
  return prep;
}

RgbImage transfer_prepared(const PreparedInput& prep,
                           const StyleDescriptor& style,
                           const std::vector<FaceRegion>& faces,
                           const TransferConfig& cfg,
                           TransferDetails* details) {
  const ChromaMap map = chroma_transform(prep.chroma, style.chroma, cfg.lambda_r);
  LabImage lab = apply_chroma(prep.lab, map);
  const ToneCurveParams tone =
      fit_tone_curve(prep.luma, style.luma, cfg.tau, cfg.literal_tau_rule);
  lab = apply_tone(lab, tone);
  if (!faces.empty()) lab = correct_face_exposure(lab, faces, cfg.face);
  if (details) {
    details->chroma_map = map;
    details->tone = tone;
    details->stretch_skipped = prep.stretch_skipped;
  }
  return lab_to_srgb(lab, cfg.effective_gamma());
}

RgbImage transfer_style(const RgbImage& input, const StyleDescriptor& style,
                        const std::vector<FaceRegion>& faces,
                        const TransferConfig& cfg, TransferDetails* details) {
  return transfer_prepared(prepare_input(input, cfg), style, faces, cfg,
                           details);
}

}  // namespace autostyle
