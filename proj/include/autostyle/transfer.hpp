#pragma once

#include <vector>

#include "autostyle/image.hpp"
#include "autostyle/mat2.hpp"
#include "autostyle/stylestats.hpp"

namespace autostyle {

/// Affine chrominance map c -> T (c - mu_in) + mu_style. T produced by
/// chroma_transform is symmetric PSD.
struct ChromaMap {
  Mat2 T = Mat2::identity();
  Vec2 mu_in;
  Vec2 mu_style;
};

/// Parameters of the arctan tone curve: m is the inflection point, delta the
/// stretch scale around it.
struct ToneCurveParams {
  double m = 0.5;
  double delta = 4.0;
};

inline constexpr double kToneDeltaMin = 0.01;
inline constexpr double kToneDeltaMax = 4.0;

/// Circular face region in input pixel coordinates.
struct FaceRegion {
  int cx = 0;
  int cy = 0;
  int r = 0;
};

struct FaceCorrectionConfig {
  double l_th = 0.3;       // median-luminance trigger threshold
  double gamma_th = 0.5;   // strongest allowed correction
  double alpha_r = 0.45;   // spatial kernel falloff
  double alpha_c = 0.001;  // chrominance kernel falloff
};

struct TransferConfig {
  double gamma = 2.2;
  bool gamma_compress = true;  // false applies the exponent the other way
  double clip_fraction = 0.005;
  double lambda_r = 7.5;
  double tau = 0.4;
  // The printed interpolation rule divides by min(tau, |L_S - L_I|_inf),
  // which amplifies small displacements; the default caps them instead.
  bool literal_tau_rule = false;
  FaceCorrectionConfig face;

  double effective_gamma() const { return gamma_compress ? gamma : 1.0 / gamma; }
};

/// Solves T Sigma' T = Sigma_style for symmetric T, where Sigma' is the input
/// covariance with diagonal entries floored at lambda_r (correlation
/// coefficients preserved and clamped to |rho| <= 0.999).
ChromaMap chroma_transform(const ChromaStats& input, const ChromaStats& style,
                           double lambda_r = 7.5);

LabImage apply_chroma(const LabImage& img, const ChromaMap& map);

/// g(l) = [atan(m/d) + atan((l-m)/d)] / [atan(m/d) + atan((1-m)/d)];
/// fixes 0 and 1 and is strictly increasing for any valid parameters.
double tone_curve_eval(const ToneCurveParams& params, double l);

/// Fits (m, delta) so the curve carries the input percentiles onto the
/// tau-limited target, via deterministic hierarchical grid refinement over
/// m in [0,1] x delta in [0.01,4] (delta log-spaced).
ToneCurveParams fit_tone_curve(const LumaFeature& l_in,
                               const LumaFeature& l_style, double tau = 0.4,
                               bool literal_tau_rule = false);

/// Applies the tone curve through a 4096-entry interpolated lookup table.
LabImage apply_tone(const LabImage& img, const ToneCurveParams& params);

/// Gamma-brightens under-exposed faces, blended by spatial and skin-chroma
/// proximity. Faces whose box-median luminance is at or above l_th are left
/// untouched. Never darkens a pixel.
LabImage correct_face_exposure(const LabImage& img,
                               const std::vector<FaceRegion>& faces,
                               const FaceCorrectionConfig& cfg);

/// Input side of the pipeline, computed once and reusable across styles.
struct PreparedInput {
  LabImage lab;
  ChromaStats chroma;
  LumaFeature luma;
  bool stretch_skipped = false;
};

struct TransferDetails {
  ChromaMap chroma_map;
  ToneCurveParams tone;
  bool stretch_skipped = false;
};

PreparedInput prepare_input(const RgbImage& input, const TransferConfig& cfg);

RgbImage transfer_prepared(const PreparedInput& prep,
                           const StyleDescriptor& style,
                           const std::vector<FaceRegion>& faces,
                           const TransferConfig& cfg,
                           TransferDetails* details = nullptr);

/// Full robust style transfer: preprocess, chroma mapping, tone mapping,
/// face exposure correction, back to sRGB. Deterministic.
RgbImage transfer_style(const RgbImage& input, const StyleDescriptor& style,
                        const std::vector<FaceRegion>& faces,
                        const TransferConfig& cfg,
                        TransferDetails* details = nullptr);

}  // namespace autostyle
