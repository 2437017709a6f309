#pragma once

#include "autostyle/stylestats.hpp"

namespace autostyle {

struct SimilarityParams {
  double lambda_l = 0.005;  // luma kernel bandwidth
  double lambda_c = 0.05;   // chroma kernel bandwidth
  double epsilon = 1.0;     // mean-difference floor inside hellinger
  // divide the squared luma distance by its dimension (off by default;
  // lambda_l is calibrated for the raw norm)
  bool normalize_luma_distance = false;
};

/// Hellinger-style distance between chroma Gaussians, in [0,1]:
/// 1 - (|Sp Ss|^(1/4) / |S̄|^(1/2)) exp(-mᵀ S̄⁻¹ m / 8) with
/// m = |mu_p - mu_s| + epsilon elementwise and S̄ the covariance average.
/// Singular inputs are regularized with +1e-9 I.
double hellinger(const ChromaStats& p, const ChromaStats& s, double epsilon);

/// Product of Gaussian kernels over luma-feature distance and hellinger:
/// exp(-De²/lambda_l) · exp(-Dh²/lambda_c), in (0,1].
double style_similarity(const StyleDescriptor& p, const StyleDescriptor& s,
                        const SimilarityParams& params = {});

/// Fréchet (Wasserstein-2) distance between chroma Gaussians; the trace term
/// is floored at zero against rounding.
double frechet(const ChromaStats& p, const ChromaStats& q);

}  // namespace autostyle
