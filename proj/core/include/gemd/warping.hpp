#pragma once

#include <cstdint>
#include <span>

#include "gemd/matrix.hpp"

namespace gemd {

enum class WarpFamily { ibc, sigmoid };

// Element-wise monotone map between embedding inner products and proximity
// values. The inverse Box-Cox family: (1 + gamma x)^(1/gamma) for gamma != 0,
// exp(x) at gamma = 0; gamma = 1 is the linear map 1 + x. clip_c bounds the
// log-of-zero replacement used when matrices are unwarped.
struct WarpSpec {
  WarpFamily family = WarpFamily::ibc;
  double gamma = 0.0;
  double clip_c = 100.0;

  static WarpSpec exponential(double clip_c = 100.0) { return {WarpFamily::ibc, 0.0, clip_c}; }
  static WarpSpec ibc(double gamma, double clip_c = 100.0) {
    return {WarpFamily::ibc, gamma, clip_c};
  }
  static WarpSpec sigmoid() { return {WarpFamily::sigmoid, 0.0, 100.0}; }
};

// Throws std::domain_error when 1 + gamma x <= 0 for the ibc family.
double warp(const WarpSpec& spec, double x);

// Inverse of warp: (y^gamma - 1)/gamma, ln y at gamma = 0, logit for the
// sigmoid family. Domain: y > 0 (ibc), 0 < y < 1 (sigmoid).
double unwarp(const WarpSpec& spec, double y);

// Replacement value for entries outside the unwarp domain (zeros of a
// proximity matrix): unwarp of the smallest positive double, clipped at
// -clip_c. For gamma = 0 this is exactly -clip_c.
double unwarp_floor(const WarpSpec& spec);

// Population skewness E(x - mu)^3 / sigma^3 (moments divide by n).
// Requires >= 3 samples and non-zero variance.
double skewness(std::span<const double> samples);

struct AutoGammaResult {
  double gamma = 0.0;
  double skew = 0.0;       // skewness of the unwarped sample at the returned gamma
  bool bracketed = true;   // false: no sign change on [-1, 1], endpoint returned
};

// Samples non-zero entries of pi uniformly (seeded) and bisects gamma in
// [-1, 1] toward zero skewness of the unwarped sample. Stops at |skew| < 0.05
// or 40 iterations. Without a sign change, returns the endpoint with the
// smaller |skewness| and clears `bracketed`.
AutoGammaResult auto_gamma(const ProximityMatrix& pi, std::size_t sample_size,
                           std::uint64_t seed);

}  // namespace gemd
