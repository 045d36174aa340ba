#include "gemd/warping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "gemd/rng.hpp"

namespace gemd {

double warp(const WarpSpec& spec, double x) {
  if (spec.family == WarpFamily::sigmoid) return 1.0 / (1.0 + std::exp(-x));
  if (spec.gamma == 0.0) return std::exp(x);
  const double base = 1.0 + spec.gamma * x;
  if (!(base > 0.0))
    throw std::domain_error("warp: 1 + gamma*x must be positive (gamma = " +
                            std::to_string(spec.gamma) + ", x = " + std::to_string(x) + ")");
  return std::pow(base, 1.0 / spec.gamma);
}

double unwarp(const WarpSpec& spec, double y) {
  if (spec.family == WarpFamily::sigmoid) {
    if (!(y > 0.0 && y < 1.0))
      throw std::domain_error("unwarp: sigmoid inverse needs 0 < y < 1, got " +
                              std::to_string(y));
    return std::log(y / (1.0 - y));
  }
  if (!(y > 0.0))
    throw std::domain_error("unwarp: ibc inverse needs y > 0, got " + std::to_string(y));
  if (spec.gamma == 0.0) return std::log(y);
  return (std::pow(y, spec.gamma) - 1.0) / spec.gamma;
}

double unwarp_floor(const WarpSpec& spec) {
  if (spec.gamma == 0.0) return -spec.clip_c;
  const double at_min = (std::pow(std::numeric_limits<double>::min(), spec.gamma) - 1.0) /
                        spec.gamma;
  return std::max(-spec.clip_c, at_min);
}

double skewness(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n < 3) throw std::invalid_argument("skewness: need at least 3 samples");
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= static_cast<double>(n);
  double m2 = 0.0, m3 = 0.0;
  for (double x : samples) {
    const double d = x - mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= static_cast<double>(n);
  m3 /= static_cast<double>(n);
  if (!(m2 > 0.0)) throw std::domain_error("skewness: undefined for constant samples");
  return m3 / std::pow(m2, 1.5);
}

namespace {

double unwarped_skewness(double gamma, std::span<const double> samples,
                         std::vector<double>& scratch) {
  const WarpSpec spec = WarpSpec::ibc(gamma);
  scratch.clear();
  scratch.reserve(samples.size());
  for (double y : samples) scratch.push_back(unwarp(spec, y));
  return skewness(scratch);
}

}  // namespace

AutoGammaResult auto_gamma(const ProximityMatrix& pi, std::size_t sample_size,
                           std::uint64_t seed) {
  std::vector<double> values;
  values.reserve(pi.nonzero_count());
  pi.for_each_nonzero([&values](Eigen::Index, Eigen::Index, double v) { values.push_back(v); });
  if (values.size() < sample_size)
    sample_size = values.size();
  if (sample_size < 3)
    throw std::invalid_argument("auto_gamma: need at least 3 non-zero entries");

  // Partial Fisher-Yates: the first sample_size slots become a uniform
  // sample without replacement.
  CounterRng rng(seed, 0xa6ce);
  for (std::size_t i = 0; i < sample_size; ++i) {
    const std::size_t j = i + rng.next_below(values.size() - i);
    std::swap(values[i], values[j]);
  }
  values.resize(sample_size);

  constexpr double kSkewTol = 0.05;
  constexpr int kMaxIters = 40;
  std::vector<double> scratch;
  double lo = -1.0, hi = 1.0;
  double skew_lo = unwarped_skewness(lo, values, scratch);
  double skew_hi = unwarped_skewness(hi, values, scratch);
  if (std::abs(skew_lo) < kSkewTol) return {lo, skew_lo, true};
  if (std::abs(skew_hi) < kSkewTol) return {hi, skew_hi, true};
  if (skew_lo * skew_hi > 0.0) {
    // No root in range: hand back the better endpoint, flagged.
    return std::abs(skew_lo) <= std::abs(skew_hi) ? AutoGammaResult{lo, skew_lo, false}
                                                  : AutoGammaResult{hi, skew_hi, false};
  }
  double mid = 0.0, skew_mid = 0.0;
  for (int it = 0; it < kMaxIters; ++it) {
    mid = 0.5 * (lo + hi);
    skew_mid = unwarped_skewness(mid, values, scratch);
    if (std::abs(skew_mid) < kSkewTol) break;
    if (skew_mid * skew_lo > 0.0) {
      lo = mid;
      skew_lo = skew_mid;
    } else {
      hi = mid;
    }
  }
  return {std::clamp(mid, -1.0, 1.0), skew_mid, true};
}

}  // namespace gemd
