#pragma once

#include "stem/candidates.hpp"
#include "stem/noise.hpp"

namespace stem {

/// Height distribution of a local maximum of smoothed stationary Gaussian
/// noise, parameterised by its spectral moments.
class PalmParams {
public:
  explicit PalmParams(const NoiseMoments& moments);

  const NoiseMoments& moments() const noexcept { return moments_; }
  double delta() const noexcept { return delta_; }
  double sigma() const noexcept { return sigma_; }

  /// F(u) = 1 - Phi(u sqrt(l4/D)) + sqrt(2 pi l2^2 / (l4 s2)) phi(u/s) Phi(u sqrt(l2^2/(D s2))).
  double survival(double u) const;

private:
  NoiseMoments moments_;
  double delta_;
  double sigma_;
  double slope_main_;   // sqrt(lambda4 / delta)
  double weight_;       // sqrt(2 pi lambda2^2 / (lambda4 sigma2))
  double slope_mixed_;  // sqrt(lambda2^2 / (delta sigma2))
};

/// P(height of a local maximum > u) under the complete null. Throws
/// ConfigError for non-finite u.
double palm_survival(const PalmParams& params, double u);

/// Inverse of palm_survival on (0, 1]. v == 1 returns -inf ("no finite
/// threshold"). Bracketed bisection starting from [-10 sigma, 10 sigma].
double palm_quantile(const PalmParams& params, double v);

/// Expected local maxima per unit length, (1/2 pi) sqrt(lambda4 / lambda2).
double expected_maxima_density(const NoiseMoments& moments);

/// Copies `candidates` with p = palm_survival(height) attached.
CandidateSet candidate_pvalues(const CandidateSet& candidates, const PalmParams& params);

} // namespace stem
