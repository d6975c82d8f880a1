#pragma once

#include <cstdint>

#include "stem/kernels.hpp"
#include "stem/sequence.hpp"

namespace stem {

/// Spectral moments of smoothed noise: Var z, Var z', Var z''.
struct NoiseMoments {
  double sigma2;
  double lambda2;
  double lambda4;

  /// sigma2 * lambda4 - lambda2^2, strictly positive for a valid set.
  double delta() const noexcept { return sigma2 * lambda4 - lambda2 * lambda2; }
  double sigma() const noexcept;
  /// Throws NumericError unless all three are positive and finite and delta > 0.
  void validate() const;
};

/// Noise sigma * int (1/nu) phi((t - s)/nu) dB(s); nu = 0 is white noise.
struct GaussianAcvfParams {
  double sigma;
  double nu;
  void validate() const;
};

/// Moments of the Gaussian-ACVF noise after smoothing with a Gaussian kernel
/// of bandwidth gamma, xi = sqrt(gamma^2 + nu^2):
///   sigma2 = s^2/(2 sqrt(pi) xi), lambda2 = s^2/(4 sqrt(pi) xi^3),
///   lambda4 = 3 s^2/(8 sqrt(pi) xi^5).
NoiseMoments closed_form_moments(const GaussianAcvfParams& params, double gamma);

/// Sample of z_gamma on `length` grid points. With xi = 0 the samples are
/// i.i.d. N(0, sigma^2 / dt), white noise of intensity sigma^2 seen through
/// cells of width dt, so smoothing reproduces the closed-form moments at any
/// spacing; otherwise white innovations are filtered by
/// sigma (1/xi) phi(t/xi) sqrt(dt), truncated at +-6 xi. Innovations are
/// padded so every output sample is stationary.
SampledSequence generate_noise(const GaussianAcvfParams& params, double gamma, Index length,
                               double dt, std::uint64_t seed);

/// Empirical variances of the interior samples and of their first and second
/// forward differences, divided by dt^2 and dt^4.
NoiseMoments estimate_moments(const SampledSequence& smoothed_noise);

/// Exact moments (with the same finite-difference convention as
/// estimate_moments) of x[i] = sum_k taps[k] eps[i - k], eps i.i.d. N(0, 1).
NoiseMoments filter_moments(const Eigen::VectorXd& taps, double dt);

/// Exact finite-difference moments of generate_noise(params, 0, ...) after
/// convolution with `kernel`. What estimate_moments converges to.
NoiseMoments smoothed_noise_moments(const GaussianAcvfParams& params, const Kernel& kernel);

} // namespace stem
