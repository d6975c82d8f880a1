#pragma once

#include <vector>

#include "stem/multiple_testing.hpp"
#include "stem/signal.hpp"

namespace stem {

/// Peak-level accounting of one detection run.
struct TrialOutcome {
  std::size_t false_rejections = 0;       // V: rejections in S0 (null or transition)
  std::size_t signal_rejections = 0;      // W: rejections in S1
  std::size_t transition_rejections = 0;  // subset of V falling in T_gamma
  std::size_t rejections = 0;             // R
  std::vector<bool> detected;             // per true peak: some rejection inside S_j
  std::vector<std::size_t> maxima_per_peak;  // per true peak: all candidates inside S_j

  /// V / (R v 1).
  double false_discovery_proportion() const noexcept;
  /// Fraction of true peaks detected (0 when there are none).
  double detected_fraction() const noexcept;
};

/// Classifies every rejection by the region its location falls in. Several
/// rejections inside one S_j detect that peak once.
TrialOutcome score_trial(const DetectionReport& report, const CandidateSet& candidates,
                         const RegionSet& regions);

/// Unit-amplitude smoothed peak at its mode, max_t (w * h)(t), by quadrature
/// over the kernel samples.
double smoothed_peak_height(const PeakShape& shape, const Kernel& kernel);

/// Phi((a h_gamma(tau) - u) / sigma_gamma).
double theoretical_power(const PeakSpec& peak, const Kernel& kernel, const NoiseMoments& moments,
                         double u);

/// Gaussian peak, Gaussian kernel and Gaussian-ACVF noise:
/// a / (sigma pi^{1/4}) [(gamma^2 + nu^2) / (gamma^2 + b^2)^2]^{1/4}.
double snr(double amplitude, double sigma, double b, double nu, double gamma);

/// a max_t (w * h)(t) / (sigma sqrt(int w^2)) for a white noise of intensity
/// sigma, by quadrature over the kernel samples.
double snr_general(const Kernel& kernel, const PeakSpec& peak, double sigma);

/// Bandwidth maximising snr(): sqrt(b^2 - 2 nu^2) when nu < b / sqrt(2), else 0.
double optimal_bandwidth(double b, double nu);

} // namespace stem
