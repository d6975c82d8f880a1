#include "stem/evaluation.hpp"

#include <cmath>
#include <numbers>

#include "stem/normal.hpp"

namespace stem {

double TrialOutcome::false_discovery_proportion() const noexcept {
  return rejections == 0 ? 0.0
                         : static_cast<double>(false_rejections) / static_cast<double>(rejections);
}

double TrialOutcome::detected_fraction() const noexcept {
  if (detected.empty()) return 0.0;
  std::size_t hits = 0;
  for (bool d : detected) hits += d;
  return static_cast<double>(hits) / static_cast<double>(detected.size());
}

TrialOutcome score_trial(const DetectionReport& report, const CandidateSet& candidates,
                         const RegionSet& regions) {
  const std::size_t peaks = regions.peak_supports.size();
  TrialOutcome out;
  out.detected.assign(peaks, false);
  out.maxima_per_peak.assign(peaks, 0);
  out.rejections = report.rejected.size();

  for (const auto& c : report.rejected) {
    switch (regions.classify(c.location)) {
    case RegionKind::Signal: ++out.signal_rejections; break;
    case RegionKind::Transition: ++out.transition_rejections; ++out.false_rejections; break;
    case RegionKind::Null: ++out.false_rejections; break;
    }
    for (std::size_t j = 0; j < peaks; ++j)
      if (regions.peak_supports[j].contains(c.location)) out.detected[j] = true;
  }
  for (const auto& c : candidates)
    for (std::size_t j = 0; j < peaks; ++j)
      if (regions.peak_supports[j].contains(c.location)) ++out.maxima_per_peak[j];
  return out;
}

double smoothed_peak_height(const PeakShape& shape, const Kernel& kernel) {
  // (w * h)(t) = sum_k w_k h(t - s_k) dt, evaluated on a grid over the
  // smoothed support; the mode of a symmetric shape sits at t = 0.
  const Interval s = support(shape);
  const double dt = kernel.dt();
  const Index lo = static_cast<Index>(std::floor((s.lo + kernel.left_extent()) / dt));
  const Index hi = static_cast<Index>(std::ceil((s.hi + kernel.right_extent()) / dt));
  double best = 0;
  for (Index m = lo; m <= hi; ++m) {
    double acc = 0;
    for (Index k = 0; k < kernel.size(); ++k)
      acc += kernel.weights()[k] * evaluate(shape, static_cast<double>(m) * dt - kernel.offset(k));
    best = std::max(best, acc * dt);
  }
  return best;
}

double theoretical_power(const PeakSpec& peak, const Kernel& kernel, const NoiseMoments& moments,
                         double u) {
  const double mean = peak.amplitude * smoothed_peak_height(peak.shape, kernel);
  if (std::isinf(u)) return u < 0 ? 1.0 : 0.0;
  return normal::cdf((mean - u) / moments.sigma());
}

double snr(double amplitude, double sigma, double b, double nu, double gamma) {
  const double xi2 = gamma * gamma + nu * nu;
  if (!(xi2 > 0)) throw ConfigError("snr needs gamma^2 + nu^2 > 0");
  const double s2 = gamma * gamma + b * b;
  return amplitude / (sigma * std::pow(std::numbers::pi, 0.25)) * std::pow(xi2 / (s2 * s2), 0.25);
}

double snr_general(const Kernel& kernel, const PeakSpec& peak, double sigma) {
  const double energy = kernel.weights().squaredNorm() * kernel.dt();
  return peak.amplitude * smoothed_peak_height(peak.shape, kernel) / (sigma * std::sqrt(energy));
}

double optimal_bandwidth(double b, double nu) {
  if (!(b > 0) || !(nu >= 0)) throw ConfigError("optimal_bandwidth needs b > 0, nu >= 0");
  const double r = b * b - 2 * nu * nu;
  return r > 0 ? std::sqrt(r) : 0.0;
}

} // namespace stem
