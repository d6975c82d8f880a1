#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "stem/evaluation.hpp"
#include "stem/multiple_testing.hpp"
#include "stem/normal.hpp"
#include "stem/palm.hpp"

using namespace stem;

namespace {

DetectionReport report_at(const std::vector<double>& locations) {
  DetectionReport r{Procedure::BH, 0.05, {}, 0.01, 1.0, locations.size(), 0};
  for (std::size_t i = 0; i < locations.size(); ++i)
    r.rejected.push_back({static_cast<Index>(i), locations[i], 2.0, 0.001});
  return r;
}

}  // namespace

TEST_CASE("score_trial") {
  const SignalSpec spec{{{TruncGaussianShape{3, 3}, 15, 0}, {TruncGaussianShape{3, 3}, 15, 100}}, 400};
  const auto regions = compute_regions(spec, gaussian_kernel(3, 3, 1));

  SUBCASE("no rejections") {
    const auto o = score_trial(report_at({}), CandidateSet{}, regions);
    CHECK(o.rejections == 0);
    CHECK(o.false_rejections == 0);
    CHECK(o.false_discovery_proportion() == 0);
  }
  SUBCASE("one in a peak, one in the null") {
    const auto o = score_trial(report_at({1.0, 150.0}), CandidateSet{}, regions);
    CHECK(o.false_rejections == 1);
    CHECK(o.rejections == 2);
    CHECK(o.false_discovery_proportion() == doctest::Approx(0.5));
    CHECK(o.detected == std::vector<bool>{true, false});
    CHECK(o.detected_fraction() == doctest::Approx(0.5));
  }
  SUBCASE("transition hits are false") {
    const auto o = score_trial(report_at({12.0}), CandidateSet{}, regions);
    CHECK(o.false_rejections == 1);
    CHECK(o.transition_rejections == 1);
    CHECK(o.detected == std::vector<bool>{false, false});
  }
  SUBCASE("several hits in one peak count once; accounting adds up") {
    const auto o = score_trial(report_at({-3.0, 2.0, 99.0, 112.0, -150.0}), CandidateSet{}, regions);
    CHECK(o.detected_fraction() == 1.0);
    CHECK(o.signal_rejections == 3);
    CHECK(o.false_rejections == 2);
    CHECK(o.false_rejections + o.signal_rejections == o.rejections);
  }
  SUBCASE("maxima per peak counts every candidate") {
    const CandidateSet c({{0, -4.0, 1.0, 0.5}, {1, 3.0, 1.0, 0.5}, {2, 50.0, 1.0, 0.5}, {3, 101.0, 1.0, 0.5}});
    const auto o = score_trial(report_at({}), c, regions);
    CHECK(o.maxima_per_peak == std::vector<std::size_t>{2, 1});
  }
}

TEST_CASE("snr and optimal bandwidth") {
  CHECK(snr(15, 1, 3, 0, 3) == doctest::Approx(15 / (std::pow(std::numbers::pi, 0.25) * std::sqrt(2.0) * std::sqrt(3.0))));
  CHECK(snr(15, 1, 3, 0, 3) == doctest::Approx(4.600).epsilon(1e-3));
  double best = 0, arg = 0;
  for (double g = 0.5; g <= 10; g += 0.01)
    if (snr(15, 1, 3, 0, g) > best) best = snr(15, 1, 3, 0, g), arg = g;
  CHECK(arg == doctest::Approx(3.0).epsilon(0.01));
  CHECK(optimal_bandwidth(3, 0) == doctest::Approx(3));
  CHECK(optimal_bandwidth(3, 1) == doctest::Approx(std::sqrt(7.0)));
  CHECK(optimal_bandwidth(3, 3) == 0);

  // Quadrature variant agrees with the closed form for white noise (nu = 0) on a fine grid.
  const auto k = gaussian_kernel(3, 5, 0.05);
  const PeakSpec peak{TruncGaussianShape{3, 8}, 15, 0};
  CHECK(snr_general(k, peak, 1.0) == doctest::Approx(snr(15, 1, 3, 0, 3)).epsilon(0.01));
}

TEST_CASE("smoothed peak height") {
  // Gaussian * Gaussian: height 1 / sqrt(2 pi (b^2 + g^2)).
  const auto k = gaussian_kernel(3, 6, 0.05);
  const double h = smoothed_peak_height(TruncGaussianShape{3, 8}, k);
  CHECK(h == doctest::Approx(1 / std::sqrt(2 * std::numbers::pi * 18)).epsilon(1e-4));
  // Quadrature oracle for a quartic kernel and a triangular peak.
  const auto q = quartic_kernel(6, 0.01);
  const double oracle = simpson(
      [](double s) {
        const double w = std::abs(s) < 6 ? 15.0 / 96 * std::pow(1 - s * s / 36, 2) : 0.0;
        const double tri = std::abs(s) < 4 ? (1 - std::abs(s) / 4) / 4 : 0.0;
        return w * tri;
      },
      -6, 6, 24000);
  CHECK(smoothed_peak_height(TriangularShape{4}, q) == doctest::Approx(oracle).epsilon(1e-3));
}

TEST_CASE("theoretical power") {
  const auto k = gaussian_kernel(3, 3, 1);
  const auto m = closed_form_moments({1.0, 0.0}, 3.0);
  const PeakSpec peak{TruncGaussianShape{3, 3}, 15, 0};
  const double top = 15 * smoothed_peak_height(peak.shape, k);
  CHECK(theoretical_power(peak, k, m, top) == doctest::Approx(0.5));
  CHECK(theoretical_power(peak, k, m, -1e6) == doctest::Approx(1.0));

  // Independent chain: SNR-based height, asymptotic BH threshold from the formulas.
  const double sigma = std::sqrt(1 / (2 * std::sqrt(std::numbers::pi) * 3));
  const double lambda2 = 1 / (4 * std::sqrt(std::numbers::pi) * 27);
  const double lambda4 = 3 / (8 * std::sqrt(std::numbers::pi) * 243);
  const double density = std::sqrt(lambda4 / lambda2) / (2 * std::numbers::pi);
  const double a1 = 10.0 / 1000;
  const double v = 0.05 * a1 / (a1 + density * 0.95);
  const double delta = sigma * sigma * lambda4 - lambda2 * lambda2;
  auto F = [&](double u) {
    return normal::sf(u * std::sqrt(lambda4 / delta)) +
           std::sqrt(2 * std::numbers::pi * lambda2 * lambda2 / (lambda4 * sigma * sigma)) * normal::pdf(u / sigma) *
               normal::cdf(u * std::sqrt(lambda2 * lambda2 / (delta * sigma * sigma)));
  };
  double lo = -5, hi = 10;
  for (int i = 0; i < 200; ++i) {
    const double mid = (lo + hi) / 2;
    (F(mid) > v ? lo : hi) = mid;
  }
  const double u_bh = lo;
  const double height = 15 / std::sqrt(2 * std::numbers::pi * 18);  // continuous Gaussian * Gaussian
  const double oracle = normal::cdf((height - u_bh) / sigma);

  const PalmParams palm(m);
  const auto thr = asymptotic_thresholds(0.05, a1, expected_maxima_density(m), palm);
  CHECK(thr.u_bh == doctest::Approx(u_bh).epsilon(1e-9));
  // The library uses the discrete kernel height; the truncation at 3b shifts it slightly.
  CHECK(theoretical_power(peak, k, m, thr.u_bh) == doctest::Approx(oracle).epsilon(0.02));
}
