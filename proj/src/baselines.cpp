#include "stem/baselines.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "stem/normal.hpp"

namespace stem {

CandidateSet pointwise_pvalues(const SampledSequence& smoothed, const NoiseMoments& moments) {
  if (!(moments.sigma2 > 0)) throw ConfigError("pointwise p-values need sigma2 > 0");
  const double s = moments.sigma();
  std::vector<Candidate> tests;
  tests.reserve(static_cast<std::size_t>(smoothed.interior_end() - smoothed.interior_begin()));
  for (Index i = smoothed.interior_begin(); i < smoothed.interior_end(); ++i) {
    const double p = std::max(normal::sf(smoothed[i] / s), std::numeric_limits<double>::min());
    tests.push_back({i, smoothed.time(i), smoothed[i], p});
  }
  return CandidateSet(std::move(tests));
}

DetectionReport pointwise_correct(const CandidateSet& tests, double alpha, Procedure procedure,
                                  double sigma_gamma) {
  if (procedure == Procedure::Bonferroni) procedure = Procedure::PointwiseBonferroni;
  if (procedure == Procedure::BH) procedure = Procedure::PointwiseBH;
  if (procedure != Procedure::PointwiseBonferroni && procedure != Procedure::PointwiseBH)
    throw ConfigError("pointwise correction supports bonferroni and bh only");
  if (!(sigma_gamma > 0)) throw ConfigError("sigma_gamma must be positive");
  return detail::correct(tests, alpha, procedure,
                         [&](double v) { return sigma_gamma * normal::isf(v); });
}

DetectionReport peak_level(const DetectionReport& pointwise, const CandidateSet& maxima,
                           double sigma_gamma) {
  DetectionReport out = pointwise;
  out.rejected.clear();
  for (const auto& c : maxima) {
    Candidate r = c;
    r.pvalue = normal::sf(c.height / sigma_gamma);
    if (*r.pvalue < pointwise.pvalue_cutoff) out.rejected.push_back(r);
  }
  return out;
}

std::string_view to_string(RiceConvention c) {
  return c == RiceConvention::Unscaled ? "paper" : "classical";
}

RiceConvention parse_rice_convention(std::string_view name) {
  if (name == "paper") return RiceConvention::Unscaled;
  if (name == "classical") return RiceConvention::Classical;
  throw ConfigError("rice convention must be 'paper' or 'classical', got '" + std::string(name) + "'");
}

namespace {

double crossing_weight(const NoiseMoments& m, double length, RiceConvention convention) {
  const double w = length * std::sqrt(m.lambda2) / m.sigma();
  return convention == RiceConvention::Unscaled ? w : w / (2 * std::numbers::pi);
}

} // namespace

double supremum_bound(const NoiseMoments& moments, double length, double u, RiceConvention convention) {
  const double s = moments.sigma();
  return normal::sf(u / s) + crossing_weight(moments, length, convention) * normal::pdf(u / s);
}

double supremum_threshold(const NoiseMoments& moments, double length, double alpha,
                          RiceConvention convention) {
  detail::check_alpha(alpha);
  if (!(length > 0)) throw ConfigError("supremum threshold needs L > 0");
  moments.validate();
  const double s = moments.sigma();
  const double c = crossing_weight(moments, length, convention);

  // The bound peaks at u = -s/c and decreases to 0 beyond it.
  double lo = -s / c;
  if (supremum_bound(moments, length, lo, convention) <= alpha)
    return -std::numeric_limits<double>::infinity();
  double hi = std::max(lo, 0.0) + 10 * s;
  for (int i = 0; supremum_bound(moments, length, hi, convention) > alpha; ++i) {
    if (i > 100) throw NumericError("supremum bound stays above alpha; cannot control at this level");
    hi += 10 * s;
  }
  for (int i = 0; i < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(hi)); ++i) {
    const double mid = 0.5 * (lo + hi);
    if (supremum_bound(moments, length, mid, convention) > alpha) lo = mid;
    else hi = mid;
  }
  return hi;
}

DetectionReport supremum_detect(const CandidateSet& maxima, const NoiseMoments& moments,
                                double length, double alpha, RiceConvention convention) {
  const double u = supremum_threshold(moments, length, alpha, convention);
  const double s = moments.sigma();
  DetectionReport out{Procedure::Supremum, alpha, {}, normal::sf(u / s), u, maxima.size(), 0};
  for (const auto& c : maxima) {
    if (c.height > u) {
      Candidate r = c;
      r.pvalue = normal::sf(c.height / s);
      out.rejected.push_back(r);
    }
  }
  return out;
}

} // namespace stem
