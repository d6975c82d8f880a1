#include "stem/palm.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "stem/maxima.hpp"
#include "stem/normal.hpp"

namespace stem {

CandidateSet::CandidateSet(std::vector<Candidate> entries) : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& c = entries_[i];
    if (!std::isfinite(c.height)) throw ConfigError("candidate height must be finite");
    if (i > 0 && !(c.location > entries_[i - 1].location))
      throw ConfigError("candidate locations must be strictly increasing");
    if (c.pvalue && !(*c.pvalue > 0 && *c.pvalue <= 1))
      throw ConfigError("candidate p-value outside (0, 1]");
  }
}

bool CandidateSet::has_pvalues() const noexcept {
  for (const auto& c : entries_)
    if (!c.pvalue) return false;
  return true;
}

CandidateSet find_local_maxima(const SampledSequence& seq, Index margin) {
  if (margin < 0) throw ConfigError("margin must be non-negative");
  std::vector<Candidate> out;
  for (Index i : local_maximum_indices(seq.values(), margin, seq.size() - margin))
    out.push_back({i, seq.time(i), seq[i], std::nullopt});
  return CandidateSet(std::move(out));
}

PalmParams::PalmParams(const NoiseMoments& moments) : moments_(moments) {
  moments_.validate();
  const double s2 = moments_.sigma2;
  const double l2 = moments_.lambda2;
  const double l4 = moments_.lambda4;
  delta_ = moments_.delta();
  sigma_ = std::sqrt(s2);
  slope_main_ = std::sqrt(l4 / delta_);
  weight_ = std::sqrt(2 * std::numbers::pi * l2 * l2 / (l4 * s2));
  slope_mixed_ = std::sqrt(l2 * l2 / (delta_ * s2));
}

double PalmParams::survival(double u) const {
  // Both terms are non-negative, so the upper tail has no cancellation as
  // long as 1 - Phi is taken from erfc.
  const double f = normal::sf(u * slope_main_) +
                   weight_ * normal::pdf(u / sigma_) * normal::cdf(u * slope_mixed_);
  return std::clamp(f, std::numeric_limits<double>::min(), 1.0);
}

double palm_survival(const PalmParams& params, double u) {
  if (!std::isfinite(u)) throw ConfigError("palm_survival needs a finite height");
  return params.survival(u);
}

double palm_quantile(const PalmParams& params, double v) {
  if (!(v > 0 && v <= 1)) throw ConfigError("palm_quantile needs v in (0, 1]");
  if (v == 1) return -std::numeric_limits<double>::infinity();

  const double s = params.sigma();
  double lo = -10 * s;
  double hi = 10 * s;
  for (int i = 0; params.survival(hi) > v; ++i) {
    if (i > 60) throw NumericError("palm_quantile: could not bracket v from above");
    hi += 10 * s;
  }
  for (int i = 0; params.survival(lo) < v; ++i) {
    if (i > 60) throw NumericError("palm_quantile: could not bracket v from below");
    lo -= 10 * s;
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (params.survival(mid) > v) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

double expected_maxima_density(const NoiseMoments& moments) {
  moments.validate();
  return std::sqrt(moments.lambda4 / moments.lambda2) / (2 * std::numbers::pi);
}

CandidateSet candidate_pvalues(const CandidateSet& candidates, const PalmParams& params) {
  std::vector<Candidate> out(candidates.begin(), candidates.end());
  for (auto& c : out) c.pvalue = palm_survival(params, c.height);
  return CandidateSet(std::move(out));
}

} // namespace stem
