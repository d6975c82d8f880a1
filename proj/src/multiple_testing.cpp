#include "stem/multiple_testing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace stem {

std::string_view to_string(Procedure p) {
  switch (p) {
  case Procedure::Bonferroni: return "bonferroni";
  case Procedure::BH: return "bh";
  case Procedure::PointwiseBonferroni: return "pointwise_bonferroni";
  case Procedure::PointwiseBH: return "pointwise_bh";
  case Procedure::Supremum: return "supremum";
  }
  return "unknown";
}

Procedure parse_procedure(std::string_view name) {
  for (Procedure p : {Procedure::Bonferroni, Procedure::BH, Procedure::PointwiseBonferroni,
                      Procedure::PointwiseBH, Procedure::Supremum})
    if (name == to_string(p)) return p;
  throw ConfigError("unknown procedure '" + std::string(name) + "'");
}

std::size_t step_up_index(std::span<const double> pvalues, double alpha) {
  std::vector<double> sorted(pvalues.begin(), pvalues.end());
  std::sort(sorted.begin(), sorted.end());
  const double m = static_cast<double>(sorted.size());
  for (std::size_t i = sorted.size(); i >= 1; --i)
    if (sorted[i - 1] < static_cast<double>(i) * alpha / m) return i;
  return 0;
}

namespace detail {

void check_alpha(double alpha) {
  if (!(alpha > 0 && alpha < 1)) throw ConfigError("alpha must lie in (0, 1)");
}

DetectionReport correct(const CandidateSet& candidates, double alpha, Procedure procedure,
                        const std::function<double(double)>& height_of) {
  check_alpha(alpha);
  if (!candidates.has_pvalues()) throw ConfigError("every candidate needs a p-value before correction");

  DetectionReport report{procedure, alpha, {}, 1.0, 0.0, candidates.size(), 0};
  const double m = static_cast<double>(candidates.size());
  if (candidates.empty()) {
    report.pvalue_cutoff = 1.0;
  } else if (procedure == Procedure::BH || procedure == Procedure::PointwiseBH) {
    std::vector<double> p;
    p.reserve(candidates.size());
    for (const auto& c : candidates) p.push_back(*c.pvalue);
    report.k = step_up_index(p, alpha);
    report.pvalue_cutoff = static_cast<double>(report.k) * alpha / m;
  } else {
    report.pvalue_cutoff = alpha / m;
  }

  for (const auto& c : candidates)
    if (*c.pvalue < report.pvalue_cutoff) report.rejected.push_back(c);

  constexpr double inf = std::numeric_limits<double>::infinity();
  if (report.pvalue_cutoff >= 1) report.height_threshold = -inf;
  else if (report.pvalue_cutoff <= 0) report.height_threshold = inf;
  else report.height_threshold = height_of(report.pvalue_cutoff);
  return report;
}

} // namespace detail

DetectionReport bonferroni(const CandidateSet& candidates, double alpha, const PalmParams& params) {
  return detail::correct(candidates, alpha, Procedure::Bonferroni,
                         [&](double v) { return palm_quantile(params, v); });
}

DetectionReport benjamini_hochberg(const CandidateSet& candidates, double alpha,
                                   const PalmParams& params) {
  return detail::correct(candidates, alpha, Procedure::BH,
                         [&](double v) { return palm_quantile(params, v); });
}

double AsymptoticThresholds::u_bon(double length) const {
  if (!(length > 0)) throw ConfigError("domain length must be positive");
  return palm_quantile(params, std::min(1.0, (alpha / length) / (a1 + density)));
}

AsymptoticThresholds asymptotic_thresholds(double alpha, double a1, double density,
                                           const PalmParams& params) {
  detail::check_alpha(alpha);
  if (!(a1 >= 0 && a1 < 1)) throw ConfigError("A1 must lie in [0, 1)");
  if (!(density > 0)) throw ConfigError("maxima density must be positive");
  const double v = alpha * a1 / (a1 + density * (1 - alpha));
  const double u_bh = v > 0 ? palm_quantile(params, v) : std::numeric_limits<double>::infinity();
  return {alpha, a1, density, u_bh, params};
}

} // namespace stem
