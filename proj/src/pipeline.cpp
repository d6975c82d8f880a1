#include "stem/pipeline.hpp"

#include <optional>

namespace stem {

StemResult stem_detect(const SampledSequence& raw, const Kernel& kernel, const NoiseMoments& moments,
                       Procedure procedure, double alpha) {
  if (procedure != Procedure::Bonferroni && procedure != Procedure::BH)
    throw ConfigError("stem_detect supports the bonferroni and bh procedures only");
  detail::check_alpha(alpha);
  const PalmParams palm(moments);

  SampledSequence smoothed = convolve(raw, kernel);
  CandidateSet candidates = candidate_pvalues(find_local_maxima(smoothed, smoothed.margin()), palm);
  DetectionReport report = procedure == Procedure::Bonferroni ? bonferroni(candidates, alpha, palm)
                                                               : benjamini_hochberg(candidates, alpha, palm);
  return {std::move(report), std::move(smoothed), std::move(candidates)};
}

AutoBandwidthResult auto_bandwidth(const SampledSequence& raw, std::span<const Kernel> kernels,
                                   std::span<const NoiseMoments> moments, Procedure procedure,
                                   double alpha) {
  if (kernels.empty()) throw ConfigError("auto_bandwidth needs at least one kernel");
  if (kernels.size() != moments.size())
    throw ConfigError("auto_bandwidth needs one moment set per kernel");

  std::optional<AutoBandwidthResult> best;
  for (std::size_t i = 0; i < kernels.size(); ++i) {
    StemResult r = stem_detect(raw, kernels[i], moments[i], procedure, alpha);
    if (!best) {
      best = AutoBandwidthResult{i, std::move(r)};
      continue;
    }
    const auto count = r.report.rejected.size();
    const auto best_count = best->result.report.rejected.size();
    const bool better = count > best_count ||
                        (count == best_count && kernels[i].bandwidth() < kernels[best->chosen].bandwidth());
    if (better) best = AutoBandwidthResult{i, std::move(r)};
  }
  return std::move(*best);
}

} // namespace stem
