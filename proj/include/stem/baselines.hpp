#pragma once

#include <string_view>

#include "stem/multiple_testing.hpp"

namespace stem {

/// Every interior sample as a test with p = 1 - Phi(y / sigma_gamma).
CandidateSet pointwise_pvalues(const SampledSequence& smoothed, const NoiseMoments& moments);

/// Bonferroni or BH over all samples (m = number of samples). Reports carry
/// the PointwiseBonferroni / PointwiseBH tags; the height threshold is
/// sigma_gamma * Phi^{-1}(1 - cutoff).
DetectionReport pointwise_correct(const CandidateSet& tests, double alpha, Procedure procedure,
                                  double sigma_gamma);

/// Restricts a pointwise report to the local maxima it declares significant,
/// so it can be scored in peak units.
DetectionReport peak_level(const DetectionReport& pointwise, const CandidateSet& maxima,
                           double sigma_gamma);

/// Up-crossing rate used by the supremum bound. `Unscaled` (config name
/// "paper", the default) is E[N_u] = L (sqrt(l2)/s) phi(u/s); `Classical` adds
/// the 1/(2 pi) of Rice's rate.
enum class RiceConvention { Unscaled, Classical };

std::string_view to_string(RiceConvention c);
RiceConvention parse_rice_convention(std::string_view name);

/// 1 - Phi(u/s) + E[N_u].
double supremum_bound(const NoiseMoments& moments, double length, double u,
                      RiceConvention convention = RiceConvention::Unscaled);

/// Smallest u where the bound drops to alpha (the bound decreases on the
/// search range). Throws NumericError if the bound stays above alpha.
double supremum_threshold(const NoiseMoments& moments, double length, double alpha,
                          RiceConvention convention = RiceConvention::Unscaled);

/// Local maxima above supremum_threshold. The p-value cutoff reported is the
/// marginal tail 1 - Phi(u/s) of the threshold.
DetectionReport supremum_detect(const CandidateSet& maxima, const NoiseMoments& moments,
                                double length, double alpha,
                                RiceConvention convention = RiceConvention::Unscaled);

} // namespace stem
