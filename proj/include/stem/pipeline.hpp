#pragma once

#include <span>

#include "stem/kernels.hpp"
#include "stem/multiple_testing.hpp"

namespace stem {

struct StemResult {
  DetectionReport report;
  SampledSequence smoothed;
  CandidateSet candidates;  // every local maximum, with p-values
};

/// Smooth, take interior local maxima, attach Palm p-values, correct.
/// `procedure` must be Bonferroni or BH; `moments` must describe the noise
/// after smoothing with this kernel.
StemResult stem_detect(const SampledSequence& raw, const Kernel& kernel, const NoiseMoments& moments,
                       Procedure procedure, double alpha);

struct AutoBandwidthResult {
  std::size_t chosen;
  StemResult result;
};

/// Runs stem_detect for every kernel and keeps the one with the most
/// rejections; ties go to the smallest bandwidth, then the earliest entry.
AutoBandwidthResult auto_bandwidth(const SampledSequence& raw, std::span<const Kernel> kernels,
                                   std::span<const NoiseMoments> moments, Procedure procedure,
                                   double alpha);

} // namespace stem
