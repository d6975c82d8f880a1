#pragma once

#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "stem/candidates.hpp"
#include "stem/palm.hpp"

namespace stem {

enum class Procedure { Bonferroni, BH, PointwiseBonferroni, PointwiseBH, Supremum };

std::string_view to_string(Procedure p);
Procedure parse_procedure(std::string_view name);

/// Outcome of one correction. `rejected` holds exactly the entries whose
/// p-value is strictly below `pvalue_cutoff`; `height_threshold` is the
/// equivalent height (-inf: everything passes, +inf: nothing can).
struct DetectionReport {
  Procedure procedure;
  double alpha;
  std::vector<Candidate> rejected;
  double pvalue_cutoff;
  double height_threshold;
  std::size_t m;  // number of tests
  std::size_t k;  // step-up index, 0 for non-BH procedures
};

/// Largest i with p_(i) < i alpha / m (0 if none).
std::size_t step_up_index(std::span<const double> pvalues, double alpha);

/// Rejects p < alpha / m (cutoff 1 when m = 0).
DetectionReport bonferroni(const CandidateSet& candidates, double alpha, const PalmParams& params);

/// Step-up: cutoff k alpha / m (1 when m = 0) and rejects p < cutoff.
DetectionReport benjamini_hochberg(const CandidateSet& candidates, double alpha,
                                   const PalmParams& params);

/// Deterministic thresholds the random ones converge to for a long domain
/// with J/L -> a1.
struct AsymptoticThresholds {
  double alpha;
  double a1;
  double density;
  double u_bh;
  PalmParams params;

  /// F^{-1}((alpha / L) / (a1 + density)), increasing without bound in L.
  double u_bon(double length) const;
};

AsymptoticThresholds asymptotic_thresholds(double alpha, double a1, double density,
                                           const PalmParams& params);

namespace detail {

void check_alpha(double alpha);

/// Shared Bonferroni/BH machinery. `height_of` maps a p-value cutoff in
/// (0, 1) to the height threshold; 0 and 1 map to +inf and -inf.
DetectionReport correct(const CandidateSet& candidates, double alpha, Procedure procedure,
                        const std::function<double(double)>& height_of);

} // namespace detail

} // namespace stem
