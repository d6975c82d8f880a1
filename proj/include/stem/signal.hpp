#pragma once

#include <variant>
#include <vector>

#include "stem/kernels.hpp"
#include "stem/sequence.hpp"

namespace stem {

// Peak shapes. Truncated shapes are not renormalised after truncation.

/// (1/b) phi(t/b) on [-cb, cb].
struct TruncGaussianShape { double b; double c; };
/// 3/(4h) (1 - (t/h)^2) on [-h, h].
struct EpanechnikovShape { double halfwidth; };
/// (1/h) (1 - |t|/h) on [-h, h].
struct TriangularShape { double halfwidth; };
/// (1/(2b)) exp(-|t|/b) on [-cb, cb].
struct LaplaceShape { double b; double c; };
/// 1/(pi b (1 + (t/b)^2)) on [-cb, cb].
struct CauchyShape { double b; double c; };
/// Sampled non-negative profile, linearly interpolated, scaled to unit action.
struct CustomShape {
  Eigen::VectorXd profile;
  double dt;
  Index center;
};

using PeakShape = std::variant<TruncGaussianShape, EpanechnikovShape, TriangularShape, LaplaceShape,
                               CauchyShape, CustomShape>;

/// Builds a CustomShape from a non-negative profile, normalising sum * dt to 1.
CustomShape make_custom_shape(Eigen::VectorXd profile, double dt, Index center);

struct Interval {
  double lo;
  double hi;
  double length() const noexcept { return hi - lo; }
  bool contains(double t) const noexcept { return lo <= t && t <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Shape value at offset t from the peak centre.
double evaluate(const PeakShape& shape, double t);
/// Support of the shape relative to its centre.
Interval support(const PeakShape& shape);
std::string_view shape_name(const PeakShape& shape);

struct PeakSpec {
  PeakShape shape;
  double amplitude;
  double center;

  double value(double t) const { return amplitude * evaluate(shape, t - center); }
  Interval support_interval() const {
    const Interval s = support(shape);
    return {center + s.lo, center + s.hi};
  }
};

struct SignalSpec {
  std::vector<PeakSpec> peaks;
  double domain_length;

  Interval domain() const { return {-domain_length / 2, domain_length / 2}; }
  /// Throws ConfigError on a non-positive amplitude, a bad shape parameter or
  /// a support leaving [-L/2, L/2].
  void validate() const;
};

/// mu(t) = sum_j a_j h_j(t - tau_j) on the grid covering [-L/2, L/2].
SampledSequence synthesize_signal(const SignalSpec& spec, double dt);

/// Sorted, merged union of closed intervals.
class IntervalSet {
public:
  IntervalSet() = default;
  explicit IntervalSet(std::vector<Interval> intervals);

  const std::vector<Interval>& intervals() const noexcept { return parts_; }
  bool empty() const noexcept { return parts_.empty(); }
  bool contains(double t) const noexcept;
  double measure() const noexcept;

  /// Closure of domain \ this.
  IntervalSet complement(Interval domain) const;
  /// Closure of this \ other.
  IntervalSet minus(const IntervalSet& other) const;
  IntervalSet intersect(Interval window) const;

private:
  std::vector<Interval> parts_;
};

enum class RegionKind { Signal, Transition, Null };

/// Signal, null and transition regions before and after smoothing. Stored
/// as closed intervals; `classify` resolves shared boundary points with the
/// precedence signal > transition > null so the three form a partition.
struct RegionSet {
  Interval domain;
  std::vector<Interval> peak_supports;      // S_j, in SignalSpec order
  std::vector<Interval> smoothed_supports;  // S_{j,gamma}
  IntervalSet signal;                       // S1
  IntervalSet null;                         // S0
  IntervalSet smoothed_signal;              // S1gamma
  IntervalSet smoothed_null;                // S0gamma
  IntervalSet transition;                   // Tgamma

  RegionKind classify(double t) const noexcept;
};

/// S_{j,gamma} is S_j dilated by the kernel support, clipped to the domain.
RegionSet compute_regions(const SignalSpec& spec, const Kernel& kernel);

} // namespace stem
