#pragma once

#include <cmath>
#include <iosfwd>
#include <string>
#include <string_view>

#include "stem/sequence.hpp"

namespace stem {

enum class KernelFamily { Gaussian, Quartic, Template };

std::string_view to_string(KernelFamily family);

/// Smoothing weights sampled on the signal grid. `center` is the index of
/// t = 0. `bandwidth` is metadata (0 for templates).
template <typename Scalar>
class BasicKernel {
public:
  using VectorType = Vector<Scalar>;

  BasicKernel(VectorType weights, Scalar dt, Index center, Scalar bandwidth, KernelFamily family)
      : weights_(std::move(weights)), dt_(dt), center_(center), bandwidth_(bandwidth),
        family_(family) {
    if (weights_.size() == 0) throw ConfigError("kernel must have at least one weight");
    if (!(dt_ > 0)) throw ConfigError("kernel dt must be positive");
    if (center_ < 0 || center_ >= weights_.size())
      throw ConfigError("kernel center index out of range");
    if (!weights_.allFinite()) throw ConfigError("kernel weights must be finite");
  }

  const VectorType& weights() const noexcept { return weights_; }
  Index size() const noexcept { return weights_.size(); }
  Scalar dt() const noexcept { return dt_; }
  Index center() const noexcept { return center_; }
  Scalar bandwidth() const noexcept { return bandwidth_; }
  KernelFamily family() const noexcept { return family_; }

  /// Offset of weight k from t = 0, in time units.
  Scalar offset(Index k) const noexcept { return static_cast<Scalar>(k - center_) * dt_; }
  /// Support [left_extent, right_extent] relative to t = 0.
  Scalar left_extent() const noexcept { return -static_cast<Scalar>(center_) * dt_; }
  Scalar right_extent() const noexcept { return static_cast<Scalar>(size() - 1 - center_) * dt_; }
  /// Samples affected by zero padding at either end after convolution.
  Index margin() const noexcept { return std::max(center_, size() - 1 - center_); }
  /// Discrete action sum(w) * dt.
  Scalar action() const { return weights_.sum() * dt_; }

private:
  VectorType weights_;
  Scalar dt_;
  Index center_;
  Scalar bandwidth_;
  KernelFamily family_;
};

using Kernel = BasicKernel<double>;

/// (1/gamma) phi(t/gamma) sampled on [-gamma d, gamma d], renormalised to unit
/// discrete action. Throws BandwidthTooSmall when gamma < dt.
Kernel gaussian_kernel(double gamma, double d, double dt);

/// 15/(16 gamma) (1 - (t/gamma)^2)^2 on [-gamma, gamma], unit discrete action.
Kernel quartic_kernel(double gamma, double dt);

/// Single weight 1/dt: convolution with it is the identity.
Kernel delta_kernel(double dt);

/// Average of aligned windows around the local maxima of `training` that
/// exceed `height_threshold`, scaled so its maximum is 1. The window is
/// centred on the aligned maximum (center index = window / 2).
Kernel estimate_template(const SampledSequence& training, double height_threshold, Index window);

/// Template CSV: a `# dt=<value> center=<index>` line, then one weight per line.
void write_kernel_csv(std::ostream& out, const Kernel& kernel);
Kernel read_kernel_csv(std::istream& in);

/// y[i] = sum_k w[k] x[i - (k - center)] dt with zero padding outside the
/// input. The result carries the kernel margin (plus any margin the input had).
template <typename Scalar>
BasicSampledSequence<Scalar> convolve(const BasicSampledSequence<Scalar>& seq,
                                      const BasicKernel<Scalar>& kernel) {
  if (!same_spacing(seq.dt(), kernel.dt()))
    throw ConfigError("kernel dt " + std::to_string(kernel.dt()) + " does not match series dt " +
                      std::to_string(seq.dt()));
  const Index n = seq.size();
  const auto& x = seq.values();
  const auto& w = kernel.weights();
  Vector<Scalar> y = Vector<Scalar>::Zero(n);
  for (Index k = 0; k < kernel.size(); ++k) {
    const Index shift = k - kernel.center();
    const Index lo = std::max<Index>(0, shift);
    const Index hi = std::min<Index>(n, n + shift);
    if (hi <= lo) continue;
    y.segment(lo, hi - lo) += (w[k] * seq.dt()) * x.segment(lo - shift, hi - lo);
  }
  return BasicSampledSequence<Scalar>(std::move(y), seq.dt(), seq.t0(),
                                      seq.margin() + kernel.margin());
}

} // namespace stem
