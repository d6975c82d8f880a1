#pragma once

#include <Eigen/Core>

#include <cmath>
#include <string>

#include "stem/error.hpp"

namespace stem {

using Index = Eigen::Index;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Uniformly sampled real series. Sample i sits at time t0 + i * dt.
///
/// `margin` counts samples at each end that are not trustworthy (zero-padding
/// influence after convolution). Consumers that care about stationarity, such
/// as the maxima finder and the moment estimator, skip them.
template <typename Scalar>
class BasicSampledSequence {
public:
  using VectorType = Vector<Scalar>;

  BasicSampledSequence(VectorType values, Scalar dt, Scalar t0 = Scalar(0), Index margin = 0)
      : values_(std::move(values)), dt_(dt), t0_(t0), margin_(margin) {
    if (values_.size() == 0) throw ConfigError("sampled sequence must not be empty");
    if (!(dt_ > 0) || !std::isfinite(static_cast<double>(dt_)))
      throw ConfigError("sampled sequence needs dt > 0");
    if (!values_.allFinite()) throw ConfigError("sampled sequence contains non-finite values");
    if (margin_ < 0) throw ConfigError("margin must be non-negative");
  }

  /// Grid covering [-length/2, length/2] with spacing dt, all zeros.
  static BasicSampledSequence centered_zeros(Scalar length, Scalar dt) {
    if (!(dt > 0)) throw ConfigError("dt must be positive");
    if (!(length >= 0)) throw ConfigError("domain length must be non-negative");
    const auto n = static_cast<Index>(std::llround(static_cast<double>(length / dt))) + 1;
    return BasicSampledSequence(VectorType::Zero(n), dt, -length / 2);
  }

  const VectorType& values() const noexcept { return values_; }
  Scalar operator[](Index i) const { return values_[i]; }
  Index size() const noexcept { return values_.size(); }
  Scalar dt() const noexcept { return dt_; }
  Scalar t0() const noexcept { return t0_; }
  Index margin() const noexcept { return margin_; }
  Scalar time(Index i) const noexcept { return t0_ + static_cast<Scalar>(i) * dt_; }
  /// (len - 1) * dt.
  Scalar span() const noexcept { return static_cast<Scalar>(size() - 1) * dt_; }

  /// Indices [first, last) outside the margins.
  Index interior_begin() const noexcept { return std::min(margin_, size()); }
  Index interior_end() const noexcept { return std::max(size() - margin_, interior_begin()); }
  auto interior() const { return values_.segment(interior_begin(), interior_end() - interior_begin()); }

  BasicSampledSequence with_values(VectorType values) const {
    return BasicSampledSequence(std::move(values), dt_, t0_, margin_);
  }
  BasicSampledSequence with_margin(Index margin) const {
    return BasicSampledSequence(values_, dt_, t0_, margin);
  }

private:
  VectorType values_;
  Scalar dt_;
  Scalar t0_;
  Index margin_;
};

using SampledSequence = BasicSampledSequence<double>;

/// Relative grid-spacing comparison used wherever two grids must line up.
template <typename Scalar>
bool same_spacing(Scalar a, Scalar b) {
  return std::abs(a - b) <= Scalar(1e-9) * std::max(std::abs(a), std::abs(b));
}

} // namespace stem
