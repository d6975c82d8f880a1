#include "stem/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "stem/normal.hpp"

namespace stem {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_positive(double v, const char* what) {
  if (!(v > 0) || !std::isfinite(v)) throw ConfigError(std::string(what) + " must be positive");
}

} // namespace

CustomShape make_custom_shape(Eigen::VectorXd profile, double dt, Index center) {
  require_positive(dt, "custom profile dt");
  if (profile.size() == 0) throw ConfigError("custom profile is empty");
  if (center < 0 || center >= profile.size()) throw ConfigError("custom profile center out of range");
  if ((profile.array() < 0).any() || !profile.allFinite())
    throw ConfigError("custom profile must be finite and non-negative");
  const double action = profile.sum() * dt;
  if (!(action > 0)) throw ConfigError("custom profile has zero action");
  profile /= action;
  return {std::move(profile), dt, center};
}

double evaluate(const PeakShape& shape, double t) {
  return std::visit(
      overloaded{
          [t](const TruncGaussianShape& s) {
            return std::abs(t) <= s.c * s.b ? normal::pdf(t / s.b) / s.b : 0.0;
          },
          [t](const EpanechnikovShape& s) {
            const double r = t / s.halfwidth;
            return std::abs(r) <= 1 ? 0.75 / s.halfwidth * (1 - r * r) : 0.0;
          },
          [t](const TriangularShape& s) {
            const double r = std::abs(t) / s.halfwidth;
            return r <= 1 ? (1 - r) / s.halfwidth : 0.0;
          },
          [t](const LaplaceShape& s) {
            return std::abs(t) <= s.c * s.b ? std::exp(-std::abs(t) / s.b) / (2 * s.b) : 0.0;
          },
          [t](const CauchyShape& s) {
            const double r = t / s.b;
            return std::abs(t) <= s.c * s.b ? 1.0 / (std::numbers::pi * s.b * (1 + r * r)) : 0.0;
          },
          [t](const CustomShape& s) {
            const double pos = t / s.dt + static_cast<double>(s.center);
            const Index n = s.profile.size();
            if (pos < 0 || pos > static_cast<double>(n - 1)) return 0.0;
            const Index i = std::min<Index>(static_cast<Index>(pos), n - 1);
            if (i == n - 1) return s.profile[i];
            const double f = pos - static_cast<double>(i);
            return (1 - f) * s.profile[i] + f * s.profile[i + 1];
          },
      },
      shape);
}

Interval support(const PeakShape& shape) {
  return std::visit(
      overloaded{
          [](const TruncGaussianShape& s) { return Interval{-s.c * s.b, s.c * s.b}; },
          [](const EpanechnikovShape& s) { return Interval{-s.halfwidth, s.halfwidth}; },
          [](const TriangularShape& s) { return Interval{-s.halfwidth, s.halfwidth}; },
          [](const LaplaceShape& s) { return Interval{-s.c * s.b, s.c * s.b}; },
          [](const CauchyShape& s) { return Interval{-s.c * s.b, s.c * s.b}; },
          [](const CustomShape& s) {
            Index first = 0;
            Index last = s.profile.size() - 1;
            while (first < last && s.profile[first] == 0) ++first;
            while (last > first && s.profile[last] == 0) --last;
            // Linear interpolation reaches zero one sample outside the nonzero run.
            const double lo = static_cast<double>(std::max<Index>(first - 1, 0) - s.center) * s.dt;
            const double hi =
                static_cast<double>(std::min<Index>(last + 1, s.profile.size() - 1) - s.center) * s.dt;
            return Interval{lo, hi};
          },
      },
      shape);
}

std::string_view shape_name(const PeakShape& shape) {
  static constexpr std::string_view names[] = {"trunc_gaussian", "epanechnikov", "triangular",
                                               "laplace",        "cauchy",       "custom"};
  return names[shape.index()];
}

void SignalSpec::validate() const {
  require_positive(domain_length, "domain length");
  const Interval dom = domain();
  for (const auto& p : peaks) {
    require_positive(p.amplitude, "peak amplitude");
    if (!std::isfinite(p.center)) throw ConfigError("peak center must be finite");
    std::visit(overloaded{
                   [](const TruncGaussianShape& s) { require_positive(s.b, "b"); require_positive(s.c, "c"); },
                   [](const EpanechnikovShape& s) { require_positive(s.halfwidth, "halfwidth"); },
                   [](const TriangularShape& s) { require_positive(s.halfwidth, "halfwidth"); },
                   [](const LaplaceShape& s) { require_positive(s.b, "b"); require_positive(s.c, "c"); },
                   [](const CauchyShape& s) { require_positive(s.b, "b"); require_positive(s.c, "c"); },
                   [](const CustomShape& s) { require_positive(s.dt, "custom dt"); },
               },
               p.shape);
    const Interval s = p.support_interval();
    if (s.lo < dom.lo - 1e-9 || s.hi > dom.hi + 1e-9)
      throw ConfigError("peak support [" + std::to_string(s.lo) + ", " + std::to_string(s.hi) +
                        "] leaves the domain");
  }
}

SampledSequence synthesize_signal(const SignalSpec& spec, double dt) {
  if (!(dt > 0)) throw ConfigError("dt must be positive");
  spec.validate();
  for (const auto& p : spec.peaks)
    if (!(dt < p.support_interval().length()))
      throw ConfigError("dt must be smaller than every peak support width");

  const auto grid = SampledSequence::centered_zeros(spec.domain_length, dt);
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(grid.size());
  for (const auto& p : spec.peaks) {
    const Interval s = p.support_interval();
    const Index first = std::max<Index>(0, static_cast<Index>(std::floor((s.lo - grid.t0()) / dt)));
    const Index last = std::min<Index>(grid.size() - 1, static_cast<Index>(std::ceil((s.hi - grid.t0()) / dt)));
    for (Index i = first; i <= last; ++i) mu[i] += p.value(grid.time(i));
  }
  return grid.with_values(std::move(mu));
}

IntervalSet::IntervalSet(std::vector<Interval> intervals) {
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (const auto& iv : intervals) {
    if (iv.hi < iv.lo) continue;
    if (!parts_.empty() && iv.lo <= parts_.back().hi) parts_.back().hi = std::max(parts_.back().hi, iv.hi);
    else parts_.push_back(iv);
  }
}

bool IntervalSet::contains(double t) const noexcept {
  return std::any_of(parts_.begin(), parts_.end(), [t](const Interval& iv) { return iv.contains(t); });
}

double IntervalSet::measure() const noexcept {
  double m = 0;
  for (const auto& iv : parts_) m += iv.length();
  return m;
}

IntervalSet IntervalSet::complement(Interval domain) const {
  std::vector<Interval> out;
  double cursor = domain.lo;
  for (const auto& iv : parts_) {
    if (iv.hi < domain.lo || iv.lo > domain.hi) continue;
    if (iv.lo > cursor) out.push_back({cursor, iv.lo});
    cursor = std::max(cursor, iv.hi);
  }
  if (cursor < domain.hi) out.push_back({cursor, domain.hi});
  return IntervalSet(std::move(out));
}

IntervalSet IntervalSet::minus(const IntervalSet& other) const {
  std::vector<Interval> out;
  for (const auto& iv : parts_) {
    const IntervalSet rest = other.complement(iv);
    for (const auto& piece : rest.intervals())
      if (piece.length() > 0) out.push_back(piece);
  }
  return IntervalSet(std::move(out));
}

IntervalSet IntervalSet::intersect(Interval window) const {
  std::vector<Interval> out;
  for (const auto& iv : parts_) {
    const Interval c{std::max(iv.lo, window.lo), std::min(iv.hi, window.hi)};
    if (c.lo <= c.hi) out.push_back(c);
  }
  return IntervalSet(std::move(out));
}

RegionKind RegionSet::classify(double t) const noexcept {
  if (signal.contains(t)) return RegionKind::Signal;
  if (smoothed_signal.contains(t)) return RegionKind::Transition;
  return RegionKind::Null;
}

RegionSet compute_regions(const SignalSpec& spec, const Kernel& kernel) {
  RegionSet r;
  r.domain = spec.domain();
  for (const auto& p : spec.peaks) {
    const Interval s = p.support_interval();
    r.peak_supports.push_back(s);
    r.smoothed_supports.push_back({std::max(r.domain.lo, s.lo + kernel.left_extent()),
                                   std::min(r.domain.hi, s.hi + kernel.right_extent())});
  }
  r.signal = IntervalSet(r.peak_supports);
  r.smoothed_signal = IntervalSet(r.smoothed_supports);
  r.null = r.signal.complement(r.domain);
  r.smoothed_null = r.smoothed_signal.complement(r.domain);
  r.transition = r.smoothed_signal.minus(r.signal);
  return r;
}

} // namespace stem
