#include "stem/noise.hpp"

#include <cmath>
#include <numbers>

#include "stem/normal.hpp"
#include "stem/rng.hpp"

namespace stem {

double NoiseMoments::sigma() const noexcept { return std::sqrt(sigma2); }

void NoiseMoments::validate() const {
  auto ok = [](double v) { return v > 0 && std::isfinite(v); };
  if (!ok(sigma2) || !ok(lambda2) || !ok(lambda4))
    throw NumericError("noise moments must be positive and finite");
  if (!(delta() > 0))
    throw NumericError("noise moments violate sigma2 * lambda4 > lambda2^2");
}

void GaussianAcvfParams::validate() const {
  if (!(sigma > 0) || !std::isfinite(sigma)) throw ConfigError("noise sigma must be positive");
  if (!(nu >= 0) || !std::isfinite(nu)) throw ConfigError("noise nu must be non-negative");
}

NoiseMoments closed_form_moments(const GaussianAcvfParams& params, double gamma) {
  params.validate();
  if (!(gamma >= 0)) throw ConfigError("gamma must be non-negative");
  const double xi = std::hypot(gamma, params.nu);
  if (!(xi > 0)) throw ConfigError("white noise (xi = 0) has no derivative moments");
  const double s2 = params.sigma * params.sigma;
  const double sqrt_pi = std::sqrt(std::numbers::pi);
  return {s2 / (2 * sqrt_pi * xi), s2 / (4 * sqrt_pi * std::pow(xi, 3)),
          3 * s2 / (8 * sqrt_pi * std::pow(xi, 5))};
}

namespace {

Eigen::VectorXd standard_normals(Index n, std::uint64_t seed) {
  Engine engine = make_engine(seed);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd eps(n);
  for (Index i = 0; i < n; ++i) eps[i] = gauss(engine);
  return eps;
}

// sigma (1/xi) phi(j dt / xi) sqrt(dt) for |j dt| <= 6 xi.
Eigen::VectorXd noise_taps(double sigma, double xi, double dt) {
  const Index half = static_cast<Index>(std::floor(6 * xi / dt + 1e-9));
  Eigen::VectorXd g(2 * half + 1);
  for (Index j = -half; j <= half; ++j) g[j + half] = sigma * normal::pdf(j * dt / xi) / xi * std::sqrt(dt);
  return g;
}

Eigen::VectorXd full_convolution(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(a.size() + b.size() - 1);
  for (Index k = 0; k < b.size(); ++k) out.segment(k, a.size()) += b[k] * a;
  return out;
}

Eigen::VectorXd forward_difference(const Eigen::VectorXd& v) {
  return v.tail(v.size() - 1) - v.head(v.size() - 1);
}

double sample_variance(const Eigen::VectorXd& v) {
  const double mean = v.mean();
  return (v.array() - mean).square().sum() / static_cast<double>(v.size() - 1);
}

} // namespace

SampledSequence generate_noise(const GaussianAcvfParams& params, double gamma, Index length,
                               double dt, std::uint64_t seed) {
  params.validate();
  if (!(dt > 0)) throw ConfigError("dt must be positive");
  if (!(gamma >= 0)) throw ConfigError("gamma must be non-negative");
  if (length < 1) throw ConfigError("noise length must be positive");

  const double xi = std::hypot(gamma, params.nu);
  if (xi == 0) return SampledSequence(params.sigma / std::sqrt(dt) * standard_normals(length, seed), dt);

  const Eigen::VectorXd g = noise_taps(params.sigma, xi, dt);
  if (length < g.size())
    throw ConfigError("noise length " + std::to_string(length) + " is shorter than the kernel support " +
                      std::to_string(g.size()));
  const Eigen::VectorXd eps = standard_normals(length + g.size() - 1, seed);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(length);
  for (Index k = 0; k < g.size(); ++k) z += g[k] * eps.segment(g.size() - 1 - k, length);
  return SampledSequence(std::move(z), dt);
}

NoiseMoments estimate_moments(const SampledSequence& smoothed_noise) {
  const Eigen::VectorXd x = smoothed_noise.interior();
  if (x.size() < 10) throw ConfigError("moment estimation needs at least 10 interior samples");
  const double dt = smoothed_noise.dt();
  const Eigen::VectorXd d1 = forward_difference(x);
  const Eigen::VectorXd d2 = forward_difference(d1);
  const NoiseMoments m{sample_variance(x), sample_variance(d1) / (dt * dt),
                       sample_variance(d2) / (dt * dt * dt * dt)};
  if (!(m.sigma2 > 0) || !(m.lambda2 > 0) || !(m.lambda4 > 0))
    throw NumericError("degenerate (constant or linear) input: a moment estimate is zero");
  m.validate();
  return m;
}

NoiseMoments filter_moments(const Eigen::VectorXd& taps, double dt) {
  if (taps.size() == 0) throw ConfigError("filter has no taps");
  Eigen::VectorXd padded = Eigen::VectorXd::Zero(taps.size() + 4);
  padded.segment(2, taps.size()) = taps;
  const Eigen::VectorXd d1 = forward_difference(padded);
  const Eigen::VectorXd d2 = forward_difference(d1);
  NoiseMoments m{taps.squaredNorm(), d1.squaredNorm() / (dt * dt), d2.squaredNorm() / std::pow(dt, 4)};
  m.validate();
  return m;
}

NoiseMoments smoothed_noise_moments(const GaussianAcvfParams& params, const Kernel& kernel) {
  params.validate();
  const double dt = kernel.dt();
  const Eigen::VectorXd raw = params.nu > 0 ? noise_taps(params.sigma, params.nu, dt)
                                            : Eigen::VectorXd::Constant(1, params.sigma / std::sqrt(dt));
  return filter_moments(full_convolution(raw, kernel.weights()) * dt, dt);
}

} // namespace stem
