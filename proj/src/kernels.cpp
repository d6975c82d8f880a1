#include "stem/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "stem/io.hpp"
#include "stem/maxima.hpp"
#include "stem/normal.hpp"

namespace stem {

std::string_view to_string(KernelFamily family) {
  switch (family) {
  case KernelFamily::Gaussian: return "gaussian";
  case KernelFamily::Quartic: return "quartic";
  case KernelFamily::Template: return "template";
  }
  return "unknown";
}

namespace {

void check_bandwidth(double gamma, double dt) {
  if (!(dt > 0)) throw ConfigError("kernel dt must be positive");
  if (!(gamma >= dt))
    throw BandwidthTooSmall("bandwidth " + std::to_string(gamma) + " is below the grid spacing " +
                            std::to_string(dt));
}

// Half width in samples; the epsilon keeps gamma*d/dt = 9 from rounding to 8.
Index half_width(double extent, double dt) {
  return static_cast<Index>(std::floor(extent / dt + 1e-9));
}

} // namespace

Kernel gaussian_kernel(double gamma, double d, double dt) {
  check_bandwidth(gamma, dt);
  if (!(d > 0)) throw ConfigError("gaussian truncation d must be positive");
  const Index half = half_width(gamma * d, dt);
  Eigen::VectorXd w(2 * half + 1);
  for (Index k = -half; k <= half; ++k) w[k + half] = normal::pdf(k * dt / gamma) / gamma;
  w /= w.sum() * dt;
  return Kernel(std::move(w), dt, half, gamma, KernelFamily::Gaussian);
}

Kernel quartic_kernel(double gamma, double dt) {
  check_bandwidth(gamma, dt);
  const Index half = half_width(gamma, dt);
  Eigen::VectorXd w(2 * half + 1);
  for (Index k = -half; k <= half; ++k) {
    const double r = k * dt / gamma;
    const double s = std::max(0.0, 1 - r * r);
    w[k + half] = 15.0 / (16.0 * gamma) * s * s;
  }
  w /= w.sum() * dt;
  return Kernel(std::move(w), dt, half, gamma, KernelFamily::Quartic);
}

Kernel delta_kernel(double dt) {
  if (!(dt > 0)) throw ConfigError("kernel dt must be positive");
  return Kernel(Eigen::VectorXd::Constant(1, 1.0 / dt), dt, 0, 0.0, KernelFamily::Template);
}

Kernel estimate_template(const SampledSequence& training, double height_threshold, Index window) {
  if (window < 3) throw ConfigError("template window must be at least 3 samples");
  const auto& x = training.values();
  const Index n = x.size();

  std::vector<Index> peaks;
  for (Index i : local_maximum_indices(x, 1, n - 1))
    if (x[i] > height_threshold) peaks.push_back(i);

  // Strongest first; a spike only keeps its highest maximum within half a window.
  std::stable_sort(peaks.begin(), peaks.end(), [&](Index a, Index b) { return x[a] > x[b]; });
  const Index half = window / 2;
  std::vector<Index> chosen;
  for (Index p : peaks) {
    const bool close = std::any_of(chosen.begin(), chosen.end(),
                                   [&](Index c) { return std::abs(c - p) <= half; });
    if (!close) chosen.push_back(p);
  }

  Eigen::VectorXd sum = Eigen::VectorXd::Zero(window);
  Index used = 0;
  for (Index p : chosen) {
    const Index start = p - half;
    if (start < 0 || start + window > n) continue;
    sum += x.segment(start, window);
    ++used;
  }
  if (used == 0)
    throw NumericError("no usable spikes above threshold " + std::to_string(height_threshold) +
                       " (count 0)");

  Eigen::VectorXd avg = sum / static_cast<double>(used);
  const double peak = avg.maxCoeff();
  if (!(peak > 0)) throw NumericError("template average has no positive maximum");
  avg /= peak;
  return Kernel(std::move(avg), training.dt(), half, 0.0, KernelFamily::Template);
}

void write_kernel_csv(std::ostream& out, const Kernel& kernel) {
  out << "# dt=" << format_double(kernel.dt()) << " center=" << kernel.center() << '\n';
  for (Index k = 0; k < kernel.size(); ++k) out << format_double(kernel.weights()[k]) << '\n';
}

Kernel read_kernel_csv(std::istream& in) {
  std::string line;
  double dt = 0;
  Index center = -1;
  std::vector<double> w;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream fields(line.substr(1));
      std::string tok;
      while (fields >> tok) {
        if (tok.rfind("dt=", 0) == 0) dt = parse_double(tok.substr(3));
        else if (tok.rfind("center=", 0) == 0) center = std::stol(tok.substr(7));
      }
      continue;
    }
    w.push_back(parse_double(line));
  }
  if (!(dt > 0) || center < 0) throw IoError("kernel file is missing its '# dt=.. center=..' header");
  if (w.empty()) throw IoError("kernel file has no weights");
  Eigen::VectorXd weights = Eigen::Map<Eigen::VectorXd>(w.data(), static_cast<Index>(w.size()));
  return Kernel(std::move(weights), dt, center, 0.0, KernelFamily::Template);
}

} // namespace stem
