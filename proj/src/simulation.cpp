#include "stem/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

#include "stem/io.hpp"
#include "stem/pipeline.hpp"
#include "stem/rng.hpp"

namespace stem {

std::string_view to_string(MomentSource s) {
  switch (s) {
  case MomentSource::ClosedForm: return "closed_form";
  case MomentSource::Empirical: return "empirical";
  case MomentSource::Exact: return "exact";
  }
  return "unknown";
}

MomentSource parse_moment_source(std::string_view name) {
  for (MomentSource s : {MomentSource::ClosedForm, MomentSource::Empirical, MomentSource::Exact})
    if (name == to_string(s)) return s;
  throw ConfigError("unknown moment source '" + std::string(name) + "'");
}

SignalSpec equal_peaks_signal(double length, std::size_t count, double amplitude, double b, double c) {
  SignalSpec spec{{}, length};
  for (std::size_t j = 1; j <= count; ++j) {
    const double tau = (static_cast<double>(j) - 0.5) * length / static_cast<double>(count) - length / 2;
    spec.peaks.push_back({TruncGaussianShape{b, c}, amplitude, tau});
  }
  return spec;
}

SignalSpec unequal_peaks_signal() {
  // Half-supports 16, 16, 30, 30, 28 average 24. The widths and the common
  // amplitude were tuned so the quartic-kernel power peaks at bandwidth 18.
  SignalSpec spec{{}, 1000};
  spec.peaks.push_back({EpanechnikovShape{16}, 20.5, -400});
  spec.peaks.push_back({TriangularShape{16}, 20.5, -200});
  spec.peaks.push_back({TruncGaussianShape{6, 5}, 20.5, 0});
  spec.peaks.push_back({LaplaceShape{6, 5}, 20.5, 200});
  spec.peaks.push_back({CauchyShape{4, 7}, 20.5, 400});
  return spec;
}

namespace {

Kernel make_kernel(const SimulationDesign& d, double gamma) {
  switch (d.kernel) {
  case KernelFamily::Gaussian: return gaussian_kernel(gamma, d.truncation, d.dt);
  case KernelFamily::Quartic: return quartic_kernel(gamma, d.dt);
  case KernelFamily::Template: break;
  }
  throw ConfigError("simulation designs support gaussian and quartic kernels only");
}

bool is_stem(Procedure p) { return p == Procedure::Bonferroni || p == Procedure::BH; }

SignalSpec with_amplitude(SignalSpec spec, std::optional<double> amplitude) {
  if (amplitude)
    for (auto& p : spec.peaks) p.amplitude = *amplitude;
  return spec;
}

Estimate proportion(std::uint64_t hits, std::size_t n) {
  if (n == 0) return {};
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  return {p, std::sqrt(p * (1 - p) / static_cast<double>(n))};
}

Estimate mean_of(double sum, double sq, std::size_t n, double scale) {
  if (n == 0) return {};
  const double nn = static_cast<double>(n);
  const double mean = sum / nn;
  const double var = n > 1 ? std::max(0.0, (sq - nn * mean * mean) / (nn - 1)) : 0.0;
  return {mean / scale, std::sqrt(var / nn) / scale};
}

} // namespace

void SimulationDesign::validate() const {
  signal.validate();
  noise.validate();
  if (!(dt > 0)) throw ConfigError("design dt must be positive");
  if (gammas.empty()) throw ConfigError("design needs at least one bandwidth");
  for (double g : gammas)
    if (!(g >= dt)) throw BandwidthTooSmall("design bandwidth " + std::to_string(g) + " is below dt");
  for (double a : amplitudes)
    if (!(a > 0)) throw ConfigError("design amplitudes must be positive");
  if (procedures.empty()) throw ConfigError("design needs at least one procedure");
  if (!(alpha > 0 && alpha < 1)) throw ConfigError("design alpha must lie in (0, 1)");
  if (replications == 0) throw ConfigError("design needs at least one replication");
  if (kernel == KernelFamily::Template) throw ConfigError("design kernel must be gaussian or quartic");
  if (kernel == KernelFamily::Gaussian && !(truncation > 0))
    throw ConfigError("gaussian truncation must be positive");
  if (moments == MomentSource::ClosedForm && kernel != KernelFamily::Gaussian)
    throw ConfigError("closed-form moments need a gaussian kernel; use empirical or exact");
  if (moments == MomentSource::Empirical && moment_length < 16)
    throw ConfigError("moment_length must be at least 16");
  if (moments == MomentSource::Empirical && moment_sequences == 0)
    throw ConfigError("moment_sequences must be at least 1");
  if (auto_bandwidth) {
    for (Procedure p : procedures)
      if (!is_stem(p)) throw ConfigError("automatic bandwidth supports bonferroni and bh only");
  }
  const double margin = gammas.empty() ? 0 : *std::max_element(gammas.begin(), gammas.end()) *
                                                 (kernel == KernelFamily::Gaussian ? truncation : 1.0);
  for (const auto& p : signal.peaks) {
    const Interval s = p.support_interval();
    if (s.lo < signal.domain().lo + margin || s.hi > signal.domain().hi - margin)
      throw ConfigError("peak support reaches the smoothing margin of the widest kernel");
  }
}

std::vector<std::string> preset_names() { return {"sim31", "sim32", "sim34", "sim35"}; }

SimulationDesign preset_design(std::string_view name) {
  SimulationDesign d;
  d.name = std::string(name);
  d.signal = equal_peaks_signal(1000, 10, 15, 3, 3);
  d.noise = {1.0, 0.0};
  d.kernel = KernelFamily::Gaussian;
  d.truncation = 3;
  // Bandwidth and amplitude grids are a reconstruction; only their ranges
  // are known.
  d.gammas = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  d.amplitudes = {9, 12, 15};
  d.procedures = {Procedure::Bonferroni, Procedure::BH};
  d.alpha = 0.05;
  d.replications = 10000;
  d.moments = MomentSource::ClosedForm;

  if (name == "sim31") return d;
  if (name == "sim34") {
    d.procedures = {Procedure::Bonferroni, Procedure::BH, Procedure::PointwiseBonferroni,
                    Procedure::PointwiseBH, Procedure::Supremum};
    return d;
  }
  if (name == "sim35") {
    d.gammas = {1.5, 2, 2.5, 3, 3.5, 4, 4.5, 5, 5.5, 6};
    d.auto_bandwidth = true;
    d.replications = 1000;
    return d;
  }
  if (name == "sim32") {
    // Five unequal shapes, average half-support 24, white noise, quartic
    // kernel. Amplitudes and half-widths are a reconstruction.
    d.signal = unequal_peaks_signal();
    d.amplitudes = {};
    d.kernel = KernelFamily::Quartic;
    d.gammas = {6, 12, 18, 24, 30, 40};
    d.moments = MomentSource::Empirical;
    // One calibration sequence of 1000 samples leaves the wide quartic
    // kernels with badly estimated moments; average many instead.
    d.moment_sequences = 1000;
    return d;
  }
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

void OutcomeAccumulator::add(const TrialOutcome& o) {
  ++n_;
  any_false_ += o.false_rejections > 0;
  const double fdp = o.false_discovery_proportion();
  fdp_sum_ += fdp;
  fdp_sq_ += fdp * fdp;
  std::uint64_t hits = 0;
  for (bool d : o.detected) hits += d;
  hits_sum_ += hits;
  hits_sq_ += hits * hits;
  std::uint64_t maxima = 0;
  for (auto m : o.maxima_per_peak) maxima += m;
  maxima_sum_ += maxima;
  maxima_sq_ += maxima * maxima;
  rejections_sum_ += o.rejections;
  rejections_sq_ += o.rejections * o.rejections;
}

void OutcomeAccumulator::merge(const OutcomeAccumulator& other) {
  if (other.peaks_ != peaks_) throw ConfigError("cannot merge accumulators over different peak counts");
  n_ += other.n_;
  any_false_ += other.any_false_;
  fdp_sum_ += other.fdp_sum_;
  fdp_sq_ += other.fdp_sq_;
  hits_sum_ += other.hits_sum_;
  hits_sq_ += other.hits_sq_;
  maxima_sum_ += other.maxima_sum_;
  maxima_sq_ += other.maxima_sq_;
  rejections_sum_ += other.rejections_sum_;
  rejections_sq_ += other.rejections_sq_;
}

Estimate OutcomeAccumulator::fwer() const { return proportion(any_false_, n_); }
Estimate OutcomeAccumulator::fdr() const { return mean_of(fdp_sum_, fdp_sq_, n_, 1.0); }

Estimate OutcomeAccumulator::power() const {
  if (peaks_ == 0) return {};
  return mean_of(static_cast<double>(hits_sum_), static_cast<double>(hits_sq_), n_,
                 static_cast<double>(peaks_));
}

Estimate OutcomeAccumulator::maxima_per_peak() const {
  if (peaks_ == 0) return {};
  return mean_of(static_cast<double>(maxima_sum_), static_cast<double>(maxima_sq_), n_,
                 static_cast<double>(peaks_));
}

Estimate OutcomeAccumulator::rejections() const {
  return mean_of(static_cast<double>(rejections_sum_), static_cast<double>(rejections_sq_), n_, 1.0);
}

const SweepCell& SweepResult::cell(std::optional<double> amplitude, std::optional<double> gamma,
                                   Procedure procedure) const {
  for (const auto& c : cells)
    if (c.amplitude == amplitude && c.gamma == gamma && c.procedure == procedure) return c;
  throw ConfigError("sweep has no such cell");
}

namespace {

// Compact per-replication record; expanded into accumulators afterwards.
struct Slot {
  TrialOutcome outcome;
  std::size_t chosen = 0;
};

struct Plan {
  const SimulationDesign& design;
  std::vector<std::optional<double>> amplitudes;
  std::vector<Kernel> kernels;
  std::vector<NoiseMoments> moments;        // one per kernel
  std::vector<SampledSequence> signals;     // one per amplitude
  std::vector<RegionSet> regions;           // one per kernel
  std::size_t columns;                      // gammas (or 1 when automatic)

  std::size_t slots_per_rep() const {
    return amplitudes.size() * columns * design.procedures.size();
  }
  std::size_t slot(std::size_t a, std::size_t g, std::size_t p) const {
    return (a * columns + g) * design.procedures.size() + p;
  }
};

NoiseMoments reference_moments(const SimulationDesign& d, const Kernel& kernel, double gamma) {
  if (d.kernel == KernelFamily::Gaussian) return closed_form_moments(d.noise, gamma);
  return smoothed_noise_moments(d.noise, kernel);
}

// Stream paths {r, 0} belong to replication noise; this prefix cannot collide.
constexpr std::uint64_t kMomentStream = ~std::uint64_t{0};

NoiseMoments empirical_moments(const SimulationDesign& d, const Kernel& k, std::size_t g) {
  // Keep moment_length samples after trimming the convolution margins.
  const Index length = d.moment_length + 2 * k.margin();
  NoiseMoments sum{0, 0, 0};
  for (std::size_t s = 0; s < d.moment_sequences; ++s) {
    const auto noise = generate_noise(d.noise, 0.0, length, d.dt, derive_seed(d.seed, {kMomentStream, g, s}));
    const NoiseMoments m = estimate_moments(convolve(noise, k));
    sum.sigma2 += m.sigma2;
    sum.lambda2 += m.lambda2;
    sum.lambda4 += m.lambda4;
  }
  const double n = static_cast<double>(d.moment_sequences);
  return {sum.sigma2 / n, sum.lambda2 / n, sum.lambda4 / n};
}

DetectionReport run_procedure(Procedure p, const CandidateSet& with_p, const SampledSequence& smoothed,
                              const NoiseMoments& m, const PalmParams& palm, const SimulationDesign& d) {
  switch (p) {
  case Procedure::Bonferroni: return bonferroni(with_p, d.alpha, palm);
  case Procedure::BH: return benjamini_hochberg(with_p, d.alpha, palm);
  case Procedure::PointwiseBonferroni:
  case Procedure::PointwiseBH: {
    const auto tests = pointwise_pvalues(smoothed, m);
    return peak_level(pointwise_correct(tests, d.alpha, p, m.sigma()), with_p, m.sigma());
  }
  case Procedure::Supremum: return supremum_detect(with_p, m, d.signal.domain_length, d.alpha, d.rice);
  }
  throw ConfigError("unknown procedure");
}

void run_replication(const Plan& plan, std::size_t rep, std::vector<Slot>& out) {
  const auto& d = plan.design;
  const Index n = plan.signals.front().size();
  const auto noise = generate_noise(d.noise, 0.0, n, d.dt, derive_seed(d.seed, {rep, 0}));

  const auto& moments = plan.moments;

  for (std::size_t a = 0; a < plan.amplitudes.size(); ++a) {
    const SampledSequence raw = plan.signals[a].with_values(plan.signals[a].values() + noise.values());

    if (d.auto_bandwidth) {
      for (std::size_t p = 0; p < d.procedures.size(); ++p) {
        const auto best = auto_bandwidth(raw, plan.kernels, moments, d.procedures[p], d.alpha);
        Slot& s = out[plan.slot(a, 0, p)];
        s.outcome = score_trial(best.result.report, best.result.candidates, plan.regions[best.chosen]);
        s.chosen = best.chosen;
      }
      continue;
    }

    for (std::size_t g = 0; g < plan.kernels.size(); ++g) {
      const SampledSequence smoothed = convolve(raw, plan.kernels[g]);
      const PalmParams palm(moments[g]);
      const CandidateSet cands = candidate_pvalues(find_local_maxima(smoothed, smoothed.margin()), palm);
      for (std::size_t p = 0; p < d.procedures.size(); ++p) {
        const auto report = run_procedure(d.procedures[p], cands, smoothed, moments[g], palm, d);
        out[plan.slot(a, g, p)].outcome = score_trial(report, cands, plan.regions[g]);
      }
    }
  }
}

std::optional<double> theoretical_cell_power(const Plan& plan, std::size_t a, std::size_t g,
                                             Procedure p) {
  const auto& d = plan.design;
  if (!is_stem(p) || d.signal.peaks.empty()) return std::nullopt;
  const Kernel& k = plan.kernels[g];
  const NoiseMoments m = reference_moments(d, k, k.bandwidth());
  const PalmParams palm(m);
  const double length = d.signal.domain_length;
  const double a1 = static_cast<double>(d.signal.peaks.size()) / length;
  if (!(a1 < 1)) return std::nullopt;
  const auto thr = asymptotic_thresholds(d.alpha, a1, expected_maxima_density(m), palm);
  const double u = p == Procedure::Bonferroni ? thr.u_bon(length) : thr.u_bh;
  const SignalSpec spec = with_amplitude(d.signal, plan.amplitudes[a]);
  double sum = 0;
  for (const auto& peak : spec.peaks) sum += theoretical_power(peak, k, m, u);
  return sum / static_cast<double>(spec.peaks.size());
}

} // namespace

SweepResult run_sweep(const SimulationDesign& design, unsigned threads) {
  design.validate();

  Plan plan{design, {}, {}, {}, {}, {}, design.auto_bandwidth ? 1u : design.gammas.size()};
  if (design.amplitudes.empty()) plan.amplitudes.push_back(std::nullopt);
  for (double a : design.amplitudes) plan.amplitudes.push_back(a);
  for (double g : design.gammas) plan.kernels.push_back(make_kernel(design, g));
  for (std::size_t g = 0; g < plan.kernels.size(); ++g) {
    const Kernel& k = plan.kernels[g];
    switch (design.moments) {
    case MomentSource::ClosedForm: plan.moments.push_back(closed_form_moments(design.noise, k.bandwidth())); break;
    case MomentSource::Exact: plan.moments.push_back(smoothed_noise_moments(design.noise, k)); break;
    case MomentSource::Empirical: plan.moments.push_back(empirical_moments(design, k, g)); break;
    }
  }
  for (const auto& a : plan.amplitudes)
    plan.signals.push_back(synthesize_signal(with_amplitude(design.signal, a), design.dt));
  for (const auto& k : plan.kernels) plan.regions.push_back(compute_regions(design.signal, k));

  const std::size_t per_rep = plan.slots_per_rep();
  std::vector<std::vector<Slot>> slots(design.replications, std::vector<Slot>(per_rep));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t r = next++; r < design.replications; r = next++) {
      try {
        run_replication(plan, r, slots[r]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = design.replications;
      }
    }
  };
  threads = std::max(1u, threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  SweepResult result{design.name, {}, {}};
  const std::size_t peaks = design.signal.peaks.size();
  for (std::size_t a = 0; a < plan.amplitudes.size(); ++a) {
    for (std::size_t g = 0; g < plan.columns; ++g) {
      for (std::size_t p = 0; p < design.procedures.size(); ++p) {
        SweepCell cell{plan.amplitudes[a],
                       design.auto_bandwidth ? std::nullopt : std::optional<double>(design.gammas[g]),
                       design.procedures[p], OutcomeAccumulator(peaks), std::nullopt};
        std::vector<std::size_t> chosen(design.gammas.size(), 0);
        for (std::size_t r = 0; r < design.replications; ++r) {
          const Slot& s = slots[r][plan.slot(a, g, p)];
          cell.counts.add(s.outcome);
          ++chosen[s.chosen];
        }
        if (!design.auto_bandwidth) {
          cell.theoretical_power = theoretical_cell_power(plan, a, g, design.procedures[p]);
        } else {
          for (std::size_t i = 0; i < design.gammas.size(); ++i)
            result.chosen_gamma.push_back({plan.amplitudes[a], design.procedures[p], design.gammas[i],
                                           chosen[i], design.replications});
        }
        result.cells.push_back(std::move(cell));
      }
    }
  }
  return result;
}

namespace {

std::string opt_field(const std::optional<double>& v, std::string_view fallback) {
  return v ? format_double(*v) : std::string(fallback);
}

} // namespace

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  out << "design,amplitude,gamma,procedure,metric,value,se,replications\n";
  for (const auto& c : result.cells) {
    const std::string prefix = result.design + ',' + opt_field(c.amplitude, "spec") + ',' +
                               opt_field(c.gamma, "auto") + ',' + std::string(to_string(c.procedure)) + ',';
    const auto n = std::to_string(c.counts.replications());
    auto row = [&](std::string_view metric, const Estimate& e) {
      out << prefix << metric << ',' << format_double(e.value) << ',' << format_double(e.se) << ',' << n << '\n';
    };
    row("fwer", c.counts.fwer());
    row("fdr", c.counts.fdr());
    row("power", c.counts.power());
    row("maxima_per_peak", c.counts.maxima_per_peak());
    row("rejections", c.counts.rejections());
    if (c.theoretical_power)
      out << prefix << "theoretical_power," << format_double(*c.theoretical_power) << ",," << n << '\n';
  }
  for (const auto& s : result.chosen_gamma) {
    const Estimate e = proportion(s.count, s.replications);
    out << result.design << ',' << opt_field(s.amplitude, "spec") << ',' << format_double(s.gamma) << ','
        << to_string(s.procedure) << ",chosen_gamma_share," << format_double(e.value) << ','
        << format_double(e.se) << ',' << s.replications << '\n';
  }
}

std::vector<std::string> write_figure_data(const std::string& directory, const SweepResult& result,
                                           const SimulationDesign& design,
                                           const std::string& provenance) {
  std::vector<std::string> written;
  auto open = [&](const std::string& name) {
    const std::string path = directory + "/" + name;
    std::ofstream f(path);
    if (!f) throw IoError("cannot write " + path);
    f << provenance;
    written.push_back(name);
    return f;
  };
  auto cell_prefix = [](const SweepCell& c) {
    return opt_field(c.amplitude, "spec") + ',' + opt_field(c.gamma, "auto") + ',' +
           std::string(to_string(c.procedure));
  };

  if (design.auto_bandwidth) {
    auto f = open("fig7a_auto_bandwidth.csv");
    f << "amplitude,gamma,procedure,power,power_se,fwer,fwer_se,fdr,fdr_se\n";
    for (const auto& c : result.cells)
      f << cell_prefix(c) << ',' << format_double(c.counts.power().value) << ','
        << format_double(c.counts.power().se) << ',' << format_double(c.counts.fwer().value) << ','
        << format_double(c.counts.fwer().se) << ',' << format_double(c.counts.fdr().value) << ','
        << format_double(c.counts.fdr().se) << '\n';
    auto h = open("fig7b_chosen_gamma.csv");
    h << "amplitude,procedure,gamma,share\n";
    for (const auto& s : result.chosen_gamma)
      h << opt_field(s.amplitude, "spec") << ',' << to_string(s.procedure) << ',' << format_double(s.gamma)
        << ',' << format_double(static_cast<double>(s.count) / static_cast<double>(s.replications)) << '\n';
    return written;
  }

  const bool baselines = std::any_of(design.procedures.begin(), design.procedures.end(),
                                     [](Procedure p) { return !is_stem(p); });
  if (baselines) {
    auto f = open("fig6_methods.csv");
    f << "amplitude,gamma,procedure,fwer,fwer_se,fdr,fdr_se,power,power_se\n";
    for (const auto& c : result.cells)
      f << cell_prefix(c) << ',' << format_double(c.counts.fwer().value) << ','
        << format_double(c.counts.fwer().se) << ',' << format_double(c.counts.fdr().value) << ','
        << format_double(c.counts.fdr().se) << ',' << format_double(c.counts.power().value) << ','
        << format_double(c.counts.power().se) << '\n';
    return written;
  }

  auto err = open("fig3_error.csv");
  err << "amplitude,gamma,procedure,fwer,fwer_se,fdr,fdr_se\n";
  auto loc = open("fig3b_maxima_per_peak.csv");
  loc << "amplitude,gamma,maxima_per_peak,se\n";
  auto pow = open("fig4_power.csv");
  pow << "amplitude,gamma,procedure,power,power_se,theoretical_power\n";
  for (const auto& c : result.cells) {
    err << cell_prefix(c) << ',' << format_double(c.counts.fwer().value) << ','
        << format_double(c.counts.fwer().se) << ',' << format_double(c.counts.fdr().value) << ','
        << format_double(c.counts.fdr().se) << '\n';
    if (c.procedure == design.procedures.front())
      loc << opt_field(c.amplitude, "spec") << ',' << opt_field(c.gamma, "auto") << ','
          << format_double(c.counts.maxima_per_peak().value) << ','
          << format_double(c.counts.maxima_per_peak().se) << '\n';
    pow << cell_prefix(c) << ',' << format_double(c.counts.power().value) << ','
        << format_double(c.counts.power().se) << ','
        << (c.theoretical_power ? format_double(*c.theoretical_power) : std::string()) << '\n';
  }
  return written;
}

} // namespace stem
