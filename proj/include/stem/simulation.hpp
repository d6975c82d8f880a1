#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stem/baselines.hpp"
#include "stem/evaluation.hpp"
#include "stem/noise.hpp"

namespace stem {

/// Where the per-kernel noise moments of a sweep come from.
///  - ClosedForm: Gaussian-ACVF formulas (Gaussian kernel only).
///  - Empirical: estimate_moments on independent smoothed noise sequences of
///    `moment_length` samples, once per bandwidth before the replications
///    run; `moment_sequences` estimates are averaged.
///  - Exact: smoothed_noise_moments, the finite-difference moments of the
///    discretised noise, computed from the filter taps.
enum class MomentSource { ClosedForm, Empirical, Exact };

std::string_view to_string(MomentSource s);
MomentSource parse_moment_source(std::string_view name);

struct SimulationDesign {
  std::string name;
  SignalSpec signal;
  double dt = 1.0;
  GaussianAcvfParams noise{1.0, 0.0};
  KernelFamily kernel = KernelFamily::Gaussian;
  double truncation = 3.0;  // Gaussian kernel support +-gamma * truncation
  std::vector<double> gammas;
  /// Every peak amplitude is set to each value in turn; empty keeps the
  /// amplitudes in `signal`.
  std::vector<double> amplitudes;
  std::vector<Procedure> procedures;
  double alpha = 0.05;
  std::size_t replications = 1000;
  std::uint64_t seed = 0;
  MomentSource moments = MomentSource::ClosedForm;
  Index moment_length = 1000;
  std::size_t moment_sequences = 1;
  /// Pick the bandwidth with the most rejections per replication instead of
  /// sweeping the gammas as separate cells.
  bool auto_bandwidth = false;
  RiceConvention rice = RiceConvention::Unscaled;

  /// Throws ConfigError on any inconsistency; run_sweep calls it first.
  void validate() const;
};

/// Built-in designs: "sim31" (equal peaks), "sim32" (unequal peaks, quartic
/// kernel), "sim34" (STEM against pointwise and supremum baselines),
/// "sim35" (automatic bandwidth).
SimulationDesign preset_design(std::string_view name);
std::vector<std::string> preset_names();

/// J equal truncated Gaussian peaks a/b phi((t - tau_j)/b) on [-cb, cb] at
/// tau_j = (j - 1/2) L / J - L / 2.
SignalSpec equal_peaks_signal(double length, std::size_t count, double amplitude, double b, double c);

/// Five unequal peaks (Epanechnikov, triangular, truncated Gaussian, Laplace,
/// Cauchy) with average half-support 24 on a domain of length 1000.
SignalSpec unequal_peaks_signal();

struct Estimate {
  double value = 0;
  double se = 0;
};

/// Mergeable per-cell counters. Integer sums are exact, so merge order does
/// not change any count.
class OutcomeAccumulator {
public:
  explicit OutcomeAccumulator(std::size_t peaks = 0) : peaks_(peaks) {}

  void add(const TrialOutcome& outcome);
  void merge(const OutcomeAccumulator& other);

  std::size_t replications() const noexcept { return n_; }
  Estimate fwer() const;
  Estimate fdr() const;
  Estimate power() const;
  Estimate maxima_per_peak() const;
  Estimate rejections() const;

  friend bool operator==(const OutcomeAccumulator&, const OutcomeAccumulator&) = default;

private:
  std::size_t peaks_;
  std::size_t n_ = 0;
  std::uint64_t any_false_ = 0;
  double fdp_sum_ = 0;
  double fdp_sq_ = 0;
  std::uint64_t hits_sum_ = 0;
  std::uint64_t hits_sq_ = 0;
  std::uint64_t maxima_sum_ = 0;
  std::uint64_t maxima_sq_ = 0;
  std::uint64_t rejections_sum_ = 0;
  std::uint64_t rejections_sq_ = 0;
};

struct SweepCell {
  std::optional<double> amplitude;  // empty: amplitudes from the signal spec
  std::optional<double> gamma;      // empty: automatic bandwidth
  Procedure procedure;
  OutcomeAccumulator counts;
  std::optional<double> theoretical_power;
};

struct ChosenGammaShare {
  std::optional<double> amplitude;
  Procedure procedure;
  double gamma;
  std::size_t count;
  std::size_t replications;
};

struct SweepResult {
  std::string design;
  std::vector<SweepCell> cells;
  std::vector<ChosenGammaShare> chosen_gamma;  // auto-bandwidth designs only

  const SweepCell& cell(std::optional<double> amplitude, std::optional<double> gamma,
                        Procedure procedure) const;
};

/// Runs every replication of every cell. Replication r draws its noise from
/// the stream derive_seed(seed, {r, ...}), shared by all cells, so the
/// result does not depend on `threads`.
SweepResult run_sweep(const SimulationDesign& design, unsigned threads = 1);

/// Tidy CSV: design,amplitude,gamma,procedure,metric,value,se,replications.
void write_sweep_csv(std::ostream& out, const SweepResult& result);

/// Figure-style wide tables in `directory`; returns the file names written.
std::vector<std::string> write_figure_data(const std::string& directory, const SweepResult& result,
                                           const SimulationDesign& design,
                                           const std::string& provenance);

} // namespace stem
