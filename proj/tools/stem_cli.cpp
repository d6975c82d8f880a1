// Command-line front end: detect, estimate-noise, estimate-template,
// simulate and synthesize. Exit codes: 2 bad configuration, 3 I/O, 4 numeric.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "stem/baselines.hpp"
#include "stem/io.hpp"
#include "stem/pipeline.hpp"
#include "stem/rng.hpp"
#include "stem/simulation.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using nlohmann::json;

struct Provenance {
  std::string command;
  std::vector<std::pair<std::string, std::string>> flags;

  // Output locations and the thread count do not affect results and are
  // left out so outputs compare byte-for-byte across runs.
  static Provenance of(const CLI::App& sub) {
    static const std::set<std::string> skip = {"--threads", "--out", "--out-json", "--out-csv",
                                               "--emit-figure-data", "--help"};
    Provenance p{sub.get_name(), {}};
    for (const CLI::Option* opt : sub.get_options()) {
      if (opt->count() == 0 || skip.count(opt->get_name())) continue;
      std::string value;
      for (const auto& r : opt->results()) value += (value.empty() ? "" : " ") + r;
      p.flags.emplace_back(opt->get_name(), value);
    }
    return p;
  }

  std::string comment_lines() const {
    std::string s = "# stem " + std::string(kVersion) + "\n# command: " + command;
    for (const auto& [k, v] : flags) s += " " + k + (v.empty() ? "" : " " + v);
    return s + "\n";
  }

  json to_json() const {
    json f = json::object();
    for (const auto& [k, v] : flags) f[k] = v;
    return json{{"tool", "stem"}, {"version", kVersion}, {"command", command}, {"flags", std::move(f)}};
  }
};

std::ifstream open_in(const std::string& path, const std::string& flag) {
  std::ifstream in(path);
  if (!in) throw stem::IoError(flag + ": cannot open '" + path + "'");
  return in;
}

std::ofstream open_out(const std::string& path, const std::string& flag) {
  std::ofstream out(path);
  if (!out) throw stem::IoError(flag + ": cannot write '" + path + "'");
  return out;
}

stem::SampledSequence load_series(const std::string& path, const std::string& flag,
                                  std::optional<double> dt) {
  auto in = open_in(path, flag);
  try {
    return stem::read_series_csv(in, dt);
  } catch (const stem::ConfigError& e) {
    throw stem::ConfigError(flag + " '" + path + "': " + e.what());
  } catch (const stem::IoError& e) {
    throw stem::IoError(flag + " '" + path + "': " + e.what());
  }
}

json load_json(const std::string& path, const std::string& flag) {
  auto in = open_in(path, flag);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw stem::IoError(flag + " '" + path + "': " + e.what());
  }
}

struct KernelFlags {
  std::string family = "gaussian";
  std::optional<double> gamma;
  double truncation = 3.0;
  std::string template_file;

  void add_to(CLI::App& sub) {
    sub.add_option("--kernel", family, "Smoothing kernel")
        ->check(CLI::IsMember({"gaussian", "quartic", "template"}))
        ->capture_default_str();
    sub.add_option("--gamma", gamma, "Kernel bandwidth (gaussian, quartic)");
    sub.add_option("--truncation", truncation, "Gaussian kernel support in bandwidths")->capture_default_str();
    sub.add_option("--template-file", template_file, "Template kernel CSV (template)");
  }

  stem::Kernel build(double dt) const {
    if (family == "template") {
      if (template_file.empty()) throw stem::ConfigError("--template-file is required with --kernel template");
      auto in = open_in(template_file, "--template-file");
      stem::Kernel k = stem::read_kernel_csv(in);
      if (!stem::same_spacing(k.dt(), dt))
        throw stem::ConfigError("--template-file: kernel dt " + stem::format_double(k.dt()) +
                                " does not match the series dt " + stem::format_double(dt));
      return k;
    }
    if (!gamma) throw stem::ConfigError("--gamma is required with --kernel " + family);
    try {
      return family == "gaussian" ? stem::gaussian_kernel(*gamma, truncation, dt)
                                  : stem::quartic_kernel(*gamma, dt);
    } catch (const stem::ConfigError& e) {
      throw stem::ConfigError(std::string("--gamma: ") + e.what());
    }
  }
};

int cmd_detect(const CLI::App& sub, const std::string& input, std::optional<double> dt,
               const KernelFlags& kf, const std::string& moments_file, const std::string& calibration,
               const std::string& procedure, double alpha, const std::string& out_json,
               const std::string& out_csv) {
  if (moments_file.empty() == calibration.empty())
    throw stem::ConfigError("pass exactly one of --moments or --calibration");
  if (!(alpha > 0 && alpha < 1)) throw stem::ConfigError("--alpha must lie in (0, 1)");
  const auto raw = load_series(input, "--input", dt);
  const auto kernel = kf.build(raw.dt());

  stem::NoiseMoments moments{};
  if (!moments_file.empty()) {
    moments = stem::moments_from_json(load_json(moments_file, "--moments"));
  } else {
    const auto cal = load_series(calibration, "--calibration", raw.dt());
    moments = stem::estimate_moments(stem::convolve(cal, kernel));
  }

  const auto proc = procedure == "bh" ? stem::Procedure::BH : stem::Procedure::Bonferroni;
  const auto result = stem::stem_detect(raw, kernel, moments, proc, alpha);
  const auto prov = Provenance::of(sub);

  json doc = stem::to_json(result.report);
  doc["provenance"] = prov.to_json();
  doc["moments"] = stem::to_json(moments);
  doc["kernel"] = {{"family", stem::to_string(kernel.family())},
                   {"bandwidth", kernel.bandwidth()},
                   {"size", kernel.size()},
                   {"center", kernel.center()}};
  if (!out_json.empty()) open_out(out_json, "--out-json") << doc.dump(2) << '\n';
  if (!out_csv.empty()) {
    auto out = open_out(out_csv, "--out-csv");
    stem::write_report_csv(out, result.report, prov.comment_lines());
  }

  std::cout << "procedure:        " << stem::to_string(result.report.procedure) << '\n'
            << "local maxima:     " << result.report.m << '\n'
            << "rejections:       " << result.report.rejected.size() << '\n'
            << "p-value cutoff:   " << stem::format_double(result.report.pvalue_cutoff) << '\n'
            << "height threshold: " << stem::format_double(result.report.height_threshold) << '\n';
  return 0;
}

int cmd_estimate_noise(const CLI::App& sub, const std::string& calibration, std::optional<double> dt,
                       const KernelFlags& kf, const std::string& out) {
  const auto cal = load_series(calibration, "--calibration", dt);
  const auto kernel = kf.build(cal.dt());
  const auto m = stem::estimate_moments(stem::convolve(cal, kernel));
  json doc = stem::to_json(m);
  doc["provenance"] = Provenance::of(sub).to_json();
  const std::string text = doc.dump(2) + "\n";
  if (out.empty()) std::cout << text;
  else open_out(out, "--out") << text;
  return 0;
}

int cmd_estimate_template(const CLI::App& sub, const std::string& input, std::optional<double> dt,
                          double threshold, stem::Index window, const std::string& out) {
  const auto training = load_series(input, "--input", dt);
  const auto k = stem::estimate_template(training, threshold, window);
  auto f = open_out(out, "--out");
  f << Provenance::of(sub).comment_lines();
  stem::write_kernel_csv(f, k);
  std::cout << "template: " << k.size() << " weights, center " << k.center() << '\n';
  return 0;
}

int cmd_simulate(const CLI::App& sub, const std::string& preset, const std::string& design_file,
                 std::optional<std::size_t> replications, std::uint64_t seed, unsigned threads,
                 const std::string& moments, const std::string& out, const std::string& figure_dir) {
  if (preset.empty() == design_file.empty()) throw stem::ConfigError("pass exactly one of --preset or --design");
  stem::SimulationDesign d = preset.empty() ? stem::design_from_json(load_json(design_file, "--design"))
                                            : stem::preset_design(preset);
  if (replications) d.replications = *replications;
  d.seed = seed;
  if (!moments.empty()) d.moments = stem::parse_moment_source(moments);

  const auto result = stem::run_sweep(d, threads);
  const auto prov = Provenance::of(sub).comment_lines();
  if (!out.empty()) {
    auto f = open_out(out, "--out");
    f << prov;
    stem::write_sweep_csv(f, result);
  } else {
    std::cout << prov;
    stem::write_sweep_csv(std::cout, result);
  }
  if (!figure_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(figure_dir, ec);
    if (ec) throw stem::IoError("--emit-figure-data: cannot create '" + figure_dir + "'");
    for (const auto& name : stem::write_figure_data(figure_dir, result, d, prov))
      std::cerr << "wrote " << (std::filesystem::path(figure_dir) / name).string() << '\n';
  }
  return 0;
}

int cmd_synthesize(const CLI::App& sub, const std::string& signal_file, const std::string& preset,
                   double dt, double sigma, double nu, std::uint64_t seed, bool noise_only,
                   const std::string& out) {
  if (signal_file.empty() == preset.empty()) throw stem::ConfigError("pass exactly one of --signal or --preset");
  const stem::SignalSpec spec = signal_file.empty() ? stem::preset_design(preset).signal
                                                    : stem::signal_from_json(load_json(signal_file, "--signal"));
  auto mu = stem::synthesize_signal(spec, dt);
  const auto noise = stem::generate_noise({sigma, nu}, 0.0, mu.size(), dt, stem::derive_seed(seed, {0}));
  const auto y = mu.with_values(noise_only ? noise.values() : Eigen::VectorXd(mu.values() + noise.values()));
  auto f = open_out(out, "--out");
  stem::write_series_csv(f, y, Provenance::of(sub).comment_lines());
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Peak detection by smoothing and testing of local maxima"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // detect
  auto* detect = app.add_subcommand("detect", "Detect significant peaks in a series");
  std::string d_input, d_moments, d_calibration, d_procedure = "bh", d_json, d_csv;
  std::optional<double> d_dt;
  double d_alpha = 0;
  KernelFlags d_kernel;
  detect->add_option("--input", d_input, "Series CSV")->required();
  detect->add_option("--dt", d_dt, "Grid spacing (else from '# dt=' header)");
  d_kernel.add_to(*detect);
  detect->add_option("--moments", d_moments, "Noise moments JSON");
  detect->add_option("--calibration", d_calibration, "Pure-noise series used to estimate moments");
  detect->add_option("--procedure", d_procedure, "Multiple-testing correction")
      ->check(CLI::IsMember({"bonferroni", "bh"}))
      ->capture_default_str();
  detect->add_option("--alpha", d_alpha, "Error level")->required();
  detect->add_option("--out-json", d_json, "Detection report JSON");
  detect->add_option("--out-csv", d_csv, "Rejected peaks CSV");

  // estimate-noise
  auto* noise = app.add_subcommand("estimate-noise", "Estimate smoothed-noise moments from a calibration series");
  std::string n_cal, n_out;
  std::optional<double> n_dt;
  KernelFlags n_kernel;
  noise->add_option("--calibration", n_cal, "Pure-noise series CSV")->required();
  noise->add_option("--dt", n_dt, "Grid spacing (else from '# dt=' header)");
  n_kernel.add_to(*noise);
  noise->add_option("--out", n_out, "Moments JSON (default: stdout)");

  // estimate-template
  auto* tmpl = app.add_subcommand("estimate-template", "Average aligned spikes into a template kernel");
  std::string t_input, t_out;
  std::optional<double> t_dt;
  double t_threshold = 0;
  stem::Index t_window = 0;
  tmpl->add_option("--input", t_input, "Training series CSV")->required();
  tmpl->add_option("--dt", t_dt, "Grid spacing (else from '# dt=' header)");
  tmpl->add_option("--threshold", t_threshold, "Minimum spike height")->required();
  tmpl->add_option("--window", t_window, "Template length in samples")->required();
  tmpl->add_option("--out", t_out, "Template CSV")->required();

  // simulate
  auto* sim = app.add_subcommand("simulate", "Run a Monte Carlo sweep");
  std::string s_preset, s_design, s_moments, s_out, s_fig;
  std::optional<std::size_t> s_reps;
  std::uint64_t s_seed = 0;
  unsigned s_threads = 1;
  sim->add_option("--preset", s_preset, "Built-in design")->check(CLI::IsMember(stem::preset_names()));
  sim->add_option("--design", s_design, "Design JSON (schema 1)");
  sim->add_option("--replications", s_reps, "Replications per cell (default: the design's)");
  sim->add_option("--seed", s_seed, "Master seed")->required();
  sim->add_option("--threads", s_threads, "Worker threads")->envname("STEM_THREADS")->capture_default_str();
  sim->add_option("--moments", s_moments, "Override moment source")
      ->check(CLI::IsMember({"closed_form", "empirical", "exact"}));
  sim->add_option("--out", s_out, "Sweep CSV (default: stdout)");
  sim->add_option("--emit-figure-data", s_fig, "Directory for figure-style tables");

  // synthesize
  auto* syn = app.add_subcommand("synthesize", "Write a synthetic signal-plus-noise series");
  std::string y_signal, y_preset, y_out;
  double y_dt = 1, y_sigma = 1, y_nu = 0;
  std::uint64_t y_seed = 0;
  bool y_noise_only = false;
  syn->add_option("--signal", y_signal, "Signal spec JSON");
  syn->add_option("--preset", y_preset, "Use the signal of a built-in design")
      ->check(CLI::IsMember(stem::preset_names()));
  syn->add_option("--dt", y_dt, "Grid spacing")->capture_default_str();
  syn->add_option("--sigma", y_sigma, "Noise sigma")->capture_default_str();
  syn->add_option("--nu", y_nu, "Noise correlation scale")->capture_default_str();
  syn->add_option("--seed", y_seed, "Noise seed")->required();
  syn->add_flag("--noise-only", y_noise_only, "Write the noise without the signal");
  syn->add_option("--out", y_out, "Series CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*detect)
      return cmd_detect(*detect, d_input, d_dt, d_kernel, d_moments, d_calibration, d_procedure, d_alpha,
                        d_json, d_csv);
    if (*noise) return cmd_estimate_noise(*noise, n_cal, n_dt, n_kernel, n_out);
    if (*tmpl) return cmd_estimate_template(*tmpl, t_input, t_dt, t_threshold, t_window, t_out);
    if (*sim) return cmd_simulate(*sim, s_preset, s_design, s_reps, s_seed, s_threads, s_moments, s_out, s_fig);
    if (*syn) return cmd_synthesize(*syn, y_signal, y_preset, y_dt, y_sigma, y_nu, y_seed, y_noise_only, y_out);
  } catch (const stem::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
