// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "stem/io.hpp"
#include "stem/maxima.hpp"
#include "stem/multiple_testing.hpp"
#include "stem/palm.hpp"
#include "stem/rng.hpp"
#include "stem/simulation.hpp"

#ifndef STEM_CLI_PATH
#error "STEM_CLI_PATH must point at the stem executable"
#endif

using namespace stem;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 20240611;

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void run(int number, const std::string& title, const std::function<void(Verdict&)>& body) {
  const auto start = std::chrono::steady_clock::now();
  Verdict v;
  try {
    body(v);
  } catch (const std::exception& e) {
    v.pass = false;
    v.detail << " [exception: " << e.what() << "]";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!v.pass) ++failures;
  std::printf("criterion %2d: %s  %s (%.1fs)%s\n", number, v.pass ? "PASS" : "FAIL", title.c_str(), secs,
              v.detail.str().c_str());
  std::fflush(stdout);
}

std::string fmt(double x, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

// ---- criteria 1 and 2 ------------------------------------------------------

double ks_palm(double gamma) {
  const double dt = 0.2;
  const auto n = static_cast<Index>(1e6 / dt);
  const auto z = generate_noise({1.0, 0.0}, gamma, n, dt, derive_seed(kSeed, {1, static_cast<std::uint64_t>(gamma)}));
  std::vector<double> heights;
  for (Index i : local_maximum_indices(z.values(), 0, z.size())) heights.push_back(z[i]);
  std::sort(heights.begin(), heights.end());
  const PalmParams palm(closed_form_moments({1.0, 0.0}, gamma));
  const double m = static_cast<double>(heights.size());
  double ks = 0;
  for (std::size_t i = 0; i < heights.size(); ++i) {
    const double cdf = 1 - palm_survival(palm, heights[i]);
    ks = std::max({ks, std::abs(cdf - static_cast<double>(i) / m), std::abs(cdf - static_cast<double>(i + 1) / m)});
  }
  return ks;
}

// ---- sweeps ----------------------------------------------------------------

SimulationDesign equal_peaks_design(std::vector<double> gammas, std::vector<double> amplitudes,
                                    std::vector<Procedure> procedures) {
  SimulationDesign d = preset_design("sim31");
  d.name = "acceptance";
  d.gammas = std::move(gammas);
  d.amplitudes = std::move(amplitudes);
  d.procedures = std::move(procedures);
  d.replications = 2000;
  d.seed = kSeed;
  return d;
}

bool within_error(const Estimate& e, double nominal = 0.05) { return e.value <= nominal + 3 * e.se; }

Estimate error_of(const SweepCell& c) {
  return c.procedure == Procedure::BH || c.procedure == Procedure::PointwiseBH ? c.counts.fdr() : c.counts.fwer();
}

// ---- criterion 9 -----------------------------------------------------------

// Largest i with #{p < i alpha / m} >= i, by direct count for every i.
std::vector<std::size_t> brute_force_bh(const std::vector<double>& p, double alpha) {
  const std::size_t m = p.size();
  std::size_t best = 0;
  for (std::size_t i = 1; i <= m; ++i) {
    const double cut = static_cast<double>(i) * alpha / static_cast<double>(m);
    const auto below = static_cast<std::size_t>(std::count_if(p.begin(), p.end(), [&](double x) { return x < cut; }));
    if (below >= i) best = i;
  }
  std::vector<std::size_t> out;
  if (best == 0) return out;
  const double cut = static_cast<double>(best) * alpha / static_cast<double>(m);
  for (std::size_t j = 0; j < m; ++j)
    if (p[j] < cut) out.push_back(j);
  return out;
}

std::vector<std::size_t> brute_force_bonferroni(const std::vector<double>& p, double alpha) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < p.size(); ++j)
    if (p[j] < alpha / static_cast<double>(p.size())) out.push_back(j);
  return out;
}

std::vector<std::size_t> rejected_indices(const DetectionReport& r) {
  std::vector<std::size_t> out;
  for (const auto& c : r.rejected) out.push_back(static_cast<std::size_t>(c.index));
  return out;
}

// ---- criterion 10 ----------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int sh(const std::string& cmd) {
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

// Runs every CLI command into `dir`; the thread count only reaches simulate.
void cli_round(const fs::path& dir, unsigned threads) {
  fs::create_directories(dir);
  const std::string cli = STEM_CLI_PATH;
  // Relative paths inside `dir` keep the recorded command lines identical.
  const std::vector<std::string> cmds = {
      cli + " synthesize --preset sim31 --dt 1 --seed 5 --out series.csv",
      cli + " synthesize --preset sim31 --dt 1 --seed 6 --noise-only --out noise.csv",
      cli + " estimate-noise --calibration noise.csv --kernel gaussian --gamma 3 --out moments.json",
      cli + " detect --input series.csv --kernel gaussian --gamma 3 --moments moments.json --procedure bh"
            " --alpha 0.05 --out-json report.json --out-csv report.csv",
      cli + " estimate-template --input series.csv --threshold 2.5 --window 20 --out template.csv",
      cli + " simulate --preset sim34 --replications 100 --seed 7 --threads " + std::to_string(threads) +
          " --out sweep.csv --emit-figure-data fig",
      cli + " simulate --preset sim35 --replications 50 --seed 7 --threads " + std::to_string(threads) +
          " --out auto.csv --emit-figure-data fig",
  };
  for (const auto& c : cmds)
    if (sh("cd '" + dir.string() + "' && " + c + " > /dev/null 2>&1") != 0) throw std::runtime_error("command failed: " + c);
}

std::vector<std::string> compare_dirs(const fs::path& a, const fs::path& b) {
  std::vector<std::string> diffs;
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    ++files;
    const auto rel = fs::relative(e.path(), a);
    if (!fs::exists(b / rel) || slurp(e.path()) != slurp(b / rel)) diffs.push_back(rel.string());
  }
  if (files == 0) diffs.push_back("<no outputs>");
  return diffs;
}

} // namespace

int main() {
  std::printf("acceptance suite (seed %llu)\n", static_cast<unsigned long long>(kSeed));

  run(1, "Palm height distribution matches local maxima of generated noise", [](Verdict& v) {
    const PalmParams palm(closed_form_moments({1.0, 0.0}, 3.0));
    const double f0 = palm_survival(palm, 0.0);
    const double expected = 0.5 + 1 / (2 * std::sqrt(3.0));
    v.detail << " F(0)=" << fmt(f0, 12);
    v.require(std::abs(f0 - expected) < 1e-9, "F(0) analytic value");
    for (double gamma : {1.0, 3.0}) {
      const double ks = ks_palm(gamma);
      v.detail << " KS(gamma=" << gamma << ")=" << fmt(ks);
      v.require(ks < 0.01, "KS < 0.01");
    }
  });

  run(2, "expected local maxima density", [](Verdict& v) {
    const double dt = 0.2, length = 1e5;
    for (double gamma : {1.0, 3.0}) {
      const auto z = generate_noise({1.0, 0.0}, gamma, static_cast<Index>(length / dt), dt,
                                    derive_seed(kSeed, {2, static_cast<std::uint64_t>(gamma)}));
      const double count = static_cast<double>(local_maximum_indices(z.values(), 0, z.size()).size());
      const double observed = count / (static_cast<double>(z.size() - 1) * dt);
      const double expected = expected_maxima_density(closed_form_moments({1.0, 0.0}, gamma));
      const double rel = std::abs(observed / expected - 1);
      v.detail << " gamma=" << gamma << ": " << fmt(observed, 5) << " vs " << fmt(expected, 5);
      v.require(rel < 0.02, "within 2%");
    }
  });

  // One equal-peaks sweep over gamma 1..8 at a = 15 serves criteria 3, 5 and 6.
  std::vector<double> grid{1, 2, 3, 4, 5, 6, 7, 8};
  std::optional<SweepResult> gamma_sweep;
  auto gamma_result = [&]() -> const SweepResult& {
    if (!gamma_sweep)
      gamma_sweep = run_sweep(equal_peaks_design(grid, {15}, {Procedure::Bonferroni, Procedure::BH}), 1);
    return *gamma_sweep;
  };

  run(3, "FWER (Bonferroni) and FDR (BH) at most 0.05 on the equal-peaks design", [&](Verdict& v) {
    const auto& r = gamma_result();
    for (double g : {2.0, 3.0, 4.0, 6.0}) {
      const auto fwer = r.cell(15.0, g, Procedure::Bonferroni).counts.fwer();
      const auto fdr = r.cell(15.0, g, Procedure::BH).counts.fdr();
      v.detail << " g=" << g << ": FWER " << fmt(fwer.value) << "+-" << fmt(fwer.se) << ", FDR " << fmt(fdr.value)
               << "+-" << fmt(fdr.se) << ";";
      v.require(within_error(fwer), "FWER at gamma " + fmt(g, 0));
      v.require(within_error(fdr), "FDR at gamma " + fmt(g, 0));
    }
  });

  run(4, "power ordering BH >= Bonferroni, increasing in amplitude", [](Verdict& v) {
    const auto r = run_sweep(equal_peaks_design({3}, {9, 12, 15}, {Procedure::Bonferroni, Procedure::BH}), 1);
    double previous_bon = -1, previous_bh = -1;
    for (double a : {9.0, 12.0, 15.0}) {
      const auto bon = r.cell(a, 3.0, Procedure::Bonferroni).counts.power();
      const auto bh = r.cell(a, 3.0, Procedure::BH).counts.power();
      v.detail << " a=" << a << ": Bon " << fmt(bon.value) << ", BH " << fmt(bh.value) << ";";
      v.require(bh.value >= bon.value - 2 * std::hypot(bh.se, bon.se), "BH >= Bonferroni at a=" + fmt(a, 0));
      v.require(bon.value > previous_bon && bh.value > previous_bh, "power increasing at a=" + fmt(a, 0));
      previous_bon = bon.value;
      previous_bh = bh.value;
    }
    v.require(previous_bh >= 0.9, "BH power at a=15 >= 0.9");
  });

  run(5, "empirical power peaks at a bandwidth in [3, 6]", [&](Verdict& v) {
    const auto& r = gamma_result();
    for (Procedure p : {Procedure::Bonferroni, Procedure::BH}) {
      double best = -1, arg = 0;
      for (double g : grid) {
        const double pw = r.cell(15.0, g, p).counts.power().value;
        if (pw > best) best = pw, arg = g;
      }
      v.detail << ' ' << to_string(p) << " argmax gamma=" << arg << " (power " << fmt(best) << ")";
      v.require(arg >= 3 && arg <= 6, std::string(to_string(p)) + " argmax in [3, 6]");
    }
  });

  run(6, "one local maximum per true peak for gamma >= 3", [&](Verdict& v) {
    const auto& r = gamma_result();
    for (double g : grid) {
      if (g < 3) continue;
      const double mpp = r.cell(15.0, g, Procedure::Bonferroni).counts.maxima_per_peak().value;
      v.detail << " g=" << g << ":" << fmt(mpp, 3);
      v.require(std::abs(mpp - 1) <= 0.05, "maxima per peak at gamma " + fmt(g, 0));
    }
  });

  run(7, "unequal peaks with the quartic kernel", [](Verdict& v) {
    SimulationDesign d = preset_design("sim32");
    d.replications = 2000;
    d.seed = kSeed;
    const auto r = run_sweep(d, 1);
    for (Procedure p : {Procedure::Bonferroni, Procedure::BH}) {
      double best = -1, arg = 0;
      for (double g : d.gammas) {
        const auto& c = r.cell(std::nullopt, g, p);
        v.require(within_error(error_of(c)), std::string(to_string(p)) + " error at gamma " + fmt(g, 0));
        const double pw = c.counts.power().value;
        if (pw > best) best = pw, arg = g;
      }
      const double target = p == Procedure::Bonferroni ? 0.81 : 0.88;
      v.detail << ' ' << to_string(p) << ": max power " << fmt(best, 3) << " at gamma " << arg << ';';
      v.require(arg == 18, std::string(to_string(p)) + " argmax at 18");
      v.require(std::abs(best - target) <= 0.05, std::string(to_string(p)) + " max power near " + fmt(target, 2));
    }
  });

  run(8, "baseline ordering and pointwise BH peak-level FDR", [](Verdict& v) {
    SimulationDesign d = preset_design("sim34");
    d.amplitudes = {15};
    d.replications = 2000;
    d.seed = kSeed;
    const auto r = run_sweep(d, 1);
    const auto stem_bon = r.cell(15.0, 3.0, Procedure::Bonferroni).counts.power();
    const auto sup = r.cell(15.0, 3.0, Procedure::Supremum).counts.power();
    const auto pw_bon = r.cell(15.0, 3.0, Procedure::PointwiseBonferroni).counts.power();
    v.detail << " power: STEM-Bon " << fmt(stem_bon.value) << ", supremum " << fmt(sup.value) << ", pointwise-Bon "
             << fmt(pw_bon.value) << ';';
    v.require(stem_bon.value + 2 * std::hypot(stem_bon.se, sup.se) > sup.value, "STEM-Bonferroni > supremum");
    v.require(sup.value + 2 * std::hypot(sup.se, pw_bon.se) >= pw_bon.value, "supremum >= pointwise Bonferroni");
    bool exceeded = false;
    double worst = 0;
    for (double g : d.gammas) {
      const auto fdr = r.cell(15.0, g, Procedure::PointwiseBH).counts.fdr();
      worst = std::max(worst, fdr.value);
      exceeded |= fdr.value > 0.05 + 3 * fdr.se;
    }
    v.detail << " max pointwise-BH peak FDR " << fmt(worst);
    v.require(exceeded, "pointwise BH FDR exceeds 0.05 by 3 s.e. somewhere");
  });

  run(9, "BH / Bonferroni against brute force; u_Bon > u_BH", [](Verdict& v) {
    Engine eng = make_engine(derive_seed(kSeed, {9}));
    std::uniform_int_distribution<int> size(1, 50);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::uniform_int_distribution<int> style(0, 2);
    const NoiseMoments m = closed_form_moments({1.0, 0.0}, 3.0);
    const PalmParams palm(m);
    std::size_t mismatches = 0;
    for (int trial = 0; trial < 10000; ++trial) {
      const int n = size(eng);
      const double alpha = std::array{0.01, 0.05, 0.1, 0.2}[static_cast<std::size_t>(trial % 4)];
      std::vector<Candidate> cs;
      std::vector<double> p;
      const int s = style(eng);
      for (int i = 0; i < n; ++i) {
        // Mix of uniform nulls, strong signals and near-threshold ties.
        double x = unif(eng);
        if (s == 1 && unif(eng) < 0.3) x *= 1e-3;
        if (s == 2) x = std::ceil(x * 20) / 20 * alpha;
        x = std::max(x, 1e-300);
        p.push_back(x);
        cs.push_back({i, static_cast<double>(i), 1.0, x});
      }
      const CandidateSet set(cs);
      if (rejected_indices(benjamini_hochberg(set, alpha, palm)) != brute_force_bh(p, alpha)) ++mismatches;
      if (rejected_indices(bonferroni(set, alpha, palm)) != brute_force_bonferroni(p, alpha)) ++mismatches;
    }
    v.detail << " mismatches " << mismatches << " / 20000;";
    v.require(mismatches == 0, "step-up matches enumeration");

    std::size_t checked = 0, violations = 0;
    for (double gamma : {1.0, 2.0, 3.0, 5.0, 8.0})
      for (double nu : {0.0, 1.0, 2.0}) {
        const NoiseMoments mom = closed_form_moments({1.0, nu}, gamma);
        const PalmParams pp(mom);
        for (double alpha : {0.01, 0.05, 0.1, 0.2})
          for (double length : {100.0, 1000.0, 10000.0})
            for (double peaks : {1.0, 5.0, 10.0}) {
              const double a1 = peaks / length;
              const auto thr = asymptotic_thresholds(alpha, a1, expected_maxima_density(mom), pp);
              ++checked;
              if (!(thr.u_bon(length) > thr.u_bh)) ++violations;
            }
      }
    v.detail << " threshold grid " << checked << " points, " << violations << " violations";
    v.require(violations == 0, "u_Bon > u_BH on the grid");
  });

  run(10, "CLI outputs byte-identical across runs and thread counts", [](Verdict& v) {
    const fs::path base = fs::temp_directory_path() / ("stem_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(base);
    cli_round(base / "run1", 1);
    cli_round(base / "run2", 1);
    cli_round(base / "run4", 4);
    auto d12 = compare_dirs(base / "run1", base / "run2");
    auto d14 = compare_dirs(base / "run1", base / "run4");
    std::size_t files = 0;
    for (const auto& e : fs::recursive_directory_iterator(base / "run1")) files += e.is_regular_file();
    v.detail << ' ' << files << " files compared";
    for (const auto& f : d12) v.require(false, "run1 vs run2 differ: " + f);
    for (const auto& f : d14) v.require(false, "threads 1 vs 4 differ: " + f);
    fs::remove_all(base);
  });

  std::printf("%s: %d criterion(s) failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
