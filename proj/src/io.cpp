#include "stem/io.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "stem/simulation.hpp"

namespace stem {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw IoError("not a number: '" + std::string(text) + "'");
  return v;
}

namespace {

std::optional<double> try_parse(std::string_view text) {
  try {
    return parse_double(text);
  } catch (const IoError&) {
    return std::nullopt;
  }
}

} // namespace

SampledSequence read_series_csv(std::istream& in, std::optional<double> dt_flag) {
  std::optional<double> dt_header;
  double t0 = 0;
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line[0] == '#') {
      std::istringstream fields(line.substr(1));
      std::string tok;
      while (fields >> tok) {
        if (tok.rfind("dt=", 0) == 0) dt_header = parse_double(tok.substr(3));
        else if (tok.rfind("t0=", 0) == 0) t0 = parse_double(tok.substr(3));
      }
      continue;
    }
    const std::string field = line.substr(0, line.find(','));
    if (auto v = try_parse(field)) {
      values.push_back(*v);
    } else if (values.empty() && !header_seen) {
      header_seen = true;
    } else {
      throw IoError("line " + std::to_string(line_no) + ": not a number: '" + field + "'");
    }
  }
  if (values.empty()) throw IoError("series file has no values");
  if (dt_flag && dt_header && !same_spacing(*dt_flag, *dt_header))
    throw ConfigError("--dt " + format_double(*dt_flag) + " disagrees with the file header dt=" +
                      format_double(*dt_header));
  const std::optional<double> dt = dt_flag ? dt_flag : dt_header;
  if (!dt) throw ConfigError("series dt unknown: pass --dt or add a '# dt=' header");
  Eigen::VectorXd v = Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Index>(values.size()));
  return SampledSequence(std::move(v), *dt, t0);
}

void write_series_csv(std::ostream& out, const SampledSequence& seq, std::string_view provenance) {
  out << provenance;
  out << "# dt=" << format_double(seq.dt()) << " t0=" << format_double(seq.t0()) << '\n';
  for (Index i = 0; i < seq.size(); ++i) out << format_double(seq[i]) << '\n';
}

json to_json(const NoiseMoments& m) {
  return json{{"sigma2", m.sigma2}, {"lambda2", m.lambda2}, {"lambda4", m.lambda4}};
}

NoiseMoments moments_from_json(const json& j) {
  try {
    NoiseMoments m{j.at("sigma2").get<double>(), j.at("lambda2").get<double>(), j.at("lambda4").get<double>()};
    m.validate();
    return m;
  } catch (const json::exception& e) {
    throw IoError(std::string("moments JSON: ") + e.what());
  }
}

namespace {

json threshold_json(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

} // namespace

json to_json(const DetectionReport& r) {
  json rejected = json::array();
  for (const auto& c : r.rejected)
    rejected.push_back({{"index", c.index}, {"time", c.location}, {"height", c.height},
                        {"pvalue", c.pvalue ? json(*c.pvalue) : json(nullptr)}});
  return json{{"procedure", to_string(r.procedure)},
              {"alpha", r.alpha},
              {"m", r.m},
              {"k", r.k},
              {"pvalue_cutoff", r.pvalue_cutoff},
              {"height_threshold", threshold_json(r.height_threshold)},
              {"rejections", r.rejected.size()},
              {"rejected", std::move(rejected)}};
}

void write_report_csv(std::ostream& out, const DetectionReport& r, std::string_view provenance) {
  out << provenance << "index,time,height,pvalue\n";
  for (const auto& c : r.rejected)
    out << c.index << ',' << format_double(c.location) << ',' << format_double(c.height) << ','
        << (c.pvalue ? format_double(*c.pvalue) : std::string()) << '\n';
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

json shape_json(const PeakShape& shape) {
  json j{{"shape", shape_name(shape)}};
  std::visit(overloaded{
                 [&](const TruncGaussianShape& s) { j["b"] = s.b; j["c"] = s.c; },
                 [&](const EpanechnikovShape& s) { j["halfwidth"] = s.halfwidth; },
                 [&](const TriangularShape& s) { j["halfwidth"] = s.halfwidth; },
                 [&](const LaplaceShape& s) { j["b"] = s.b; j["c"] = s.c; },
                 [&](const CauchyShape& s) { j["b"] = s.b; j["c"] = s.c; },
                 [&](const CustomShape& s) {
                   j["profile"] = std::vector<double>(s.profile.begin(), s.profile.end());
                   j["dt"] = s.dt;
                   j["profile_center"] = s.center;
                 },
             },
             shape);
  return j;
}

PeakShape shape_from_json(const json& j) {
  const auto name = j.at("shape").get<std::string>();
  if (name == "trunc_gaussian") return TruncGaussianShape{j.at("b").get<double>(), j.value("c", 3.0)};
  if (name == "epanechnikov") return EpanechnikovShape{j.at("halfwidth").get<double>()};
  if (name == "triangular") return TriangularShape{j.at("halfwidth").get<double>()};
  if (name == "laplace") return LaplaceShape{j.at("b").get<double>(), j.at("c").get<double>()};
  if (name == "cauchy") return CauchyShape{j.at("b").get<double>(), j.at("c").get<double>()};
  if (name == "custom") {
    const auto p = j.at("profile").get<std::vector<double>>();
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(p.data(), static_cast<Index>(p.size()));
    return make_custom_shape(std::move(v), j.at("dt").get<double>(), j.at("profile_center").get<Index>());
  }
  throw ConfigError("unknown peak shape '" + name + "'");
}

template <class F>
auto json_guard(std::string_view what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ConfigError(std::string(what) + ": " + e.what());
  }
}

} // namespace

json to_json(const SignalSpec& spec) {
  json peaks = json::array();
  for (const auto& p : spec.peaks) {
    json j = shape_json(p.shape);
    j["amplitude"] = p.amplitude;
    j["center"] = p.center;
    peaks.push_back(std::move(j));
  }
  return json{{"domain_length", spec.domain_length}, {"peaks", std::move(peaks)}};
}

SignalSpec signal_from_json(const json& j) {
  return json_guard("signal spec", [&] {
    SignalSpec spec;
    if (j.contains("equal_peaks")) {
      const auto& e = j.at("equal_peaks");
      spec = equal_peaks_signal(j.at("domain_length").get<double>(), e.at("count").get<std::size_t>(),
                                e.at("amplitude").get<double>(), e.at("b").get<double>(), e.value("c", 3.0));
    } else {
      spec.domain_length = j.at("domain_length").get<double>();
      for (const auto& p : j.value("peaks", json::array()))
        spec.peaks.push_back({shape_from_json(p), p.at("amplitude").get<double>(), p.at("center").get<double>()});
    }
    spec.validate();
    return spec;
  });
}

json to_json(const SimulationDesign& d) {
  json procs = json::array();
  for (auto p : d.procedures) procs.push_back(to_string(p));
  return json{{"schema", 1},
              {"name", d.name},
              {"signal", to_json(d.signal)},
              {"dt", d.dt},
              {"noise", {{"sigma", d.noise.sigma}, {"nu", d.noise.nu}}},
              {"kernel", {{"family", to_string(d.kernel)}, {"truncation", d.truncation}}},
              {"gammas", d.gammas},
              {"amplitudes", d.amplitudes},
              {"procedures", std::move(procs)},
              {"alpha", d.alpha},
              {"replications", d.replications},
              {"seed", d.seed},
              {"moments", to_string(d.moments)},
              {"moment_length", d.moment_length},
              {"moment_sequences", d.moment_sequences},
              {"auto_bandwidth", d.auto_bandwidth},
              {"rice_convention", to_string(d.rice)}};
}

SimulationDesign design_from_json(const json& j) {
  return json_guard("design", [&] {
    if (j.value("schema", 0) != 1) throw ConfigError("design file must declare \"schema\": 1");
    SimulationDesign d;
    d.name = j.value("name", std::string("custom"));
    d.signal = signal_from_json(j.at("signal"));
    d.dt = j.value("dt", 1.0);
    if (j.contains("noise"))
      d.noise = {j["noise"].value("sigma", 1.0), j["noise"].value("nu", 0.0)};
    if (j.contains("kernel")) {
      const auto family = j["kernel"].value("family", std::string("gaussian"));
      if (family == "gaussian") d.kernel = KernelFamily::Gaussian;
      else if (family == "quartic") d.kernel = KernelFamily::Quartic;
      else throw ConfigError("design kernel family must be gaussian or quartic");
      d.truncation = j["kernel"].value("truncation", 3.0);
    }
    d.gammas = j.at("gammas").get<std::vector<double>>();
    d.amplitudes = j.value("amplitudes", std::vector<double>{});
    d.procedures.clear();
    for (const auto& p : j.at("procedures")) d.procedures.push_back(parse_procedure(p.get<std::string>()));
    d.alpha = j.at("alpha").get<double>();
    d.replications = j.value("replications", std::size_t{1000});
    d.seed = j.value("seed", std::uint64_t{0});
    d.moments = parse_moment_source(j.value("moments", std::string("closed_form")));
    d.moment_length = j.value("moment_length", Index{1000});
    d.moment_sequences = j.value("moment_sequences", std::size_t{1});
    d.auto_bandwidth = j.value("auto_bandwidth", false);
    d.rice = parse_rice_convention(j.value("rice_convention", std::string("paper")));
    return d;
  });
}

} // namespace stem
