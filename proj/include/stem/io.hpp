#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "stem/multiple_testing.hpp"
#include "stem/noise.hpp"
#include "stem/signal.hpp"

namespace stem {

struct SimulationDesign;

/// Shortest decimal that round-trips; "inf" / "-inf" / "nan" otherwise.
std::string format_double(double v);
/// Strict parse of a whole token; throws IoError.
double parse_double(std::string_view text);

/// Series CSV: optional `# dt=<v>` / `# t0=<v>` comment lines, an optional
/// non-numeric header line, then one value per line (first field is used).
/// `dt_flag` and the header must agree when both are present (ConfigError).
SampledSequence read_series_csv(std::istream& in, std::optional<double> dt_flag);
void write_series_csv(std::ostream& out, const SampledSequence& seq, std::string_view provenance);

nlohmann::json to_json(const NoiseMoments& m);
NoiseMoments moments_from_json(const nlohmann::json& j);

/// Infinite height thresholds are written as the strings "inf" / "-inf".
nlohmann::json to_json(const DetectionReport& report);
/// Rejected entries as index,time,height,pvalue.
void write_report_csv(std::ostream& out, const DetectionReport& report, std::string_view provenance);

nlohmann::json to_json(const SignalSpec& spec);
SignalSpec signal_from_json(const nlohmann::json& j);

/// Design files carry `"schema": 1`; any other value is rejected.
nlohmann::json to_json(const SimulationDesign& design);
SimulationDesign design_from_json(const nlohmann::json& j);

} // namespace stem
