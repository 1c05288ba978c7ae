#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "rplab/concentration.hpp"
#include "rplab/experiments.hpp"
#include "rplab/frostman.hpp"
#include "rplab/generators.hpp"
#include "rplab/measure.hpp"

namespace rplab {

using Json = nlohmann::ordered_json;

/// %.17g, enough digits to round-trip a double through decimal.
std::string fmt_g17(double x);

void write_text_file(const std::string& path, const std::string& content);

// Point clouds: header x1,...,x{n+1}[,weight].
void write_measure_csv(const FiniteMeasure& mu, const std::string& path);
FiniteMeasure read_measure_csv(const std::string& path, int expected_n,
                               std::vector<std::string>* warnings = nullptr);

Json certificate_json(const FrostmanCertificate& cert);

Json projection_spec_json(const ProjectionSpec& spec);

Json generator_spec_json(const GeneratorSpec& spec);
GeneratorSpec generator_spec_from_json(const Json& j);

// Profiles: CSV `point_index,m_delta` plus a JSON sidecar with spec/delta/quantiles.
void write_profile_csv(const ConcentrationProfile& prof, const std::string& path);
Json profile_sidecar_json(const ConcentrationProfile& prof);

Json sweep_config_json(const SweepConfig& cfg);
/// Parses sweep parameters from a config object; unknown keys are rejected.
SweepConfig sweep_config_from_json(const Json& j);

Json sweep_report_json(const SweepReport& rep);
std::string sweep_report_csv(const SweepReport& rep);
/// Two-column gnuplot-style text, comment header naming the axes.
std::string sweep_plot_data(const SweepReport& rep);

}  // namespace rplab
