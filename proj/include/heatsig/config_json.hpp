#pragma once

#include <filesystem>
#include <string>

#include "heatsig/metrics.hpp"
#include "heatsig/model.hpp"
#include "heatsig/priors.hpp"
#include "heatsig/synth.hpp"

namespace heatsig {

// Priors file: an object keyed by parameter name,
//   {"UA0": {"family": "gamma", "a": 4.75, "b": 0.3, "param": "mean_sd"},
//    "T_base": {"family": "normal", "a": 18, "b": 1.2}}
// "param" is gamma-only and defaults to "mean_sd". Unknown keys are
// rejected. Loaded entries override the defaults they are merged onto.
PriorSet read_priors_json(const std::string& text);
PriorSet load_priors(const std::filesystem::path& path);
std::string priors_to_json(const PriorSet& priors);

// Ground-truth parameter sets for simulation:
//   {"model": "arx", "params": {"UA0": 0.25, ...}, "heated_area": 140}
struct TruthSpec {
    ModelKind kind = ModelKind::Es;
    ParameterVector params;
    std::optional<double> heated_area;
};
TruthSpec read_truth_json(const std::string& text);
TruthSpec load_truth(const std::filesystem::path& path);
std::string truth_to_json(const TruthSpec& truth);

// Population file for the portfolio generator: WeatherConfig fields plus
//   {"n_buildings": 50, "model": "arx", "heated_area": 140,
//    "param_dists": {<priors-file schema>}, "weather": {...}, "seed": 1}
PopulationConfig read_population_json(const std::string& text);
PopulationConfig load_population(const std::filesystem::path& path);
std::string population_to_json(const PopulationConfig& config);

// Fit report, schema-stable and key-sorted; numbers round-trip exactly.
std::string report_to_json(const FitReport& report);
FitReport read_report_json(const std::string& text);
FitReport load_report(const std::filesystem::path& path);

// Atomic-ish write: temp file in the target directory, then rename.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

} // namespace heatsig
