#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "heatsig/model.hpp"
#include "heatsig/priors.hpp"
#include "heatsig/series.hpp"

namespace heatsig {

// Sinusoidal-seasonal weather generator with Danish-coast defaults.
//   temperature  mean - amplitude * cos(2 pi doy / 365.25) + noise
//   wind         Gamma(shape, shape / mean), iid
//   irradiance   peak * seasonal half-wave * lognormal multiplier
struct WeatherConfig {
    int n_days = 365;
    Day start = Day{std::chrono::days{17532}}; // 2018-01-01
    double t_mean = 8.5;        // degC annual mean
    double t_amplitude = 8.0;   // degC seasonal swing
    double t_noise_sd = 3.0;    // degC day-to-day
    double wind_mean = 4.5;     // m/s
    double wind_shape = 2.5;    // Gamma shape
    double irr_peak = 260.0;    // W/m2 midsummer daily mean
    double irr_noise_sd = 0.4;  // lognormal sigma of the multiplier
    std::uint64_t seed = 0;

    void check() const; // std::invalid_argument on nonsense
};

WeatherSeries generate_weather(const WeatherConfig& config);

struct SynthBuilding {
    BuildingDataset data;
    ParameterVector truth;
    ModelKind kind;
    int clamped_days = 0; // negative simulated loads set to zero
};

// Simulates demand from the model along the given weather. Negative values
// are clamped at zero; more than 5% clamped throws ExcessiveClamping.
// Loads are snapped to a 2^-20 kW grid so daily kWh totals survive a CSV
// round trip bit-exactly.
SynthBuilding generate_building(ModelKind kind, const ParameterVector& truth,
                                const WeatherSeries& weather,
                                std::uint64_t seed,
                                std::string building_id = "synth-0",
                                std::optional<double> heated_area = std::nullopt);

// Population generator: each building's parameters are drawn from
// param_dists (keyed like priors; every parameter of `kind` needs an
// entry), then its demand is simulated.
struct PopulationConfig {
    int n_buildings = 1;
    ModelKind kind = ModelKind::Es;
    std::map<std::string, PriorSpec> param_dists;
    WeatherConfig weather;          // shared across buildings
    bool shared_weather = true;     // false: fresh weather seed per building
    std::optional<double> heated_area = 140.0; // m2, applied to every building
    std::uint64_t seed = 0;

    void check() const;
};

struct Portfolio {
    std::vector<SynthBuilding> buildings;
    std::vector<std::string> warnings; // e.g. redrawn parameter sets
};

Portfolio generate_portfolio(const PopulationConfig& config);

// Defaults echoing a small Danish single-family stock: per-area heat loss
// around 1.4 W/m2K at 140 m2, base temperature near 18 degC.
PopulationConfig default_population(int n_buildings, ModelKind kind);

} // namespace heatsig
