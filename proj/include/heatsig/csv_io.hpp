#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "heatsig/mcmc.hpp"
#include "heatsig/metrics.hpp"
#include "heatsig/series.hpp"

namespace heatsig {

// Meter files carry daily energy totals:
//   date,heat_kwh
// Values are converted to mean kW (kWh / 24) on ingestion. Strictness:
// exact header (SchemaError), strictly increasing dates (OrderError),
// contiguous dates (GapInSeries), kWh >= 0 (RangeError), everything else
// malformed is a ParseError with its 1-based line number.
HeatDemandSeries read_meter_csv(std::istream& in, std::string building_id,
                                std::optional<double> heated_area = std::nullopt);
HeatDemandSeries read_meter_csv(const std::filesystem::path& path,
                                std::optional<double> heated_area = std::nullopt);

// Weather files:
//   date,t_ambient_c,wind_ms,irradiance_wm2
// Same date rules; wind and irradiance must be >= 0, temperature is only
// required to be finite.
WeatherSeries read_weather_csv(std::istream& in);
WeatherSeries read_weather_csv(const std::filesystem::path& path);

// Writers emit exactly the formats the readers accept. Numbers use the
// shortest representation that round-trips, so write/read/write is
// byte-stable.
void write_meter_csv(std::ostream& out, const HeatDemandSeries& demand);
void write_weather_csv(std::ostream& out, const WeatherSeries& weather);

// Draw dump: header "chain,<param names...>", one row per kept draw.
void write_draws_csv(std::ostream& out, const PosteriorSamples& samples);

// lag,value rows for a residual acf.
void write_acf_csv(std::ostream& out, const std::vector<double>& acf_values);

// draw,value rows for per-draw R2.
void write_r2_csv(std::ostream& out, const std::vector<double>& r2_draws);

// Population summary exports: one long-format value table and one
// histogram table.
void write_population_csv(std::ostream& out, const PopulationSummary& summary);
void write_population_hist_csv(std::ostream& out, const PopulationSummary& summary);

// Shortest round-trip decimal formatting used by all writers.
std::string format_double(double x);

} // namespace heatsig
