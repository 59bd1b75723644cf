#pragma once

#include <optional>
#include <string>
#include <vector>

#include "heatsig/dates.hpp"

namespace heatsig {

// One day of driving conditions, as consumed by the model equations.
struct WeatherDay {
    double t_ambient;   // degC, daily mean
    double wind_speed;  // m/s, daily mean
    double irradiance;  // W/m2, daily mean global horizontal
};

class WeatherSeries {
public:
    WeatherSeries(DateIndex index,
                  std::vector<double> t_ambient,
                  std::vector<double> wind_speed,
                  std::vector<double> irradiance);

    const DateIndex& index() const { return index_; }
    int size() const { return index_.length; }

    double t_ambient(int t) const { return t_ambient_[t]; }
    double wind_speed(int t) const { return wind_speed_[t]; }
    double irradiance(int t) const { return irradiance_[t]; }
    WeatherDay day(int t) const {
        return {t_ambient_[t], wind_speed_[t], irradiance_[t]};
    }

    const std::vector<double>& t_ambient() const { return t_ambient_; }
    const std::vector<double>& wind_speed() const { return wind_speed_; }
    const std::vector<double>& irradiance() const { return irradiance_; }

    // Subrange [offset, offset+length) as a new series.
    WeatherSeries slice(int offset, int length) const;

private:
    DateIndex index_;
    std::vector<double> t_ambient_;
    std::vector<double> wind_speed_;
    std::vector<double> irradiance_;
};

class HeatDemandSeries {
public:
    HeatDemandSeries(DateIndex index,
                     std::vector<double> phi,
                     std::string building_id = "",
                     std::optional<double> heated_area = std::nullopt);

    const DateIndex& index() const { return index_; }
    int size() const { return index_.length; }

    // Daily mean heat load in kW.
    double phi(int t) const { return phi_[t]; }
    const std::vector<double>& phi() const { return phi_; }

    const std::string& building_id() const { return building_id_; }
    const std::optional<double>& heated_area() const { return heated_area_; }

    HeatDemandSeries slice(int offset, int length) const;

private:
    DateIndex index_;
    std::vector<double> phi_;
    std::string building_id_;
    std::optional<double> heated_area_; // m2, if known
};

// A demand series and the weather over the identical date range.
class BuildingDataset {
public:
    BuildingDataset(WeatherSeries weather, HeatDemandSeries demand);

    const WeatherSeries& weather() const { return weather_; }
    const HeatDemandSeries& demand() const { return demand_; }
    const DateIndex& index() const { return weather_.index(); }
    int size() const { return weather_.size(); }

    WeatherDay weather_day(int t) const { return weather_.day(t); }
    double phi(int t) const { return demand_.phi(t); }

    BuildingDataset slice(int offset, int length) const;

private:
    WeatherSeries weather_;
    HeatDemandSeries demand_;
};

// Shortest overlap accepted for a reported fit.
inline constexpr int k_min_overlap_days = 60;

// Intersects the two date ranges and returns the dataset on the overlap.
// Throws OverlapTooShort if the intersection is shorter than
// k_min_overlap_days (use slices directly for diagnostic work on less).
BuildingDataset align(const WeatherSeries& weather, const HeatDemandSeries& demand);

enum class FindingKind {
    NegativeDemand,
    NonFinite,
    ConstantSeries,
};

struct Finding {
    FindingKind kind;
    int day;           // offset into the dataset, -1 for series-level findings
    std::string field; // "phi", "t_ambient", "wind_speed", "irradiance"
    std::string message;
};

// Screens an aligned dataset for values that will poison a fit.
// Returns an empty vector when the data is usable as-is.
std::vector<Finding> validate(const BuildingDataset& data);

} // namespace heatsig
