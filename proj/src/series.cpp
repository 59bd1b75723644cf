#include "heatsig/series.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "heatsig/errors.hpp"

namespace heatsig {

namespace {

void check_size(const DateIndex& index, std::size_t n, const char* what) {
    if (n != static_cast<std::size_t>(index.length)) {
        throw std::invalid_argument(std::string(what) +
                                    " length does not match date index");
    }
}

template <typename T>
std::vector<T> slice_vec(const std::vector<T>& v, int offset, int length) {
    return {v.begin() + offset, v.begin() + offset + length};
}

void check_slice(const DateIndex& index, int offset, int length) {
    if (offset < 0 || length < 1 || offset + length > index.length) {
        throw std::invalid_argument("slice out of range");
    }
}

} // namespace

WeatherSeries::WeatherSeries(DateIndex index, std::vector<double> t_ambient,
                             std::vector<double> wind_speed,
                             std::vector<double> irradiance)
    : index_(index),
      t_ambient_(std::move(t_ambient)),
      wind_speed_(std::move(wind_speed)),
      irradiance_(std::move(irradiance)) {
    check_size(index_, t_ambient_.size(), "t_ambient");
    check_size(index_, wind_speed_.size(), "wind_speed");
    check_size(index_, irradiance_.size(), "irradiance");
}

WeatherSeries WeatherSeries::slice(int offset, int length) const {
    check_slice(index_, offset, length);
    return WeatherSeries(DateIndex(index_.date(offset), length),
                         slice_vec(t_ambient_, offset, length),
                         slice_vec(wind_speed_, offset, length),
                         slice_vec(irradiance_, offset, length));
}

HeatDemandSeries::HeatDemandSeries(DateIndex index, std::vector<double> phi,
                                   std::string building_id,
                                   std::optional<double> heated_area)
    : index_(index),
      phi_(std::move(phi)),
      building_id_(std::move(building_id)),
      heated_area_(heated_area) {
    check_size(index_, phi_.size(), "phi");
    if (heated_area_ && !(*heated_area_ > 0)) {
        throw std::invalid_argument("heated_area must be positive");
    }
}

HeatDemandSeries HeatDemandSeries::slice(int offset, int length) const {
    check_slice(index_, offset, length);
    return HeatDemandSeries(DateIndex(index_.date(offset), length),
                            slice_vec(phi_, offset, length), building_id_,
                            heated_area_);
}

BuildingDataset::BuildingDataset(WeatherSeries weather, HeatDemandSeries demand)
    : weather_(std::move(weather)), demand_(std::move(demand)) {
    if (!(weather_.index() == demand_.index())) {
        throw std::invalid_argument(
            "weather and demand must cover the identical date range");
    }
}

BuildingDataset BuildingDataset::slice(int offset, int length) const {
    return BuildingDataset(weather_.slice(offset, length),
                           demand_.slice(offset, length));
}

BuildingDataset align(const WeatherSeries& weather,
                      const HeatDemandSeries& demand) {
    const Day lo = std::max(weather.index().start, demand.index().start);
    const Day hi = std::min(weather.index().last(), demand.index().last());
    const int overlap = int((hi - lo).count()) + 1;
    if (overlap < k_min_overlap_days) {
        throw OverlapTooShort("aligned overlap is " +
                              std::to_string(std::max(overlap, 0)) +
                              " days; need at least " +
                              std::to_string(k_min_overlap_days));
    }
    const int wo = weather.index().offset_of(lo);
    const int dmo = demand.index().offset_of(lo);
    return BuildingDataset(weather.slice(wo, overlap),
                           demand.slice(dmo, overlap));
}

std::vector<Finding> validate(const BuildingDataset& data) {
    std::vector<Finding> findings;
    const int n = data.size();

    auto scan_finite = [&](const std::vector<double>& xs, const char* field) {
        for (int t = 0; t < n; ++t) {
            if (!std::isfinite(xs[t])) {
                findings.push_back({FindingKind::NonFinite, t, field,
                                    std::string(field) + " is not finite on " +
                                        format_date(data.index().date(t))});
            }
        }
    };
    scan_finite(data.demand().phi(), "phi");
    scan_finite(data.weather().t_ambient(), "t_ambient");
    scan_finite(data.weather().wind_speed(), "wind_speed");
    scan_finite(data.weather().irradiance(), "irradiance");

    for (int t = 0; t < n; ++t) {
        const double phi = data.phi(t);
        if (std::isfinite(phi) && phi < 0) {
            findings.push_back({FindingKind::NegativeDemand, t, "phi",
                                "negative demand on " +
                                    format_date(data.index().date(t))});
        }
    }

    auto scan_constant = [&](const std::vector<double>& xs, const char* field) {
        const bool constant =
            std::all_of(xs.begin(), xs.end(),
                        [&](double x) { return x == xs.front(); });
        if (constant && n > 1) {
            findings.push_back({FindingKind::ConstantSeries, -1, field,
                                std::string(field) + " is constant over all " +
                                    std::to_string(n) + " days"});
        }
    };
    scan_constant(data.demand().phi(), "phi");
    scan_constant(data.weather().t_ambient(), "t_ambient");

    return findings;
}

} // namespace heatsig
