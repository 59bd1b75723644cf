#include "heatsig/synth.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "heatsig/errors.hpp"

namespace heatsig {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Snap to a 2^-20 kW grid: the stored load, its kWh total (x24) and the
// CSV decimal round trip are then all exact.
double quantize_load(double x) {
    return std::round(x * 1048576.0) / 1048576.0;
}

double seasonal_phase(Day d) {
    return 2.0 * std::numbers::pi * double(day_of_year(d)) / 365.25;
}

} // namespace

void WeatherConfig::check() const {
    if (n_days < 1) throw std::invalid_argument("n_days must be >= 1");
    if (!(t_amplitude >= 0) || !(t_noise_sd >= 0)) {
        throw std::invalid_argument("temperature spread must be >= 0");
    }
    if (!(wind_mean > 0) || !(wind_shape > 0)) {
        throw std::invalid_argument("wind parameters must be positive");
    }
    if (!(irr_peak >= 0) || !(irr_noise_sd >= 0)) {
        throw std::invalid_argument("irradiance parameters must be >= 0");
    }
    if (!std::isfinite(t_mean)) {
        throw std::invalid_argument("t_mean must be finite");
    }
}

WeatherSeries generate_weather(const WeatherConfig& config) {
    config.check();
    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> unit(0.0, 1.0);
    std::gamma_distribution<double> wind(config.wind_shape,
                                         config.wind_mean / config.wind_shape);
    const int n = config.n_days;
    std::vector<double> ta(n), ws(n), ig(n);
    for (int t = 0; t < n; ++t) {
        const double phase = seasonal_phase(config.start + std::chrono::days{t});
        ta[t] = config.t_mean - config.t_amplitude * std::cos(phase) +
                config.t_noise_sd * unit(rng);
        ws[t] = wind(rng);
        // summer half-wave with a winter floor so midwinter days still see
        // some diffuse light
        const double season = 0.08 + 0.92 * std::max(0.0, -std::cos(phase));
        const double noise = std::exp(config.irr_noise_sd * unit(rng) -
                                      0.5 * config.irr_noise_sd * config.irr_noise_sd);
        ig[t] = config.irr_peak * season * noise;
    }
    return WeatherSeries(DateIndex(config.start, n), std::move(ta),
                         std::move(ws), std::move(ig));
}

SynthBuilding generate_building(ModelKind kind, const ParameterVector& truth,
                                const WeatherSeries& weather,
                                std::uint64_t seed, std::string building_id,
                                std::optional<double> heated_area) {
    const int n = weather.size();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> unit(0.0, 1.0);

    // Same one-step recursion the likelihood assumes, except that the value
    // fed back is what the meter records: clamped at zero and quantized.
    std::vector<double> phi(n);
    std::array<double, k_ma_order> e{};
    const bool ar = kind != ModelKind::Es;
    const bool ma = kind == ModelKind::ArmaxEs;
    int clamped = 0;
    double phi_prev = 0;
    for (int t = 0; t < n; ++t) {
        double dyn = 0;
        if (ar && t > 0) dyn += truth.rho1 * phi_prev;
        if (ma) {
            for (int i = 0; i < k_ma_order; ++i) {
                if (t - 1 - i >= 0) dyn += truth.nu[i] * e[i];
            }
        }
        const double w = winter_regime_mean(truth, weather.day(t)) + dyn;
        const double s = summer_regime_mean(truth) + dyn;
        const double mu = lse_mix(w, s, truth.k_mix);
        const double tau = tau_weight(w, s, truth.k_mix);
        const double sigma = mixed_sigma(tau, truth);
        double x = mu + sigma * unit(rng);
        if (x < 0) {
            x = 0;
            ++clamped;
        }
        x = quantize_load(x);
        phi[t] = x;
        if (ma) {
            for (int i = k_ma_order - 1; i > 0; --i) e[i] = e[i - 1];
            e[0] = x - mu;
        }
        phi_prev = x;
    }
    if (clamped > n / 20) {
        throw ExcessiveClamping(std::to_string(clamped) + " of " +
                                std::to_string(n) +
                                " simulated loads clamped at zero");
    }
    SynthBuilding b{BuildingDataset(weather,
                                    HeatDemandSeries(weather.index(), std::move(phi),
                                                     std::move(building_id),
                                                     heated_area)),
                    truth, kind, clamped};
    return b;
}

void PopulationConfig::check() const {
    if (n_buildings < 1) throw std::invalid_argument("n_buildings must be >= 1");
    weather.check();
    if (heated_area && !(*heated_area > 0)) {
        throw std::invalid_argument("heated_area must be positive");
    }
    for (const auto& name : param_names(kind)) {
        if (param_dists.find(name) == param_dists.end()) {
            throw MissingPrior("population distribution missing for " + name);
        }
    }
}

Portfolio generate_portfolio(const PopulationConfig& config) {
    config.check();
    Portfolio out;
    const auto names = param_names(config.kind);
    std::optional<WeatherSeries> shared;
    if (config.shared_weather) shared = generate_weather(config.weather);

    for (int b = 0; b < config.n_buildings; ++b) {
        std::mt19937_64 rng(splitmix64(config.seed ^ (0xb001ull + b)));
        ParameterVector truth;
        bool ok = false;
        for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
            for (std::size_t i = 0; i < names.size(); ++i) {
                truth.set(config.kind, static_cast<int>(i),
                          config.param_dists.at(names[i]).sample(rng));
            }
            ok = truth.valid(config.kind);
            if (!ok && attempt == 0) {
                out.warnings.push_back("building " + std::to_string(b) +
                                       ": redrawing invalid parameter set");
            }
        }
        if (!ok) {
            throw std::invalid_argument(
                "population distributions produce no valid parameter set");
        }
        WeatherSeries weather = shared ? *shared : [&] {
            WeatherConfig wc = config.weather;
            wc.seed = splitmix64(config.weather.seed ^ (0x77ull + b));
            return generate_weather(wc);
        }();
        char id[16];
        std::snprintf(id, sizeof id, "b%03d", b);
        out.buildings.push_back(
            generate_building(config.kind, truth, weather,
                              splitmix64(config.seed ^ (0x5157ull + b)), id,
                              config.heated_area));
    }
    return out;
}

PopulationConfig default_population(int n_buildings, ModelKind kind) {
    PopulationConfig c;
    c.n_buildings = n_buildings;
    c.kind = kind;
    // 140 m2 dwellings around 1.4 W/m2K whole-house loss
    c.param_dists.emplace("UA0", PriorSpec::gamma_mean_sd(0.196, 0.04));
    c.param_dists.emplace("UA_wind", PriorSpec::gamma_mean_sd(0.01, 0.004));
    c.param_dists.emplace("T_base", PriorSpec::normal(18.0, 1.0));
    c.param_dists.emplace("gA", PriorSpec::gamma_mean_sd(0.004, 0.001));
    c.param_dists.emplace("Phi_base", PriorSpec::gamma_mean_sd(0.35, 0.1));
    c.param_dists.emplace("k", PriorSpec::gamma_mean_sd(5.0, 1.0));
    // the mixed noise pairs tau (the winter weight) with sigma_reduction,
    // so the winter-active level is sigma_reduction and the summer-active
    // one is sigma_winter; sized here so winters are the noisy season
    c.param_dists.emplace("sigma_winter", PriorSpec::gamma_mean_sd(0.08, 0.02));
    c.param_dists.emplace("sigma_reduction",
                          PriorSpec::gamma_mean_sd(0.25, 0.05));
    c.param_dists.emplace("rho1", PriorSpec::normal(0.5, 0.1));
    c.param_dists.emplace("nu1", PriorSpec::normal(0.2, 0.05));
    c.param_dists.emplace("nu2", PriorSpec::normal(0.05, 0.03));
    c.param_dists.emplace("nu3", PriorSpec::normal(0.02, 0.02));
    return c;
}

} // namespace heatsig
