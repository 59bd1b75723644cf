#pragma once

#include <array>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "heatsig/series.hpp"

namespace heatsig {

// Model families, nested left to right:
//   Es      static energy signature
//   ArxEs   + rho1 * (yesterday's observed load) on both regime means
//   ArmaxEs + nu_1..nu_3 on the last three one-step residuals
enum class ModelKind { Es, ArxEs, ArmaxEs };

int param_count(ModelKind kind); // 8 / 9 / 12
std::vector<std::string> param_names(ModelKind kind);
std::string_view model_name(ModelKind kind);        // "es", "arx", "armax"
ModelKind model_from_name(std::string_view name);   // throws std::invalid_argument

inline constexpr int k_ma_order = 3;

// Full parameter set; the fields beyond a family's order are ignored by it
// (rho1 for Es, nu for Es/ArxEs). Canonical order is
//   UA0, UA_wind, T_base, gA, Phi_base, k, sigma_winter, sigma_reduction,
//   rho1, nu1, nu2, nu3.
struct ParameterVector {
    double ua0 = 0;              // kW/K, transmission + infiltration at calm
    double ua_wind = 0;          // kW/K per m/s, wind-driven extra loss
    double t_base = 0;           // degC, balance temperature
    double ga = 0;               // kW per W/m2, effective solar aperture
    double phi_base = 0;         // kW, weather-independent base load
    double k_mix = 0;            // 1/kW, sharpness of the regime switch
    double sigma_winter = 0;     // kW, noise level in the heating regime
    double sigma_reduction = 0;  // kW, noise level in the base regime
    double rho1 = 0;             // AR(1) weight on the lagged observed load
    std::array<double, k_ma_order> nu{0, 0, 0}; // MA weights on residuals

    double get(ModelKind kind, int i) const;
    void set(ModelKind kind, int i, double value);
    std::vector<double> to_array(ModelKind kind) const;
    static ParameterVector from_array(ModelKind kind, std::span<const double> v);

    // Structural validity for inference: positive scales and |rho1| < 1.
    bool valid(ModelKind kind) const;
};

// Heating-season mean load before any dynamic terms:
//   (UA0 + UA_wind * Ws) * (T_base - Ta) - gA * Ig + Phi_base.
double winter_regime_mean(const ParameterVector& p, const WeatherDay& w);

// Base regime: Phi_base alone.
double summer_regime_mean(const ParameterVector& p);

// Smooth maximum, exact as k -> inf:
//   lse_mix(a, b, k) = log(exp(k a) + exp(k b)) / k.
// Evaluated in shifted form so large |k a| never overflows.
double lse_mix(double a, double b, double k);

// Weight of regime a in the smooth maximum,
//   tau = exp(k a) / (exp(k a) + exp(k b)),
// i.e. d lse_mix / d a. tau(a,b,k) + tau(b,a,k) == 1.
double tau_weight(double a, double b, double k);

// Observation noise interpolated between the regime levels:
//   sigma = tau * sigma_reduction + (1 - tau) * sigma_winter.
double mixed_sigma(double tau, const ParameterVector& p);

struct MeanSeries {
    std::vector<double> mu;    // one-step-ahead mean, kW
    std::vector<double> sigma; // observation noise level, kW
    std::vector<double> tau;   // winter-regime weight in [0, 1]
};

// One-step-ahead conditional means given the observed history.
// Dynamic terms enter both regime means before mixing; day 0 has no
// history and uses the static regime means. ArmaxEs residuals are
// e_t = phi_obs_t - mu_t, computed recursively, zero before day 0.
MeanSeries mean_series(ModelKind kind, const ParameterVector& p,
                       const BuildingDataset& data);

struct LogLikelihood {
    double total;
    std::vector<double> pointwise; // per-day contributions, sums to total
};

// Gaussian one-step-ahead log likelihood of the observed demand.
// Non-finite inputs yield -inf rather than NaN.
LogLikelihood log_likelihood(ModelKind kind, const ParameterVector& p,
                             const BuildingDataset& data);

// Draws a demand trajectory from the model along the given weather,
// feeding each simulated value back as the next day's lagged load.
// With both sigmas zero this is the deterministic model trajectory.
HeatDemandSeries simulate(ModelKind kind, const ParameterVector& p,
                          const WeatherSeries& weather, std::mt19937_64& rng,
                          std::string building_id = "sim");

// Steady-state coefficients implied by the AR dynamics. With
// gamma = 1 - rho1, a constant-weather fixed point of the recursion is
// the static signature with UA0, UA_wind, gA, Phi_base scaled by 1/gamma;
// T_base is unchanged. Identity transform when rho1 == 0.
struct LongTermParameters {
    double ua0_lt;
    double ua_wind_lt;
    double t_base_lt;
    double ga_lt;
    double phi_base_lt;
    double gamma; // 1 - rho1
};

// Throws UnstableAR when |rho1| >= 1.
LongTermParameters long_term_transform(const ParameterVector& p);

// Undoes the scaling: returns `rest` with the five signature fields and
// rho1 replaced by the short-term values implied by lt.
ParameterVector long_term_invert(const LongTermParameters& lt,
                                 const ParameterVector& rest);

// Error-correction view of the heating-regime AR recursion. With
// regressors x_t = [1, Ws, -Ta, -Ta*Ws, -Ig] and theta the matching
// short-term coefficients [UA0*T_base, UA_wind*T_base, UA0, UA_wind, gA],
// the recursion phi_t = x_t theta + Phi_base + rho1 phi_{t-1} rearranges to
//   delta phi_t = (delta x_t) theta - gamma * (phi_{t-1} - equilibrium(t-1)),
// where equilibrium(t) = phi_base_lt + x_t theta_lt is the long-term level.
struct EcmForm {
    double gamma;
    double phi_base_lt;
    std::array<double, 5> theta;    // short-term coefficients
    std::array<double, 5> theta_lt; // theta / gamma

    static std::array<double, 5> regressors(const WeatherDay& w);
    // Long-term equilibrium load under fixed weather w.
    double equilibrium(const WeatherDay& w) const;
    // Predicted one-step increment given yesterday's load.
    double delta(const WeatherDay& today, const WeatherDay& yesterday,
                 double phi_prev) const;
};

// Throws UnstableAR when |rho1| >= 1.
EcmForm ecm_form(const ParameterVector& p);

} // namespace heatsig
