#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "heatsig/mcmc.hpp"
#include "heatsig/model.hpp"
#include "heatsig/series.hpp"

namespace heatsig {

// Type-7 (linear interpolation) quantile of an unsorted sample.
double quantile(std::span<const double> xs, double p);

// Equal-tailed credible interval at the given level from raw draws.
struct IntervalEstimate {
    double lo = 0;
    double hi = 0;
    double level = 0;
};
IntervalEstimate credible_interval(std::span<const double> draws, double level);

// A parameter is significant when its equal-tailed interval excludes zero;
// zero on either endpoint counts as not significant.
bool parameter_significant(std::span<const double> draws, double level = 0.95);

// Autocorrelation with the raw-sum normalization
//   acf(h) = sum_t (x_t - xbar)(x_{t+h} - xbar) / sum_t (x_t - xbar)^2.
// Returns lags 1..max_lag (shorter if the series runs out).
std::vector<double> acf(std::span<const double> xs, int max_lag);

// Per-draw explained-variance ratio
//   R2_m = Var_t(mu_t) / (Var_t(mu_t) + mean_t(sigma_t^2)),
// with the sample variance over days. Always in [0, 1].
std::vector<double> bayes_r2(const PosteriorSamples& samples,
                             const BuildingDataset& data);

// In-sample log pointwise predictive density,
//   sum_i log mean_m p(x_i | theta_m).
double lpd(const PosteriorSamples& samples);

struct LooResult {
    double elpd = 0;
    double se = 0;
    std::vector<double> pointwise;
    bool degenerate_weights = false; // some point leans on a single draw
    double max_weight = 0;           // largest normalized weight seen
};

// Leave-one-out expected log predictive density by importance sampling
// with truncated weights: raw log weights -log p(x_i | theta_m) are capped
// at log(mean weight) + log(sqrt(M)) before normalization. Flags
// degenerate_weights when any point's largest normalized weight
// exceeds 0.9.
LooResult elpd_loo(const PosteriorSamples& samples);

// Brute-force oracle: refits with day i left out, for every i, and scores
// each held-out day by its posterior predictive density. Exact but costs
// n_days full fits; intended for small n or cross-checks.
LooResult exact_loo(ModelKind kind, const BuildingDataset& data,
                    const PriorSet& priors, const SamplerConfig& config);

enum class TestStatistic { Mean, Max, Lag1Autocorr, WinterShare };
std::string_view statistic_name(TestStatistic s);

// WinterShare is the December-February fraction of total demand.
double eval_statistic(TestStatistic s, const HeatDemandSeries& demand);

// Posterior predictive p-value: the fraction of replicate datasets, one
// simulated per posterior draw (capped at max_replicates, evenly strided),
// whose statistic is >= the observed one.
double bayes_p_value(const PosteriorSamples& samples,
                     const BuildingDataset& data, TestStatistic s,
                     std::uint64_t seed, int max_replicates = 1000);

// Autocorrelation of the residuals against the posterior-mean one-step
// predictions, r_t = phi_t - mean_m(mu_t). Lags 1..max_lag.
std::vector<double> residual_acf(const PosteriorSamples& samples,
                                 const BuildingDataset& data, int max_lag = 20);

struct YearlyPredictive {
    double mean_kwh = 0;
    IntervalEstimate ci;              // central interval of the draws
    std::vector<double> draws_kwh;    // one simulated annual total per draw
};

// Annual consumption distribution: simulates the model over the given
// weather year once per kept draw and totals kWh (kW-days * 24).
YearlyPredictive yearly_posterior_predictive(const PosteriorSamples& samples,
                                             const WeatherSeries& year,
                                             std::uint64_t seed);

struct ParamSummary {
    double mean = 0;
    double median = 0;
    double sd = 0;
    IntervalEstimate ci;
    bool significant = false;
    double rhat = 0;
    double ess = 0;
};

struct YearlySummary {
    double mean_kwh = 0;
    double lo_kwh = 0;
    double hi_kwh = 0;
    double level = 0;
};

struct FitReport {
    std::string building_id;
    std::string model;
    int n_days = 0;
    std::optional<double> heated_area;
    std::uint64_t seed = 0;
    bool converged = false;
    std::vector<double> accept_rates;
    std::vector<std::string> param_names;
    std::map<std::string, ParamSummary> params;
    // Long-term (steady-state) coefficients for the AR families:
    // UA0_lt, UA_wind_lt, gA_lt, Phi_base_lt. Empty for Es.
    std::map<std::string, ParamSummary> long_term;
    double r2_median = 0;
    std::vector<double> r2_draws;
    double lpd = 0;
    double elpd_loo = 0;
    double elpd_loo_se = 0;
    bool loo_degenerate = false;
    std::vector<double> acf; // residual acf, lags 1..max_lag
    std::map<std::string, double> p_values;
    std::optional<YearlySummary> yearly;
};

struct ReportOptions {
    double ci_level = 0.95;
    int acf_max_lag = 20;
    int p_value_replicates = 1000;
    std::uint64_t eval_seed = 0; // replicate / yearly simulation stream
    std::optional<WeatherSeries> yearly_weather;
};

FitReport build_fit_report(const PosteriorSamples& samples,
                           const BuildingDataset& data,
                           const ReportOptions& options = {});

struct Histogram {
    std::vector<double> edges;  // bins + 1, linear
    std::vector<int> counts;    // size bins
};

struct HistogramSpec {
    int bins = 30;
};

struct PopulationSeries {
    std::vector<double> values; // one per building, report order
    double median = 0;
    double mean = 0;
    Histogram hist;
};

// Cross-building summaries keyed by (model, series). Series are the
// posterior-mean parameters by name, long-term coefficients where present,
// "r2_median" and "elpd_loo", plus "hlc_w_per_m2k" (UA0 scaled to W/K per
// m2 of heated area) when the area is known.
struct PopulationSummary {
    std::map<std::pair<std::string, std::string>, PopulationSeries> series;

    const PopulationSeries* find(const std::string& model,
                                 const std::string& series_name) const;
};

PopulationSummary population_summary(const std::vector<FitReport>& reports,
                                     const HistogramSpec& spec = {});

} // namespace heatsig
