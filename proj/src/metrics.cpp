#include "heatsig/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "heatsig/errors.hpp"

namespace heatsig {

namespace {

constexpr double k_neg_inf = -std::numeric_limits<double>::infinity();

double log_sum_exp(std::span<const double> xs) {
    double m = k_neg_inf;
    for (double x : xs) m = std::max(m, x);
    if (!std::isfinite(m)) return m; // all -inf (or a stray +inf)
    double s = 0;
    for (double x : xs) s += std::exp(x - m);
    return m + std::log(s);
}

double mean_of(std::span<const double> xs) {
    double s = 0;
    for (double x : xs) s += x;
    return s / double(xs.size());
}

double sample_var(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean_of(xs);
    double s = 0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / double(xs.size() - 1);
}

} // namespace

double quantile(std::span<const double> xs, double p) {
    if (xs.empty()) throw std::invalid_argument("quantile of empty sample");
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("quantile level outside [0, 1]");
    }
    std::vector<double> v(xs.begin(), xs.end());
    std::sort(v.begin(), v.end());
    const double h = (double(v.size()) - 1.0) * p;
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= v.size()) return v.back();
    return v[lo] + (h - double(lo)) * (v[lo + 1] - v[lo]);
}

IntervalEstimate credible_interval(std::span<const double> draws, double level) {
    if (!(level > 0.0 && level < 1.0)) {
        throw std::invalid_argument("interval level outside (0, 1)");
    }
    const double alpha = (1.0 - level) / 2.0;
    return {quantile(draws, alpha), quantile(draws, 1.0 - alpha), level};
}

bool parameter_significant(std::span<const double> draws, double level) {
    const IntervalEstimate ci = credible_interval(draws, level);
    return ci.lo > 0.0 || ci.hi < 0.0;
}

std::vector<double> acf(std::span<const double> xs, int max_lag) {
    const int n = static_cast<int>(xs.size());
    if (n < 2) throw std::invalid_argument("acf needs at least 2 points");
    if (max_lag < 1) throw std::invalid_argument("max_lag must be >= 1");
    const double m = mean_of(xs);
    double denom = 0;
    for (double x : xs) denom += (x - m) * (x - m);
    std::vector<double> out;
    for (int h = 1; h <= max_lag && h < n; ++h) {
        double s = 0;
        for (int t = 0; t + h < n; ++t) s += (xs[t] - m) * (xs[t + h] - m);
        out.push_back(denom > 0 ? s / denom : 0.0);
    }
    return out;
}

std::vector<double> bayes_r2(const PosteriorSamples& samples,
                             const BuildingDataset& data) {
    std::vector<double> out;
    out.reserve(samples.total_draws());
    for (int c = 0; c < samples.n_chains; ++c) {
        for (int d = 0; d < samples.n_draws; ++d) {
            const MeanSeries ms =
                mean_series(samples.kind, samples.at(c, d), data);
            const double var_mu = sample_var(ms.mu);
            double mean_s2 = 0;
            for (double s : ms.sigma) mean_s2 += s * s;
            mean_s2 /= double(ms.sigma.size());
            const double denom = var_mu + mean_s2;
            out.push_back(denom > 0 ? var_mu / denom : 0.0);
        }
    }
    return out;
}

double lpd(const PosteriorSamples& samples) {
    const int m = samples.total_draws();
    std::vector<double> col(m);
    double total = 0;
    for (int t = 0; t < samples.n_days; ++t) {
        int i = 0;
        for (int c = 0; c < samples.n_chains; ++c) {
            for (int d = 0; d < samples.n_draws; ++d) {
                col[i++] = samples.pointwise(c, d)[t];
            }
        }
        total += log_sum_exp(col) - std::log(double(m));
    }
    return total;
}

LooResult elpd_loo(const PosteriorSamples& samples) {
    const int m = samples.total_draws();
    const int n = samples.n_days;
    LooResult res;
    res.pointwise.resize(n);
    std::vector<double> ll(m), lw(m);
    for (int t = 0; t < n; ++t) {
        int i = 0;
        for (int c = 0; c < samples.n_chains; ++c) {
            for (int d = 0; d < samples.n_draws; ++d) {
                ll[i++] = samples.pointwise(c, d)[t];
            }
        }
        // raw importance weights 1 / p(x_t | theta_m), truncated at
        // mean * sqrt(M)
        for (int j = 0; j < m; ++j) lw[j] = -ll[j];
        const double cap = log_sum_exp(lw) - 0.5 * std::log(double(m));
        for (int j = 0; j < m; ++j) lw[j] = std::min(lw[j], cap);
        const double norm = log_sum_exp(lw);
        double max_w = 0;
        for (int j = 0; j < m; ++j) {
            max_w = std::max(max_w, std::exp(lw[j] - norm));
            lw[j] = lw[j] - norm + ll[j];
        }
        res.max_weight = std::max(res.max_weight, max_w);
        if (max_w > 0.9) res.degenerate_weights = true;
        res.pointwise[t] = log_sum_exp(lw);
    }
    for (double v : res.pointwise) res.elpd += v;
    res.se = std::sqrt(double(n) * sample_var(res.pointwise));
    return res;
}

LooResult exact_loo(ModelKind kind, const BuildingDataset& data,
                    const PriorSet& priors, const SamplerConfig& config) {
    const int n = data.size();
    LooResult res;
    res.pointwise.resize(n);
    SamplerConfig cfg = config;
    for (int t = 0; t < n; ++t) {
        cfg.seed = config.seed + static_cast<std::uint64_t>(t) * 0x9E3779B97F4A7C15ull;
        const PosteriorSamples s = fit(kind, data, priors, cfg, t);
        const int m = s.total_draws();
        std::vector<double> col(m);
        int i = 0;
        for (int c = 0; c < s.n_chains; ++c) {
            for (int d = 0; d < s.n_draws; ++d) col[i++] = s.pointwise(c, d)[t];
        }
        res.pointwise[t] = log_sum_exp(col) - std::log(double(m));
    }
    for (double v : res.pointwise) res.elpd += v;
    res.se = std::sqrt(double(n) * sample_var(res.pointwise));
    return res;
}

std::string_view statistic_name(TestStatistic s) {
    switch (s) {
        case TestStatistic::Mean: return "mean";
        case TestStatistic::Max: return "max";
        case TestStatistic::Lag1Autocorr: return "lag1_autocorr";
        case TestStatistic::WinterShare: return "winter_share";
    }
    throw std::invalid_argument("unknown statistic");
}

double eval_statistic(TestStatistic s, const HeatDemandSeries& demand) {
    const auto& phi = demand.phi();
    switch (s) {
        case TestStatistic::Mean:
            return mean_of(phi);
        case TestStatistic::Max:
            return *std::max_element(phi.begin(), phi.end());
        case TestStatistic::Lag1Autocorr:
            return acf(phi, 1).front();
        case TestStatistic::WinterShare: {
            double winter = 0, total = 0;
            for (int t = 0; t < demand.size(); ++t) {
                const int m = month_of(demand.index().date(t));
                total += phi[t];
                if (m == 12 || m <= 2) winter += phi[t];
            }
            return total != 0 ? winter / total : 0.0;
        }
    }
    throw std::invalid_argument("unknown statistic");
}

double bayes_p_value(const PosteriorSamples& samples,
                     const BuildingDataset& data, TestStatistic s,
                     std::uint64_t seed, int max_replicates) {
    if (max_replicates < 1) {
        throw std::invalid_argument("max_replicates must be >= 1");
    }
    const double observed = eval_statistic(s, data.demand());
    const int total = samples.total_draws();
    const int stride = std::max(1, total / max_replicates);
    std::mt19937_64 rng(seed);
    int used = 0, exceed = 0;
    for (int i = 0; i < total; i += stride) {
        const int c = i / samples.n_draws;
        const int d = i % samples.n_draws;
        const HeatDemandSeries rep =
            simulate(samples.kind, samples.at(c, d), data.weather(), rng);
        ++used;
        if (eval_statistic(s, rep) >= observed) ++exceed;
    }
    return double(exceed) / double(used);
}

std::vector<double> residual_acf(const PosteriorSamples& samples,
                                 const BuildingDataset& data, int max_lag) {
    const int n = data.size();
    std::vector<double> mu_bar(n, 0.0);
    for (int c = 0; c < samples.n_chains; ++c) {
        for (int d = 0; d < samples.n_draws; ++d) {
            const MeanSeries ms =
                mean_series(samples.kind, samples.at(c, d), data);
            for (int t = 0; t < n; ++t) mu_bar[t] += ms.mu[t];
        }
    }
    std::vector<double> r(n);
    for (int t = 0; t < n; ++t) {
        r[t] = data.phi(t) - mu_bar[t] / double(samples.total_draws());
    }
    return acf(r, max_lag);
}

YearlyPredictive yearly_posterior_predictive(const PosteriorSamples& samples,
                                             const WeatherSeries& year,
                                             std::uint64_t seed) {
    YearlyPredictive out;
    out.draws_kwh.reserve(samples.total_draws());
    std::mt19937_64 rng(seed);
    for (int c = 0; c < samples.n_chains; ++c) {
        for (int d = 0; d < samples.n_draws; ++d) {
            const HeatDemandSeries sim =
                simulate(samples.kind, samples.at(c, d), year, rng);
            double total = 0;
            for (double v : sim.phi()) total += v;
            out.draws_kwh.push_back(total * 24.0);
        }
    }
    out.mean_kwh = mean_of(out.draws_kwh);
    out.ci = credible_interval(out.draws_kwh, 0.95);
    return out;
}

namespace {

ParamSummary summarize(const std::vector<std::vector<double>>& chains,
                       double ci_level) {
    std::vector<double> all;
    for (const auto& ch : chains) all.insert(all.end(), ch.begin(), ch.end());
    ParamSummary s;
    s.mean = mean_of(all);
    s.median = quantile(all, 0.5);
    s.sd = std::sqrt(sample_var(all));
    s.ci = credible_interval(all, ci_level);
    s.significant = parameter_significant(all, ci_level);
    s.rhat = split_rhat(chains);
    s.ess = ess(chains);
    return s;
}

} // namespace

FitReport build_fit_report(const PosteriorSamples& samples,
                           const BuildingDataset& data,
                           const ReportOptions& options) {
    FitReport rep;
    rep.building_id = data.demand().building_id();
    rep.model = std::string(model_name(samples.kind));
    rep.n_days = data.size();
    rep.heated_area = data.demand().heated_area();
    rep.seed = options.eval_seed;
    rep.accept_rates = samples.accept_rate;
    rep.param_names = samples.names;

    bool all_ok = true;
    for (int p = 0; p < samples.n_params(); ++p) {
        const ParamSummary s = summarize(samples.chains_of(p), options.ci_level);
        if (!(s.rhat < 1.05)) all_ok = false;
        rep.params[samples.names[p]] = s;
    }
    rep.converged = all_ok;

    if (samples.kind != ModelKind::Es) {
        // long-term coefficient draws, transformed chain by chain
        const std::array<const char*, 4> lt_names = {"UA0_lt", "UA_wind_lt",
                                                     "gA_lt", "Phi_base_lt"};
        std::array<std::vector<std::vector<double>>, 4> lt_chains;
        for (auto& v : lt_chains) {
            v.assign(samples.n_chains, std::vector<double>(samples.n_draws));
        }
        for (int c = 0; c < samples.n_chains; ++c) {
            for (int d = 0; d < samples.n_draws; ++d) {
                const LongTermParameters lt =
                    long_term_transform(samples.at(c, d));
                lt_chains[0][c][d] = lt.ua0_lt;
                lt_chains[1][c][d] = lt.ua_wind_lt;
                lt_chains[2][c][d] = lt.ga_lt;
                lt_chains[3][c][d] = lt.phi_base_lt;
            }
        }
        for (std::size_t i = 0; i < lt_names.size(); ++i) {
            rep.long_term[lt_names[i]] = summarize(lt_chains[i], options.ci_level);
        }
    }

    rep.r2_draws = bayes_r2(samples, data);
    rep.r2_median = quantile(rep.r2_draws, 0.5);
    rep.lpd = lpd(samples);
    const LooResult loo = elpd_loo(samples);
    rep.elpd_loo = loo.elpd;
    rep.elpd_loo_se = loo.se;
    rep.loo_degenerate = loo.degenerate_weights;
    rep.acf = residual_acf(samples, data, options.acf_max_lag);

    for (const TestStatistic s :
         {TestStatistic::Mean, TestStatistic::Max, TestStatistic::Lag1Autocorr,
          TestStatistic::WinterShare}) {
        const std::uint64_t stat_seed =
            options.eval_seed + 1000003ull * (static_cast<int>(s) + 1);
        rep.p_values[std::string(statistic_name(s))] = bayes_p_value(
            samples, data, s, stat_seed, options.p_value_replicates);
    }

    if (options.yearly_weather) {
        const YearlyPredictive yp = yearly_posterior_predictive(
            samples, *options.yearly_weather, options.eval_seed ^ 0xfeedull);
        rep.yearly = YearlySummary{yp.mean_kwh, yp.ci.lo, yp.ci.hi, yp.ci.level};
    }
    return rep;
}

const PopulationSeries* PopulationSummary::find(
    const std::string& model, const std::string& series_name) const {
    const auto it = series.find({model, series_name});
    return it == series.end() ? nullptr : &it->second;
}

PopulationSummary population_summary(const std::vector<FitReport>& reports,
                                     const HistogramSpec& spec) {
    if (spec.bins < 1) throw std::invalid_argument("bins must be >= 1");
    PopulationSummary out;
    for (const FitReport& rep : reports) {
        auto add = [&](const std::string& series, double value) {
            out.series[{rep.model, series}].values.push_back(value);
        };
        for (const auto& [name, s] : rep.params) add(name, s.mean);
        for (const auto& [name, s] : rep.long_term) add(name, s.mean);
        add("r2_median", rep.r2_median);
        add("elpd_loo", rep.elpd_loo);
        if (rep.heated_area) {
            add("hlc_w_per_m2k",
                rep.params.at("UA0").mean * 1000.0 / *rep.heated_area);
        }
    }
    for (auto& [key, series] : out.series) {
        series.median = quantile(series.values, 0.5);
        series.mean = mean_of(series.values);
        double lo = *std::min_element(series.values.begin(), series.values.end());
        double hi = *std::max_element(series.values.begin(), series.values.end());
        if (!(hi > lo)) {
            lo -= 0.5;
            hi += 0.5;
        }
        series.hist.edges.resize(spec.bins + 1);
        for (int b = 0; b <= spec.bins; ++b) {
            series.hist.edges[b] = lo + (hi - lo) * double(b) / double(spec.bins);
        }
        series.hist.counts.assign(spec.bins, 0);
        for (double v : series.values) {
            const int b = std::min(
                spec.bins - 1,
                int(std::floor((v - lo) / (hi - lo) * double(spec.bins))));
            ++series.hist.counts[std::max(0, b)];
        }
    }
    return out;
}

} // namespace heatsig
