#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "heatsig/mcmc.hpp"
#include "heatsig/metrics.hpp"
#include "heatsig/model.hpp"
#include "heatsig/priors.hpp"
#include "heatsig/series.hpp"

using namespace heatsig;

namespace {

const Day k_jan1_2018 = Day{std::chrono::days{17532}};

// hand-built posterior container: one draw per entry of `points`
PosteriorSamples handmade_samples(ModelKind kind,
                                  const std::vector<ParameterVector>& points,
                                  const BuildingDataset& data) {
    PosteriorSamples s;
    s.kind = kind;
    s.names = param_names(kind);
    s.n_chains = 1;
    s.n_draws = static_cast<int>(points.size());
    s.n_days = data.size();
    for (const ParameterVector& p : points) {
        const auto arr = p.to_array(kind);
        s.draws.insert(s.draws.end(), arr.begin(), arr.end());
        const LogLikelihood ll = log_likelihood(kind, p, data);
        s.pointwise_loglik.insert(s.pointwise_loglik.end(),
                                  ll.pointwise.begin(), ll.pointwise.end());
    }
    s.accept_rate = {0.25};
    return s;
}

ParameterVector house_params() {
    ParameterVector p;
    p.ua0 = 0.2;
    p.ua_wind = 0.01;
    p.t_base = 17.5;
    p.ga = 0.004;
    p.phi_base = 0.35;
    p.k_mix = 5.0;
    p.sigma_winter = 0.08;
    p.sigma_reduction = 0.25;
    p.rho1 = 0.4;
    p.nu = {0.2, 0.05, -0.1};
    return p;
}

PriorSet house_priors() {
    PriorSet s;
    s.set("UA0", PriorSpec::gamma_mean_sd(0.2, 0.05));
    s.set("UA_wind", PriorSpec::gamma_mean_sd(0.012, 0.005));
    s.set("T_base", PriorSpec::normal(18.0, 1.0));
    s.set("gA", PriorSpec::gamma_mean_sd(0.004, 0.0012));
    s.set("Phi_base", PriorSpec::gamma_mean_sd(0.35, 0.1));
    s.set("k", PriorSpec::gamma_mean_sd(5.0, 1.5));
    s.set("sigma_winter", PriorSpec::gamma_mean_sd(0.1, 0.03));
    s.set("sigma_reduction", PriorSpec::gamma_mean_sd(0.25, 0.07));
    s.set("rho1", PriorSpec::normal(0.0, 0.3));
    s.set("nu1", PriorSpec::normal(0.0, 0.2));
    s.set("nu2", PriorSpec::normal(0.0, 0.2));
    s.set("nu3", PriorSpec::normal(0.0, 0.2));
    return s;
}

WeatherSeries uniform_weather(std::mt19937_64& rng, int n,
                              Day start = k_jan1_2018) {
    std::uniform_real_distribution<double> ta(-5.0, 25.0);
    std::uniform_real_distribution<double> ws(0.5, 10.0);
    std::uniform_real_distribution<double> ig(5.0, 280.0);
    std::vector<double> t(n), w(n), i(n);
    for (int d = 0; d < n; ++d) {
        t[d] = ta(rng);
        w[d] = ws(rng);
        i[d] = ig(rng);
    }
    return WeatherSeries(DateIndex(start, n), t, w, i);
}

} // namespace

TEST_CASE("type-7 quantiles on a fixed sample") {
    const std::vector<double> xs{3, 1, 4, 1, 5, 9, 2, 6};
    CHECK(quantile(xs, 0.025) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(quantile(xs, 0.25) == doctest::Approx(1.75).epsilon(1e-15));
    CHECK(quantile(xs, 0.5) == doctest::Approx(3.5).epsilon(1e-15));
    CHECK(quantile(xs, 0.9) ==
          doctest::Approx(6.8999999999999995).epsilon(1e-15));
    CHECK(quantile(xs, 0.975) ==
          doctest::Approx(8.475000000000001).epsilon(1e-15));
    CHECK(quantile(xs, 0.0) == 1.0);
    CHECK(quantile(xs, 1.0) == 9.0);
    CHECK(quantile(std::vector<double>{7.0}, 0.3) == 7.0);
    CHECK_THROWS_AS(quantile(std::vector<double>{}, 0.5),
                    std::invalid_argument);
    CHECK_THROWS_AS(quantile(xs, 1.5), std::invalid_argument);
}

TEST_CASE("credible interval endpoints are the tail quantiles") {
    std::vector<double> draws(100);
    for (int i = 0; i < 100; ++i) draws[i] = i + 1;
    const IntervalEstimate ci = credible_interval(draws, 0.9);
    CHECK(ci.lo == doctest::Approx(5.95).epsilon(1e-14));
    CHECK(ci.hi == doctest::Approx(95.05).epsilon(1e-14));
    CHECK(ci.level == 0.9);
    CHECK_THROWS_AS(credible_interval(draws, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(credible_interval(draws, 1.0), std::invalid_argument);
}

TEST_CASE("significance requires the interval to exclude zero") {
    std::vector<double> positive(40);
    for (int i = 0; i < 40; ++i) positive[i] = 0.5 + i;
    CHECK(parameter_significant(positive));

    std::vector<double> negative(40);
    for (int i = 0; i < 40; ++i) negative[i] = -0.5 - i;
    CHECK(parameter_significant(negative));

    std::vector<double> straddling(40);
    for (int i = 0; i < 40; ++i) straddling[i] = i - 20.0;
    CHECK_FALSE(parameter_significant(straddling));

    // an endpoint exactly at zero is not significant
    std::vector<double> boundary{0.0, 0.0};
    for (int i = 0; i < 38; ++i) boundary.push_back(1.0 + i);
    CHECK(quantile(boundary, 0.025) == 0.0);
    CHECK_FALSE(parameter_significant(boundary));
}

TEST_CASE("autocorrelation anchors with raw-sum normalization") {
    const std::vector<double> xs{1, 2, 0.5, 3, 2.5, 1.5, 0, 2};
    const auto r = acf(xs, 3);
    REQUIRE(r.size() == 3);
    CHECK(r[0] == doctest::Approx(-0.21266233766233766).epsilon(1e-14));
    CHECK(r[1] == doctest::Approx(-0.18722943722943722).epsilon(1e-14));
    CHECK(r[2] == doctest::Approx(-0.3003246753246753).epsilon(1e-14));

    // clipped when the series runs out of lags
    CHECK(acf(xs, 50).size() == 7);
    // constant series has zero autocorrelation by convention
    const auto flat = acf(std::vector<double>{2, 2, 2, 2}, 2);
    CHECK(flat[0] == 0.0);
    CHECK(flat[1] == 0.0);
    CHECK_THROWS_AS(acf(std::vector<double>{1}, 1), std::invalid_argument);
    CHECK_THROWS_AS(acf(xs, 0), std::invalid_argument);
}

TEST_CASE("bayes r2 endpoints and an exact halfway case") {
    // deep-winter weather so the regime weight is 1 in double precision:
    // mu is the linear winter mean and sigma is exactly sigma_reduction
    const int n = 4;
    const std::vector<double> ta{-20.0, -22.0, -20.0, -22.0};
    const WeatherSeries w(DateIndex(k_jan1_2018, n), ta,
                          std::vector<double>(n, 0.0),
                          std::vector<double>(n, 0.0));
    const BuildingDataset data(
        w, HeatDemandSeries(DateIndex(k_jan1_2018, n),
                            std::vector<double>(n, 30.0)));

    ParameterVector p;
    p.ua0 = 1.0;
    p.ua_wind = 1e-12;
    p.t_base = 15.0;
    p.ga = 1e-12;
    p.phi_base = 0.1;
    p.k_mix = 50.0;
    p.sigma_winter = 0.01;
    // mu alternates by 2 kW: sample variance 4/3; choose sigma with
    // sigma^2 = 4/3 so the ratio is exactly one half
    p.sigma_reduction = 2.0 / std::sqrt(3.0);

    const auto samples = handmade_samples(ModelKind::Es, {p}, data);
    const auto r2 = bayes_r2(samples, data);
    REQUIRE(r2.size() == 1);
    CHECK(r2[0] == doctest::Approx(0.5).epsilon(1e-12));

    // noise-free model explains everything
    ParameterVector clean = p;
    clean.sigma_reduction = 1e-9;
    const auto one = bayes_r2(handmade_samples(ModelKind::Es, {clean}, data),
                              data);
    CHECK(one[0] > 0.999999);

    // flat model explains nothing
    ParameterVector flat = p;
    flat.ua0 = 1e-12;
    flat.sigma_reduction = 0.3;
    const auto zero = bayes_r2(handmade_samples(ModelKind::Es, {flat}, data),
                               data);
    CHECK(zero[0] < 1e-6);
    CHECK(zero[0] >= 0.0);
}

TEST_CASE("lpd reduces to the total log likelihood for a single draw") {
    std::mt19937_64 rng(3);
    const WeatherSeries w = uniform_weather(rng, 12);
    const ParameterVector p = house_params();
    HeatDemandSeries d = simulate(ModelKind::Es, p, w, rng);
    const BuildingDataset data(w, std::move(d));
    const auto s = handmade_samples(ModelKind::Es, {p}, data);
    CHECK(lpd(s) ==
          doctest::Approx(log_likelihood(ModelKind::Es, p, data).total)
              .epsilon(1e-12));
}

TEST_CASE("lpd anchor for two draws over two days") {
    PosteriorSamples s;
    s.kind = ModelKind::Es;
    s.names = param_names(ModelKind::Es);
    s.n_chains = 1;
    s.n_draws = 2;
    s.n_days = 2;
    s.draws.assign(2 * 8, 0.1);
    s.pointwise_loglik = {-1.0, -2.0, -1.5, -0.5};
    CHECK(lpd(s) == doctest::Approx(-2.2108040989570315).epsilon(1e-14));
}

TEST_CASE("importance-sampled loo flags single-draw dominance") {
    PosteriorSamples s;
    s.kind = ModelKind::Es;
    s.names = param_names(ModelKind::Es);
    s.n_chains = 1;
    s.n_draws = 4;
    s.n_days = 1;
    s.draws.assign(4 * 8, 0.1);
    // one draw assigns the day vanishing likelihood: its raw weight
    // dwarfs the others even after truncation
    s.pointwise_loglik = {-50.0, -1.0, -1.0, -1.0};
    const LooResult res = elpd_loo(s);
    CHECK(res.degenerate_weights);
    CHECK(res.max_weight > 0.9);
    CHECK(res.max_weight <= 1.0);
    REQUIRE(res.pointwise.size() == 1);
    CHECK(res.elpd == doctest::Approx(res.pointwise[0]).epsilon(1e-12));
}

TEST_CASE("loo on a real fit sits below the in-sample lpd") {
    std::mt19937_64 rng(8);
    const WeatherSeries w = uniform_weather(rng, 60);
    HeatDemandSeries d = simulate(ModelKind::Es, house_params(), w, rng);
    const BuildingDataset data(w, std::move(d));

    SamplerConfig cfg;
    cfg.chains = 2;
    cfg.warmup_draws = 600;
    cfg.kept_draws = 400;
    cfg.thin = 2;
    cfg.seed = 14;
    const PosteriorSamples s = fit(ModelKind::Es, data, house_priors(), cfg);

    const LooResult res = elpd_loo(s);
    CHECK(res.elpd < lpd(s)); // out-of-sample never beats in-sample
    CHECK(res.se >= 0.0);
    REQUIRE(res.pointwise.size() == 60);
    double sum = 0;
    for (double v : res.pointwise) sum += v;
    CHECK(sum == doctest::Approx(res.elpd).epsilon(1e-10));
    CHECK(res.max_weight > 0.0);
    CHECK(res.max_weight <= 1.0);
}

TEST_CASE("test statistics on fixed series") {
    const std::vector<double> xs{1, 2, 0.5, 3, 2.5, 1.5, 0, 2};
    const HeatDemandSeries d(DateIndex(k_jan1_2018, 8), xs);
    CHECK(eval_statistic(TestStatistic::Mean, d) ==
          doctest::Approx(12.5 / 8.0).epsilon(1e-15));
    CHECK(eval_statistic(TestStatistic::Max, d) == 3.0);
    CHECK(eval_statistic(TestStatistic::Lag1Autocorr, d) ==
          doctest::Approx(-0.21266233766233766).epsilon(1e-14));

    // flat demand over a full calendar year: the winter share is the
    // December-February day count fraction
    const HeatDemandSeries year(DateIndex(k_jan1_2018, 365),
                                std::vector<double>(365, 2.0));
    CHECK(eval_statistic(TestStatistic::WinterShare, year) ==
          doctest::Approx(90.0 / 365.0).epsilon(1e-14));

    // summer-only span has no winter demand at all
    const Day jun1 = *parse_date("2018-06-01");
    const HeatDemandSeries summer(DateIndex(jun1, 90),
                                  std::vector<double>(90, 1.0));
    CHECK(eval_statistic(TestStatistic::WinterShare, summer) == 0.0);
}

TEST_CASE("posterior predictive p-values catch gross mismatch") {
    std::mt19937_64 rng(9);
    const WeatherSeries w = uniform_weather(rng, 40);
    const ParameterVector p = house_params();

    // observed data far above anything the model can generate
    const BuildingDataset high(
        w, HeatDemandSeries(w.index(), std::vector<double>(40, 1e6)));
    const auto s_high = handmade_samples(ModelKind::Es, {p, p}, high);
    CHECK(bayes_p_value(s_high, high, TestStatistic::Mean, 1) == 0.0);

    // observed data far below: every replicate exceeds it
    const BuildingDataset low(
        w, HeatDemandSeries(w.index(), std::vector<double>(40, -1e6)));
    const auto s_low = handmade_samples(ModelKind::Es, {p, p}, low);
    CHECK(bayes_p_value(s_low, low, TestStatistic::Mean, 1) == 1.0);

    // deterministic in the seed
    std::mt19937_64 rng2(10);
    HeatDemandSeries obs = simulate(ModelKind::Es, p, w, rng2);
    const BuildingDataset mid(w, std::move(obs));
    const auto s_mid = handmade_samples(ModelKind::Es, {p, p, p, p}, mid);
    const double a = bayes_p_value(s_mid, mid, TestStatistic::Max, 42);
    const double b = bayes_p_value(s_mid, mid, TestStatistic::Max, 42);
    CHECK(a == b);
    CHECK(a >= 0.0);
    CHECK(a <= 1.0);
}

TEST_CASE("residual acf sees exactly the injected pattern") {
    // noise-free single draw: the posterior mean prediction is mu itself,
    // so residuals equal whatever we add on top
    const std::vector<double> pattern{1, 2, 0.5, 3, 2.5, 1.5, 0, 2};
    std::mt19937_64 rng(12);
    const WeatherSeries w = uniform_weather(rng, 8);
    ParameterVector p = house_params();

    const BuildingDataset probe(
        w, HeatDemandSeries(w.index(), std::vector<double>(8, 1.0)));
    const MeanSeries ms = mean_series(ModelKind::Es, p, probe);
    std::vector<double> phi(8);
    for (int t = 0; t < 8; ++t) phi[t] = ms.mu[t] + pattern[t];
    const BuildingDataset data(w, HeatDemandSeries(w.index(), phi));

    const auto s = handmade_samples(ModelKind::Es, {p}, data);
    const auto r = residual_acf(s, data, 3);
    REQUIRE(r.size() == 3);
    CHECK(r[0] == doctest::Approx(-0.21266233766233766).epsilon(1e-12));
    CHECK(r[1] == doctest::Approx(-0.18722943722943722).epsilon(1e-12));
    CHECK(r[2] == doctest::Approx(-0.3003246753246753).epsilon(1e-12));
}

TEST_CASE("yearly predictive totals the simulated year in kWh") {
    std::mt19937_64 rng(15);
    const WeatherSeries year = uniform_weather(rng, 365);
    ParameterVector p = house_params();
    p.sigma_winter = 1e-12;
    p.sigma_reduction = 1e-12;

    const BuildingDataset probe(
        year, HeatDemandSeries(year.index(), std::vector<double>(365, 1.0)));
    const MeanSeries ms = mean_series(ModelKind::Es, p, probe);
    double want = 0;
    for (double m : ms.mu) want += m;
    want *= 24.0;

    const auto s = handmade_samples(ModelKind::Es, {p, p}, probe);
    const YearlyPredictive yp = yearly_posterior_predictive(s, year, 5);
    REQUIRE(yp.draws_kwh.size() == 2);
    CHECK(yp.mean_kwh == doctest::Approx(want).epsilon(1e-9));
    CHECK(yp.ci.lo == doctest::Approx(want).epsilon(1e-9));
    CHECK(yp.ci.hi == doctest::Approx(want).epsilon(1e-9));
    CHECK(yp.ci.level == 0.95);

    // deterministic in the seed once noise matters
    const auto s2 =
        handmade_samples(ModelKind::Es, {house_params(), house_params()},
                         probe);
    const auto y1 = yearly_posterior_predictive(s2, year, 7);
    const auto y2 = yearly_posterior_predictive(s2, year, 7);
    CHECK(y1.draws_kwh == y2.draws_kwh);
}

TEST_CASE("fit report carries every advertised field") {
    std::mt19937_64 rng(22);
    const WeatherSeries w = uniform_weather(rng, 100);
    HeatDemandSeries d = simulate(ModelKind::ArxEs, house_params(), w, rng,
                                  "bldg-7");
    const BuildingDataset data(w, std::move(d));

    SamplerConfig cfg;
    cfg.chains = 2;
    cfg.warmup_draws = 700;
    cfg.kept_draws = 500;
    cfg.thin = 2;
    cfg.seed = 31;
    const PosteriorSamples s =
        fit(ModelKind::ArxEs, data, house_priors(), cfg);

    std::mt19937_64 rng_y(23);
    ReportOptions opt;
    opt.ci_level = 0.9;
    opt.acf_max_lag = 15;
    opt.p_value_replicates = 50;
    opt.eval_seed = 77;
    opt.yearly_weather = uniform_weather(rng_y, 365);

    const FitReport rep = build_fit_report(s, data, opt);
    CHECK(rep.building_id == "bldg-7");
    CHECK(rep.model == "arx");
    CHECK(rep.n_days == 100);
    CHECK_FALSE(rep.heated_area.has_value());
    CHECK(rep.seed == 77);
    CHECK(rep.accept_rates == s.accept_rate);
    CHECK(rep.param_names == s.names);
    REQUIRE(rep.params.size() == 9);

    // summaries recompute from the raw draws
    const auto flat = s.flat("T_base");
    const ParamSummary& tb = rep.params.at("T_base");
    double mean = 0;
    for (double v : flat) mean += v;
    mean /= flat.size();
    CHECK(tb.mean == doctest::Approx(mean).epsilon(1e-12));
    CHECK(tb.median == doctest::Approx(quantile(flat, 0.5)).epsilon(1e-12));
    const IntervalEstimate ci = credible_interval(flat, 0.9);
    CHECK(tb.ci.lo == doctest::Approx(ci.lo).epsilon(1e-12));
    CHECK(tb.ci.hi == doctest::Approx(ci.hi).epsilon(1e-12));
    CHECK(tb.significant); // T_base draws live near 17.5
    CHECK(tb.ess > 0.0);
    CHECK(std::isfinite(tb.rhat));

    REQUIRE(rep.long_term.size() == 4);
    CHECK(rep.long_term.count("UA0_lt") == 1);
    CHECK(rep.long_term.count("UA_wind_lt") == 1);
    CHECK(rep.long_term.count("gA_lt") == 1);
    CHECK(rep.long_term.count("Phi_base_lt") == 1);
    // steady-state UA0 exceeds the short-term one for positive rho1
    if (rep.params.at("rho1").mean > 0.05) {
        CHECK(rep.long_term.at("UA0_lt").mean > rep.params.at("UA0").mean);
    }

    REQUIRE(static_cast<int>(rep.r2_draws.size()) == s.total_draws());
    for (double v : rep.r2_draws) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    CHECK(rep.r2_median ==
          doctest::Approx(quantile(rep.r2_draws, 0.5)).epsilon(1e-12));
    CHECK(rep.lpd >= rep.elpd_loo);
    CHECK(rep.elpd_loo_se >= 0.0);
    CHECK(rep.acf.size() == 15);
    REQUIRE(rep.p_values.size() == 4);
    for (const char* name : {"mean", "max", "lag1_autocorr", "winter_share"}) {
        REQUIRE(rep.p_values.count(name) == 1);
        CHECK(rep.p_values.at(name) >= 0.0);
        CHECK(rep.p_values.at(name) <= 1.0);
    }
    REQUIRE(rep.yearly.has_value());
    CHECK(rep.yearly->mean_kwh > 0.0);
    CHECK(rep.yearly->lo_kwh <= rep.yearly->mean_kwh);
    CHECK(rep.yearly->hi_kwh >= rep.yearly->mean_kwh);
    CHECK(rep.yearly->level == 0.95);

    // no yearly weather, no yearly block
    ReportOptions bare;
    bare.p_value_replicates = 10;
    const FitReport rep2 = build_fit_report(s, data, bare);
    CHECK_FALSE(rep2.yearly.has_value());
    CHECK(rep2.acf.size() == 20);
}

TEST_CASE("population summary aggregates report series") {
    FitReport a;
    a.model = "es";
    a.heated_area = 100.0;
    ParamSummary ua;
    ua.mean = 0.2;
    a.params["UA0"] = ua;
    a.r2_median = 0.8;
    a.elpd_loo = -120.0;

    FitReport b = a;
    b.params["UA0"].mean = 0.4;
    b.heated_area = 200.0;
    b.r2_median = 0.6;
    b.elpd_loo = -150.0;

    const PopulationSummary sum = population_summary({a, b}, {.bins = 2});
    const PopulationSeries* ua0 = sum.find("es", "UA0");
    REQUIRE(ua0 != nullptr);
    CHECK(ua0->values == std::vector<double>{0.2, 0.4});
    CHECK(ua0->median == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(ua0->mean == doctest::Approx(0.3).epsilon(1e-14));
    REQUIRE(ua0->hist.edges.size() == 3);
    CHECK(ua0->hist.edges[0] == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(ua0->hist.edges[2] == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(ua0->hist.counts == std::vector<int>{1, 1});

    // heat loss coefficient rescaled by the heated area
    const PopulationSeries* hlc = sum.find("es", "hlc_w_per_m2k");
    REQUIRE(hlc != nullptr);
    CHECK(hlc->values[0] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(hlc->values[1] == doctest::Approx(2.0).epsilon(1e-12));

    CHECK(sum.find("es", "rho1") == nullptr);
    CHECK(sum.find("arx", "UA0") == nullptr);

    // identical values widen artificially so the histogram stays sane
    const PopulationSummary deg = population_summary({a, a}, {.bins = 4});
    const PopulationSeries* s2 = deg.find("es", "UA0");
    REQUIRE(s2 != nullptr);
    CHECK(s2->hist.edges.front() == doctest::Approx(-0.3).epsilon(1e-12));
    CHECK(s2->hist.edges.back() == doctest::Approx(0.7).epsilon(1e-12));
    int total = 0;
    for (int c : s2->hist.counts) total += c;
    CHECK(total == 2);

    CHECK_THROWS_AS(population_summary({a}, {.bins = 0}),
                    std::invalid_argument);
}
