#include "heatsig/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "heatsig/config_json.hpp"
#include "heatsig/csv_io.hpp"
#include "heatsig/errors.hpp"
#include "heatsig/mcmc.hpp"
#include "heatsig/metrics.hpp"
#include "heatsig/synth.hpp"

namespace heatsig {

namespace {

namespace fs = std::filesystem;

constexpr int k_exit_ok = 0;
constexpr int k_exit_error = 1;
constexpr int k_exit_not_converged = 2;

struct FitOptions {
    std::string meter;
    std::string weather;
    std::string model = "es";
    std::string priors_path;
    std::string out_dir = ".";
    std::string building_id;
    std::string yearly_weather;
    double heated_area = 0; // 0: unknown
    std::uint64_t seed = 0;
    int chains = 4;
    int warmup = 1000;
    int draws = 2000;
    int thin = 1;
    double ci_level = 0.95;
    int acf_lags = 20;
    int pvalue_reps = 1000;
};

void add_sampler_flags(CLI::App* cmd, FitOptions& opt) {
    cmd->add_option("--seed", opt.seed, "RNG seed (all randomness derives from it)");
    cmd->add_option("--chains", opt.chains, "MCMC chains")->check(CLI::Range(2, 64));
    cmd->add_option("--warmup", opt.warmup, "warmup iterations per chain")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--draws", opt.draws, "kept draws per chain")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--thin", opt.thin, "proposals per kept draw")
        ->check(CLI::Range(1, 1000));
    cmd->add_option("--priors", opt.priors_path,
                    "JSON priors file (entries override the defaults)");
}

PriorSet resolve_priors(const std::string& path) {
    if (path.empty()) return default_priors();
    return load_priors(path);
}

std::string fmt(double x) { return format_double(x); }

// Loads, aligns and screens the data; findings that poison a fit abort.
BuildingDataset load_dataset(const FitOptions& opt, std::ostream& err) {
    const std::optional<double> area =
        opt.heated_area > 0 ? std::optional<double>(opt.heated_area)
                            : std::nullopt;
    HeatDemandSeries demand = read_meter_csv(fs::path(opt.meter), area);
    if (!opt.building_id.empty()) {
        demand = HeatDemandSeries(demand.index(), demand.phi(),
                                  opt.building_id, demand.heated_area());
    }
    const WeatherSeries weather = read_weather_csv(fs::path(opt.weather));
    BuildingDataset data = align(weather, demand);
    const auto findings = validate(data);
    bool fatal = false;
    for (const auto& f : findings) {
        err << "warning: " << f.message << "\n";
        if (f.kind != FindingKind::ConstantSeries) fatal = true;
    }
    if (fatal) throw RangeError("data failed validation, not fitting");
    return data;
}

SamplerConfig sampler_config(const FitOptions& opt) {
    SamplerConfig cfg;
    cfg.chains = opt.chains;
    cfg.warmup_draws = opt.warmup;
    cfg.kept_draws = opt.draws;
    cfg.thin = opt.thin;
    cfg.seed = opt.seed;
    cfg.check(true);
    return cfg;
}

int run_fit(const FitOptions& opt, std::ostream& out, std::ostream& err) {
    const ModelKind kind = model_from_name(opt.model);
    const BuildingDataset data = load_dataset(opt, err);
    const PriorSet priors = resolve_priors(opt.priors_path);
    const SamplerConfig cfg = sampler_config(opt);

    const PosteriorSamples samples = fit(kind, data, priors, cfg);

    ReportOptions ropt;
    ropt.ci_level = opt.ci_level;
    ropt.acf_max_lag = opt.acf_lags;
    ropt.p_value_replicates = opt.pvalue_reps;
    ropt.eval_seed = opt.seed ^ 0xe7a1ull;
    if (!opt.yearly_weather.empty()) {
        ropt.yearly_weather = read_weather_csv(fs::path(opt.yearly_weather));
    } else if (data.size() >= 365) {
        ropt.yearly_weather = data.weather().slice(0, 365);
    }
    const FitReport report = build_fit_report(samples, data, ropt);

    fs::create_directories(opt.out_dir);
    write_text_file(fs::path(opt.out_dir) / "report.json",
                    report_to_json(report));
    {
        std::ostringstream ss;
        write_draws_csv(ss, samples);
        write_text_file(fs::path(opt.out_dir) / "draws.csv", ss.str());
    }
    {
        std::ostringstream ss;
        write_acf_csv(ss, report.acf);
        write_text_file(fs::path(opt.out_dir) / "acf.csv", ss.str());
    }
    {
        std::ostringstream ss;
        write_r2_csv(ss, report.r2_draws);
        write_text_file(fs::path(opt.out_dir) / "r2.csv", ss.str());
    }

    out << "building " << report.building_id << " model " << report.model
        << " days " << report.n_days << "\n";
    for (const auto& name : report.param_names) {
        const ParamSummary& s = report.params.at(name);
        out << "  " << name << " mean " << fmt(s.mean) << " ci["
            << fmt(s.ci.lo) << ", " << fmt(s.ci.hi) << "] rhat "
            << fmt(s.rhat) << "\n";
    }
    out << "  r2 median " << fmt(report.r2_median) << "\n";
    out << "  elpd_loo " << fmt(report.elpd_loo) << " se "
        << fmt(report.elpd_loo_se) << "\n";
    if (report.yearly) {
        out << "  yearly_kwh mean " << fmt(report.yearly->mean_kwh) << " ci["
            << fmt(report.yearly->lo_kwh) << ", " << fmt(report.yearly->hi_kwh)
            << "]\n";
    }
    if (!report.converged) {
        err << "warning: convergence diagnostics failed (rhat >= 1.05)\n";
        return k_exit_not_converged;
    }
    return k_exit_ok;
}

struct SimulateOptions {
    std::string truth;
    std::string weather;
    std::string out_dir = ".";
    std::string building_id = "synth-0";
    std::uint64_t seed = 0;
    int days = 365;
    std::uint64_t weather_seed = 0;
};

int run_simulate(const SimulateOptions& opt, std::ostream& out,
                 std::ostream& err) {
    (void)err;
    const TruthSpec truth = load_truth(opt.truth);
    WeatherSeries weather = [&] {
        if (!opt.weather.empty()) return read_weather_csv(fs::path(opt.weather));
        WeatherConfig wc;
        wc.n_days = opt.days;
        wc.seed = opt.weather_seed;
        return generate_weather(wc);
    }();
    const SynthBuilding b =
        generate_building(truth.kind, truth.params, weather, opt.seed,
                          opt.building_id, truth.heated_area);

    fs::create_directories(opt.out_dir);
    {
        std::ostringstream ss;
        write_weather_csv(ss, weather);
        write_text_file(fs::path(opt.out_dir) / "weather.csv", ss.str());
    }
    {
        std::ostringstream ss;
        write_meter_csv(ss, b.data.demand());
        write_text_file(fs::path(opt.out_dir) / "meter.csv", ss.str());
    }
    write_text_file(fs::path(opt.out_dir) / "truth.json", truth_to_json(truth));
    out << "simulated " << weather.size() << " days for " << opt.building_id;
    if (b.clamped_days > 0) out << " (" << b.clamped_days << " clamped)";
    out << "\n";
    return k_exit_ok;
}

struct PortfolioOptions {
    std::string population;
    std::string out_dir = ".";
    int n_override = 0;
    std::string model_override;
    std::uint64_t seed = 0;
    bool seed_given = false;
    bool do_fit = false;
    int jobs = 1;
    FitOptions fit; // sampler settings reused for per-building fits
};

int run_portfolio(const PortfolioOptions& opt, std::ostream& out,
                  std::ostream& err) {
    PopulationConfig config =
        opt.population.empty()
            ? default_population(opt.n_override > 0 ? opt.n_override : 10,
                                 opt.model_override.empty()
                                     ? ModelKind::Es
                                     : model_from_name(opt.model_override))
            : load_population(opt.population);
    if (!opt.population.empty()) {
        if (opt.n_override > 0) config.n_buildings = opt.n_override;
        if (!opt.model_override.empty()) {
            config.kind = model_from_name(opt.model_override);
        }
    }
    if (opt.seed_given) {
        config.seed = opt.seed;
        config.weather.seed = opt.seed ^ 0x77eaull;
    }
    const Portfolio portfolio = generate_portfolio(config);
    for (const auto& w : portfolio.warnings) err << "warning: " << w << "\n";

    fs::create_directories(opt.out_dir);
    for (const auto& b : portfolio.buildings) {
        const fs::path dir =
            fs::path(opt.out_dir) / "buildings" / b.data.demand().building_id();
        fs::create_directories(dir);
        {
            std::ostringstream ss;
            write_weather_csv(ss, b.data.weather());
            write_text_file(dir / "weather.csv", ss.str());
        }
        {
            std::ostringstream ss;
            write_meter_csv(ss, b.data.demand());
            write_text_file(dir / "meter.csv", ss.str());
        }
        TruthSpec truth{b.kind, b.truth, b.data.demand().heated_area()};
        write_text_file(dir / "truth.json", truth_to_json(truth));
    }
    out << "generated " << portfolio.buildings.size() << " buildings\n";
    if (!opt.do_fit) return k_exit_ok;

    const PriorSet priors = resolve_priors(opt.fit.priors_path);
    SamplerConfig cfg;
    cfg.chains = opt.fit.chains;
    cfg.warmup_draws = opt.fit.warmup;
    cfg.kept_draws = opt.fit.draws;
    cfg.thin = opt.fit.thin;
    cfg.check(true);

    const int n = static_cast<int>(portfolio.buildings.size());
    std::vector<FitReport> reports(n);
    std::vector<std::string> failures(n);
    std::atomic<int> next{0};
    auto worker = [&] {
        while (true) {
            const int i = next.fetch_add(1);
            if (i >= n) break;
            const SynthBuilding& b = portfolio.buildings[i];
            SamplerConfig bcfg = cfg;
            // per-building seed, stable regardless of job count
            bcfg.seed =
                config.seed ^ (0x5eedull + 0x9E3779B97F4A7C15ull * (i + 1));
            try {
                const PosteriorSamples samples =
                    fit(config.kind, b.data, priors, bcfg);
                ReportOptions ropt;
                ropt.eval_seed = bcfg.seed ^ 0xe7a1ull;
                ropt.p_value_replicates = 200;
                reports[i] = build_fit_report(samples, b.data, ropt);
            } catch (const std::exception& e) {
                failures[i] = e.what();
            }
        }
    };
    const int jobs = std::max(1, opt.jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    bool any_failed = false;
    bool all_converged = true;
    for (int i = 0; i < n; ++i) {
        const auto& id = portfolio.buildings[i].data.demand().building_id();
        if (!failures[i].empty()) {
            err << "error: building " << id << ": " << failures[i] << "\n";
            any_failed = true;
            continue;
        }
        const fs::path dir = fs::path(opt.out_dir) / "buildings" / id;
        write_text_file(dir / "report.json", report_to_json(reports[i]));
        if (!reports[i].converged) {
            err << "warning: building " << id << " did not converge\n";
            all_converged = false;
        }
    }
    if (any_failed) return k_exit_error;

    const PopulationSummary summary = population_summary(reports);
    {
        std::ostringstream ss;
        write_population_csv(ss, summary);
        write_text_file(fs::path(opt.out_dir) / "population.csv", ss.str());
    }
    {
        std::ostringstream ss;
        write_population_hist_csv(ss, summary);
        write_text_file(fs::path(opt.out_dir) / "population_hist.csv", ss.str());
    }
    out << "fitted " << n << " buildings with model "
        << model_name(config.kind) << "\n";
    if (const auto* hlc = summary.find(std::string(model_name(config.kind)),
                                       "hlc_w_per_m2k")) {
        out << "  hlc_w_per_m2k median " << fmt(hlc->median) << "\n";
    }
    return all_converged ? k_exit_ok : k_exit_not_converged;
}

struct DiagnoseOptions {
    std::string report;
};

int run_diagnose(const DiagnoseOptions& opt, std::ostream& out,
                 std::ostream& err) {
    (void)err;
    const FitReport rep = load_report(opt.report);
    out << "building " << rep.building_id << " model " << rep.model << " ("
        << rep.n_days << " days)\n";
    out << "converged: " << (rep.converged ? "yes" : "no") << "\n";
    out << "param mean ci_lo ci_hi rhat ess significant\n";
    for (const auto& name : rep.param_names) {
        const ParamSummary& s = rep.params.at(name);
        out << name << ' ' << fmt(s.mean) << ' ' << fmt(s.ci.lo) << ' '
            << fmt(s.ci.hi) << ' ' << fmt(s.rhat) << ' ' << fmt(s.ess) << ' '
            << (s.significant ? "yes" : "no") << "\n";
    }
    if (!rep.long_term.empty()) {
        out << "long-term coefficients\n";
        for (const auto& [name, s] : rep.long_term) {
            out << name << ' ' << fmt(s.mean) << ' ' << fmt(s.ci.lo) << ' '
                << fmt(s.ci.hi) << "\n";
        }
    }
    out << "p_values";
    for (const auto& [name, p] : rep.p_values) out << ' ' << name << '=' << fmt(p);
    out << "\n";
    return rep.converged ? k_exit_ok : k_exit_not_converged;
}

struct LooCheckOptions {
    FitOptions fit;
    int max_days = 30;
};

int run_loo_check(const LooCheckOptions& opt, std::ostream& out,
                  std::ostream& err) {
    const ModelKind kind = model_from_name(opt.fit.model);
    // small-n tool: bypass the reporting floor on overlap length
    const HeatDemandSeries demand = read_meter_csv(fs::path(opt.fit.meter));
    const WeatherSeries weather = read_weather_csv(fs::path(opt.fit.weather));
    const Day lo = std::max(weather.index().start, demand.index().start);
    const Day hi = std::min(weather.index().last(), demand.index().last());
    const int overlap = static_cast<int>((hi - lo).count()) + 1;
    if (overlap < 2) throw OverlapTooShort("need at least 2 overlapping days");
    const int use = std::min(overlap, opt.max_days);
    const BuildingDataset data(
        weather.slice(weather.index().offset_of(lo), use),
        demand.slice(demand.index().offset_of(lo), use));

    const PriorSet priors = resolve_priors(opt.fit.priors_path);
    SamplerConfig cfg;
    cfg.chains = opt.fit.chains;
    cfg.warmup_draws = opt.fit.warmup;
    cfg.kept_draws = opt.fit.draws;
    cfg.thin = opt.fit.thin;
    cfg.seed = opt.fit.seed;
    cfg.check(false);

    err << "refitting " << use << " times for the exact comparison\n";
    const PosteriorSamples samples = fit(kind, data, priors, cfg);
    const LooResult is_loo = elpd_loo(samples);
    const LooResult oracle = exact_loo(kind, data, priors, cfg);

    double max_pointwise = 0;
    for (int t = 0; t < use; ++t) {
        max_pointwise = std::max(
            max_pointwise, std::abs(is_loo.pointwise[t] - oracle.pointwise[t]));
    }
    out << "days " << use << "\n";
    out << "elpd_loo_is " << fmt(is_loo.elpd) << " se " << fmt(is_loo.se) << "\n";
    out << "elpd_loo_exact " << fmt(oracle.elpd) << " se " << fmt(oracle.se) << "\n";
    out << "abs_diff " << fmt(std::abs(is_loo.elpd - oracle.elpd)) << "\n";
    out << "max_pointwise_diff " << fmt(max_pointwise) << "\n";
    out << "max_weight " << fmt(is_loo.max_weight) << " degenerate "
        << (is_loo.degenerate_weights ? "yes" : "no") << "\n";
    return k_exit_ok;
}

} // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
    CLI::App app{"Bayesian energy signature fitting for daily heat demand"};
    app.require_subcommand(1);

    FitOptions fit_opt;
    CLI::App* cmd_fit = app.add_subcommand("fit", "fit one building");
    cmd_fit->add_option("--meter", fit_opt.meter, "meter CSV (date,heat_kwh)")
        ->required();
    cmd_fit->add_option("--weather", fit_opt.weather, "weather CSV")->required();
    cmd_fit->add_option("--model", fit_opt.model, "es | arx | armax")
        ->check(CLI::IsMember({"es", "arx", "armax"}));
    cmd_fit->add_option("--out", fit_opt.out_dir, "output directory");
    cmd_fit->add_option("--building-id", fit_opt.building_id,
                        "override the building id");
    cmd_fit->add_option("--heated-area", fit_opt.heated_area,
                        "m2, for per-area summaries")
        ->check(CLI::NonNegativeNumber);
    cmd_fit->add_option("--yearly-weather", fit_opt.yearly_weather,
                        "weather CSV for the annual predictive (default: first "
                        "365 fitted days)");
    cmd_fit->add_option("--ci", fit_opt.ci_level, "credible interval level")
        ->check(CLI::Range(0.5, 0.999));
    cmd_fit->add_option("--acf-lags", fit_opt.acf_lags, "residual acf lags")
        ->check(CLI::Range(1, 60));
    cmd_fit->add_option("--pvalue-reps", fit_opt.pvalue_reps,
                        "posterior predictive replicates")
        ->check(CLI::PositiveNumber);
    add_sampler_flags(cmd_fit, fit_opt);

    SimulateOptions sim_opt;
    CLI::App* cmd_sim = app.add_subcommand(
        "simulate", "generate one synthetic building (weather, meter, truth)");
    cmd_sim->add_option("--truth", sim_opt.truth, "truth JSON")->required();
    cmd_sim->add_option("--weather", sim_opt.weather,
                        "weather CSV (omit to synthesize)");
    cmd_sim->add_option("--days", sim_opt.days, "days of synthetic weather")
        ->check(CLI::PositiveNumber);
    cmd_sim->add_option("--weather-seed", sim_opt.weather_seed,
                        "seed for synthetic weather");
    cmd_sim->add_option("--out", sim_opt.out_dir, "output directory");
    cmd_sim->add_option("--building-id", sim_opt.building_id, "building id");
    cmd_sim->add_option("--seed", sim_opt.seed, "demand noise seed");

    PortfolioOptions pf_opt;
    CLI::App* cmd_pf = app.add_subcommand(
        "portfolio", "generate (and optionally fit) a building population");
    cmd_pf->add_option("--population", pf_opt.population,
                       "population JSON (omit for defaults)");
    cmd_pf->add_option("--n", pf_opt.n_override, "number of buildings");
    cmd_pf->add_option("--model", pf_opt.model_override, "es | arx | armax")
        ->check(CLI::IsMember({"es", "arx", "armax"}));
    cmd_pf->add_option("--out", pf_opt.out_dir, "output directory");
    cmd_pf->add_option("--seed", pf_opt.seed, "master seed");
    cmd_pf->add_flag("--fit", pf_opt.do_fit, "fit every generated building");
    cmd_pf->add_option("--jobs", pf_opt.jobs, "parallel fit workers")
        ->check(CLI::Range(1, 64));
    cmd_pf->add_option("--chains", pf_opt.fit.chains, "MCMC chains")
        ->check(CLI::Range(2, 64));
    cmd_pf->add_option("--warmup", pf_opt.fit.warmup, "warmup iterations")
        ->check(CLI::PositiveNumber);
    cmd_pf->add_option("--draws", pf_opt.fit.draws, "kept draws per chain")
        ->check(CLI::PositiveNumber);
    cmd_pf->add_option("--priors", pf_opt.fit.priors_path, "JSON priors file");

    DiagnoseOptions diag_opt;
    CLI::App* cmd_diag =
        app.add_subcommand("diagnose", "print diagnostics from a report.json");
    cmd_diag->add_option("--report", diag_opt.report, "report.json path")
        ->required();

    LooCheckOptions loo_opt;
    CLI::App* cmd_loo = app.add_subcommand(
        "loo-check", "compare importance-sampled LOO against exact refits");
    cmd_loo->add_option("--meter", loo_opt.fit.meter, "meter CSV")->required();
    cmd_loo->add_option("--weather", loo_opt.fit.weather, "weather CSV")
        ->required();
    cmd_loo->add_option("--model", loo_opt.fit.model, "es | arx | armax")
        ->check(CLI::IsMember({"es", "arx", "armax"}));
    cmd_loo->add_option("--max-days", loo_opt.max_days,
                        "cap on days used (refit cost is one fit per day)")
        ->check(CLI::Range(2, 30));
    cmd_loo->add_option("--seed", loo_opt.fit.seed, "RNG seed");
    cmd_loo->add_option("--chains", loo_opt.fit.chains, "MCMC chains")
        ->check(CLI::Range(2, 64));
    cmd_loo->add_option("--warmup", loo_opt.fit.warmup, "warmup iterations")
        ->check(CLI::PositiveNumber);
    cmd_loo->add_option("--draws", loo_opt.fit.draws, "kept draws per chain")
        ->check(CLI::PositiveNumber);
    cmd_loo->add_option("--priors", loo_opt.fit.priors_path, "JSON priors file");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        std::ostringstream msg;
        const int code = app.exit(e, msg, msg);
        (code == 0 ? out : err) << msg.str();
        return code == 0 ? k_exit_ok : k_exit_error;
    }

    pf_opt.seed_given = cmd_pf->count("--seed") > 0;
    try {
        if (cmd_fit->parsed()) return run_fit(fit_opt, out, err);
        if (cmd_sim->parsed()) return run_simulate(sim_opt, out, err);
        if (cmd_pf->parsed()) return run_portfolio(pf_opt, out, err);
        if (cmd_diag->parsed()) return run_diagnose(diag_opt, out, err);
        if (cmd_loo->parsed()) return run_loo_check(loo_opt, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return k_exit_error;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return k_exit_error;
    }
    err << "error: no subcommand\n";
    return k_exit_error;
}

} // namespace heatsig
