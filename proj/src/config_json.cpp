#include "heatsig/config_json.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "heatsig/csv_io.hpp"
#include "heatsig/errors.hpp"
#include "json.hpp"

namespace heatsig {

namespace {

using nlohmann::json;

json parse_json(const std::string& text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string(what) + ": " + e.what());
    }
}

[[noreturn]] void bad(const std::string& msg) { throw ParseError(msg); }

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) {
            if (key == a) {
                ok = true;
                break;
            }
        }
        if (!ok) bad(where + ": unknown key '" + key + "'");
    }
}

double get_number(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) bad(where + ": missing '" + key + "'");
    if (!obj[key].is_number()) bad(where + ": '" + key + "' must be a number");
    return obj[key].get<double>();
}

PriorSpec spec_from_json(const json& j, const std::string& where) {
    if (!j.is_object()) bad(where + ": prior must be an object");
    check_keys(j, {"family", "a", "b", "param"}, where);
    if (!j.contains("family") || !j["family"].is_string()) {
        bad(where + ": missing or non-string 'family'");
    }
    const std::string family = j["family"].get<std::string>();
    const double a = get_number(j, "a", where);
    const double b = get_number(j, "b", where);
    try {
        if (family == "normal") {
            if (j.contains("param")) bad(where + ": 'param' is gamma-only");
            return PriorSpec::normal(a, b);
        }
        if (family == "gamma") {
            std::string param = "mean_sd";
            if (j.contains("param")) {
                if (!j["param"].is_string()) bad(where + ": 'param' must be a string");
                param = j["param"].get<std::string>();
            }
            if (param == "mean_sd") return PriorSpec::gamma_mean_sd(a, b);
            if (param == "shape_rate") return PriorSpec::gamma_shape_rate(a, b);
            bad(where + ": unknown gamma parameterization '" + param + "'");
        }
    } catch (const std::invalid_argument& e) {
        bad(where + ": " + e.what());
    }
    bad(where + ": unknown family '" + family + "'");
}

json spec_to_json(const PriorSpec& spec) {
    json j;
    if (spec.family() == PriorFamily::Normal) {
        j["family"] = "normal";
    } else {
        j["family"] = "gamma";
        j["param"] = spec.gamma_param() == GammaParam::MeanSd ? "mean_sd"
                                                              : "shape_rate";
    }
    j["a"] = spec.a();
    j["b"] = spec.b();
    return j;
}

std::map<std::string, PriorSpec> spec_map_from_json(const json& j,
                                                    const std::string& where) {
    if (!j.is_object()) bad(where + ": expected an object of priors");
    std::map<std::string, PriorSpec> out;
    for (const auto& [key, val] : j.items()) {
        out.emplace(key, spec_from_json(val, where + "." + key));
    }
    return out;
}

} // namespace

PriorSet read_priors_json(const std::string& text) {
    const json j = parse_json(text, "priors");
    const auto known = param_names(ModelKind::ArmaxEs);
    try {
        PriorSet set = default_priors();
        for (const auto& [name, spec] : spec_map_from_json(j, "priors")) {
            if (std::find(known.begin(), known.end(), name) == known.end()) {
                bad("priors: unknown parameter '" + name + "'");
            }
            set.set(name, spec);
        }
        return set;
    } catch (const json::exception& e) {
        bad(std::string("priors: ") + e.what());
    }
}

PriorSet load_priors(const std::filesystem::path& path) {
    return read_priors_json(read_text_file(path));
}

std::string priors_to_json(const PriorSet& priors) {
    json j = json::object();
    for (const auto& [name, spec] : priors.specs()) {
        j[name] = spec_to_json(spec);
    }
    return j.dump(2) + "\n";
}

namespace {

TruthSpec truth_from_json_checked(const json& j) {
    if (!j.is_object()) bad("truth: expected an object");
    check_keys(j, {"model", "params", "heated_area"}, "truth");
    if (!j.contains("model") || !j["model"].is_string()) {
        bad("truth: missing or non-string 'model'");
    }
    TruthSpec t;
    try {
        t.kind = model_from_name(j["model"].get<std::string>());
    } catch (const std::invalid_argument& e) {
        bad(std::string("truth: ") + e.what());
    }
    if (!j.contains("params") || !j["params"].is_object()) {
        bad("truth: missing 'params' object");
    }
    const auto names = param_names(t.kind);
    const json& params = j["params"];
    for (const auto& [key, _] : params.items()) {
        if (std::find(names.begin(), names.end(), key) == names.end()) {
            bad("truth.params: '" + key + "' is not a parameter of model '" +
                std::string(model_name(t.kind)) + "'");
        }
    }
    for (std::size_t i = 0; i < names.size(); ++i) {
        t.params.set(t.kind, static_cast<int>(i),
                     get_number(params, names[i].c_str(), "truth.params"));
    }
    if (j.contains("heated_area")) {
        if (!j["heated_area"].is_number()) bad("truth: 'heated_area' must be a number");
        t.heated_area = j["heated_area"].get<double>();
    }
    return t;
}

} // namespace

TruthSpec read_truth_json(const std::string& text) {
    const json j = parse_json(text, "truth");
    try {
        return truth_from_json_checked(j);
    } catch (const json::exception& e) {
        bad(std::string("truth: ") + e.what());
    }
}

TruthSpec load_truth(const std::filesystem::path& path) {
    return read_truth_json(read_text_file(path));
}

std::string truth_to_json(const TruthSpec& truth) {
    json j;
    j["model"] = std::string(model_name(truth.kind));
    json params = json::object();
    const auto names = param_names(truth.kind);
    for (std::size_t i = 0; i < names.size(); ++i) {
        params[names[i]] = truth.params.get(truth.kind, static_cast<int>(i));
    }
    j["params"] = params;
    if (truth.heated_area) j["heated_area"] = *truth.heated_area;
    return j.dump(2) + "\n";
}

namespace {

WeatherConfig weather_from_json(const json& j, const WeatherConfig& base) {
    WeatherConfig w = base;
    if (!j.is_object()) bad("weather: expected an object");
    check_keys(j,
               {"n_days", "start", "t_mean", "t_amplitude", "t_noise_sd",
                "wind_mean", "wind_shape", "irr_peak", "irr_noise_sd", "seed"},
               "weather");
    if (j.contains("n_days")) w.n_days = j["n_days"].get<int>();
    if (j.contains("start")) {
        const auto d = parse_date(j["start"].get<std::string>());
        if (!d) bad("weather: invalid 'start' date");
        w.start = *d;
    }
    if (j.contains("t_mean")) w.t_mean = get_number(j, "t_mean", "weather");
    if (j.contains("t_amplitude")) w.t_amplitude = get_number(j, "t_amplitude", "weather");
    if (j.contains("t_noise_sd")) w.t_noise_sd = get_number(j, "t_noise_sd", "weather");
    if (j.contains("wind_mean")) w.wind_mean = get_number(j, "wind_mean", "weather");
    if (j.contains("wind_shape")) w.wind_shape = get_number(j, "wind_shape", "weather");
    if (j.contains("irr_peak")) w.irr_peak = get_number(j, "irr_peak", "weather");
    if (j.contains("irr_noise_sd")) w.irr_noise_sd = get_number(j, "irr_noise_sd", "weather");
    if (j.contains("seed")) w.seed = j["seed"].get<std::uint64_t>();
    return w;
}

json weather_to_json(const WeatherConfig& w) {
    json j;
    j["n_days"] = w.n_days;
    j["start"] = format_date(w.start);
    j["t_mean"] = w.t_mean;
    j["t_amplitude"] = w.t_amplitude;
    j["t_noise_sd"] = w.t_noise_sd;
    j["wind_mean"] = w.wind_mean;
    j["wind_shape"] = w.wind_shape;
    j["irr_peak"] = w.irr_peak;
    j["irr_noise_sd"] = w.irr_noise_sd;
    j["seed"] = w.seed;
    return j;
}

} // namespace

namespace {

PopulationConfig population_from_json_checked(const json& j) {
    if (!j.is_object()) bad("population: expected an object");
    check_keys(j,
               {"n_buildings", "model", "param_dists", "weather",
                "shared_weather", "heated_area", "seed"},
               "population");
    ModelKind kind = ModelKind::Es;
    if (j.contains("model")) {
        try {
            kind = model_from_name(j["model"].get<std::string>());
        } catch (const std::invalid_argument& e) {
            bad(std::string("population: ") + e.what());
        }
    }
    int n = j.contains("n_buildings") ? j["n_buildings"].get<int>() : 1;
    PopulationConfig c = default_population(n, kind);
    if (j.contains("param_dists")) {
        for (auto& [name, spec] :
             spec_map_from_json(j["param_dists"], "population.param_dists")) {
            c.param_dists.insert_or_assign(name, spec);
        }
    }
    if (j.contains("weather")) c.weather = weather_from_json(j["weather"], c.weather);
    if (j.contains("shared_weather")) c.shared_weather = j["shared_weather"].get<bool>();
    if (j.contains("heated_area")) {
        if (j["heated_area"].is_null()) {
            c.heated_area.reset();
        } else {
            c.heated_area = j["heated_area"].get<double>();
        }
    }
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    return c;
}

} // namespace

PopulationConfig read_population_json(const std::string& text) {
    const json j = parse_json(text, "population");
    try {
        return population_from_json_checked(j);
    } catch (const json::exception& e) {
        bad(std::string("population: ") + e.what());
    }
}

PopulationConfig load_population(const std::filesystem::path& path) {
    return read_population_json(read_text_file(path));
}

std::string population_to_json(const PopulationConfig& config) {
    json j;
    j["n_buildings"] = config.n_buildings;
    j["model"] = std::string(model_name(config.kind));
    json dists = json::object();
    for (const auto& [name, spec] : config.param_dists) {
        dists[name] = spec_to_json(spec);
    }
    j["param_dists"] = dists;
    j["weather"] = weather_to_json(config.weather);
    j["shared_weather"] = config.shared_weather;
    if (config.heated_area) {
        j["heated_area"] = *config.heated_area;
    } else {
        j["heated_area"] = nullptr;
    }
    j["seed"] = config.seed;
    return j.dump(2) + "\n";
}

namespace {

json interval_to_json(const IntervalEstimate& ci) {
    return {{"lo", ci.lo}, {"hi", ci.hi}, {"level", ci.level}};
}

IntervalEstimate interval_from_json(const json& j) {
    return {j.at("lo").get<double>(), j.at("hi").get<double>(),
            j.at("level").get<double>()};
}

json summary_to_json(const ParamSummary& s) {
    json j;
    j["mean"] = s.mean;
    j["median"] = s.median;
    j["sd"] = s.sd;
    j["ci"] = interval_to_json(s.ci);
    j["significant"] = s.significant;
    j["rhat"] = s.rhat;
    j["ess"] = s.ess;
    return j;
}

ParamSummary summary_from_json(const json& j) {
    ParamSummary s;
    s.mean = j.at("mean").get<double>();
    s.median = j.at("median").get<double>();
    s.sd = j.at("sd").get<double>();
    s.ci = interval_from_json(j.at("ci"));
    s.significant = j.at("significant").get<bool>();
    s.rhat = j.at("rhat").get<double>();
    s.ess = j.at("ess").get<double>();
    return s;
}

} // namespace

std::string report_to_json(const FitReport& report) {
    json j;
    j["building_id"] = report.building_id;
    j["model"] = report.model;
    j["n_days"] = report.n_days;
    if (report.heated_area) {
        j["heated_area"] = *report.heated_area;
    } else {
        j["heated_area"] = nullptr;
    }
    j["seed"] = report.seed;
    j["converged"] = report.converged;
    j["accept_rates"] = report.accept_rates;
    j["param_names"] = report.param_names;
    json params = json::object();
    for (const auto& [name, s] : report.params) params[name] = summary_to_json(s);
    j["params"] = params;
    json lt = json::object();
    for (const auto& [name, s] : report.long_term) lt[name] = summary_to_json(s);
    j["long_term"] = lt;
    j["r2"] = {{"median", report.r2_median}, {"draws", report.r2_draws}};
    j["lpd"] = report.lpd;
    j["elpd_loo"] = {{"value", report.elpd_loo},
                     {"se", report.elpd_loo_se},
                     {"degenerate_weights", report.loo_degenerate}};
    j["acf"] = report.acf;
    j["p_values"] = report.p_values;
    if (report.yearly) {
        j["yearly_kwh"] = {{"mean", report.yearly->mean_kwh},
                           {"lo", report.yearly->lo_kwh},
                           {"hi", report.yearly->hi_kwh},
                           {"level", report.yearly->level}};
    } else {
        j["yearly_kwh"] = nullptr;
    }
    return j.dump(2) + "\n";
}

FitReport read_report_json(const std::string& text) {
    const json j = parse_json(text, "report");
    FitReport r;
    try {
        r.building_id = j.at("building_id").get<std::string>();
        r.model = j.at("model").get<std::string>();
        r.n_days = j.at("n_days").get<int>();
        if (!j.at("heated_area").is_null()) {
            r.heated_area = j["heated_area"].get<double>();
        }
        r.seed = j.at("seed").get<std::uint64_t>();
        r.converged = j.at("converged").get<bool>();
        r.accept_rates = j.at("accept_rates").get<std::vector<double>>();
        r.param_names = j.at("param_names").get<std::vector<std::string>>();
        for (const auto& [name, s] : j.at("params").items()) {
            r.params[name] = summary_from_json(s);
        }
        for (const auto& [name, s] : j.at("long_term").items()) {
            r.long_term[name] = summary_from_json(s);
        }
        r.r2_median = j.at("r2").at("median").get<double>();
        r.r2_draws = j.at("r2").at("draws").get<std::vector<double>>();
        r.lpd = j.at("lpd").get<double>();
        r.elpd_loo = j.at("elpd_loo").at("value").get<double>();
        r.elpd_loo_se = j.at("elpd_loo").at("se").get<double>();
        r.loo_degenerate = j.at("elpd_loo").at("degenerate_weights").get<bool>();
        r.acf = j.at("acf").get<std::vector<double>>();
        for (const auto& [name, v] : j.at("p_values").items()) {
            r.p_values[name] = v.get<double>();
        }
        if (!j.at("yearly_kwh").is_null()) {
            const json& y = j["yearly_kwh"];
            r.yearly = YearlySummary{
                y.at("mean").get<double>(), y.at("lo").get<double>(),
                y.at("hi").get<double>(), y.at("level").get<double>()};
        }
    } catch (const json::exception& e) {
        bad(std::string("report: ") + e.what());
    }
    return r;
}

FitReport load_report(const std::filesystem::path& path) {
    return read_report_json(read_text_file(path));
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& text) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ParseError("cannot open " + tmp.string() + " for writing");
        out << text;
        if (!out.flush()) throw ParseError("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace heatsig
