#include "heatsig/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "heatsig/errors.hpp"

namespace heatsig {

namespace {

constexpr double k_neg_inf = -std::numeric_limits<double>::infinity();

const std::vector<std::string>& all_names() {
    static const std::vector<std::string> names = {
        "UA0",  "UA_wind", "T_base",       "gA",
        "Phi_base", "k",   "sigma_winter", "sigma_reduction",
        "rho1", "nu1",     "nu2",          "nu3"};
    return names;
}

} // namespace

int param_count(ModelKind kind) {
    switch (kind) {
        case ModelKind::Es: return 8;
        case ModelKind::ArxEs: return 9;
        case ModelKind::ArmaxEs: return 12;
    }
    throw std::invalid_argument("unknown model kind");
}

std::vector<std::string> param_names(ModelKind kind) {
    const auto& all = all_names();
    return {all.begin(), all.begin() + param_count(kind)};
}

std::string_view model_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::Es: return "es";
        case ModelKind::ArxEs: return "arx";
        case ModelKind::ArmaxEs: return "armax";
    }
    throw std::invalid_argument("unknown model kind");
}

ModelKind model_from_name(std::string_view name) {
    if (name == "es") return ModelKind::Es;
    if (name == "arx") return ModelKind::ArxEs;
    if (name == "armax") return ModelKind::ArmaxEs;
    throw std::invalid_argument("unknown model name: " + std::string(name));
}

double ParameterVector::get(ModelKind kind, int i) const {
    if (i < 0 || i >= param_count(kind)) {
        throw std::invalid_argument("parameter index out of range");
    }
    switch (i) {
        case 0: return ua0;
        case 1: return ua_wind;
        case 2: return t_base;
        case 3: return ga;
        case 4: return phi_base;
        case 5: return k_mix;
        case 6: return sigma_winter;
        case 7: return sigma_reduction;
        case 8: return rho1;
        default: return nu[i - 9];
    }
}

void ParameterVector::set(ModelKind kind, int i, double value) {
    if (i < 0 || i >= param_count(kind)) {
        throw std::invalid_argument("parameter index out of range");
    }
    switch (i) {
        case 0: ua0 = value; return;
        case 1: ua_wind = value; return;
        case 2: t_base = value; return;
        case 3: ga = value; return;
        case 4: phi_base = value; return;
        case 5: k_mix = value; return;
        case 6: sigma_winter = value; return;
        case 7: sigma_reduction = value; return;
        case 8: rho1 = value; return;
        default: nu[i - 9] = value; return;
    }
}

std::vector<double> ParameterVector::to_array(ModelKind kind) const {
    const int n = param_count(kind);
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = get(kind, i);
    return out;
}

ParameterVector ParameterVector::from_array(ModelKind kind,
                                            std::span<const double> v) {
    const int n = param_count(kind);
    if (static_cast<int>(v.size()) != n) {
        throw std::invalid_argument("parameter array has wrong length");
    }
    ParameterVector p;
    for (int i = 0; i < n; ++i) p.set(kind, i, v[i]);
    return p;
}

bool ParameterVector::valid(ModelKind kind) const {
    const bool scales = ua0 > 0 && ua_wind > 0 && ga > 0 && phi_base > 0 &&
                        k_mix > 0 && sigma_winter > 0 && sigma_reduction > 0 &&
                        std::isfinite(ua0) && std::isfinite(ua_wind) &&
                        std::isfinite(ga) && std::isfinite(phi_base) &&
                        std::isfinite(k_mix) && std::isfinite(sigma_winter) &&
                        std::isfinite(sigma_reduction) &&
                        std::isfinite(t_base);
    if (!scales) return false;
    if (kind != ModelKind::Es && !(std::abs(rho1) < 1)) return false;
    if (kind == ModelKind::ArmaxEs) {
        for (double v : nu) {
            if (!std::isfinite(v)) return false;
        }
    }
    return true;
}

double winter_regime_mean(const ParameterVector& p, const WeatherDay& w) {
    return (p.ua0 + p.ua_wind * w.wind_speed) * (p.t_base - w.t_ambient) -
           p.ga * w.irradiance + p.phi_base;
}

double summer_regime_mean(const ParameterVector& p) { return p.phi_base; }

double lse_mix(double a, double b, double k) {
    // shifted by the max so the exp argument is always <= 0
    const double ka = k * a;
    const double kb = k * b;
    const double m = std::max(ka, kb);
    return (m + std::log1p(std::exp(std::min(ka, kb) - m))) / k;
}

double tau_weight(double a, double b, double k) {
    // logistic in k(a - b), evaluated from the max side for symmetry
    const double d = k * (b - a);
    if (d >= 0) {
        const double e = std::exp(-d);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(d));
}

double mixed_sigma(double tau, const ParameterVector& p) {
    return tau * p.sigma_reduction + (1.0 - tau) * p.sigma_winter;
}

namespace {

// Shared one-step recursion used by mean_series and simulate. next_phi
// maps day t's (mu, sigma, tau) to the value fed back as observed load.
template <typename NextPhi>
void run_recursion(ModelKind kind, const ParameterVector& p,
                   const WeatherSeries& weather, MeanSeries& out,
                   NextPhi&& next_phi) {
    const int n = weather.size();
    out.mu.resize(n);
    out.sigma.resize(n);
    out.tau.resize(n);
    const bool ar = kind != ModelKind::Es;
    const bool ma = kind == ModelKind::ArmaxEs;
    std::array<double, k_ma_order> e{}; // e[i] = residual at day t-1-i
    double phi_prev = 0;
    for (int t = 0; t < n; ++t) {
        double dyn = 0;
        if (ar && t > 0) dyn += p.rho1 * phi_prev;
        if (ma) {
            for (int i = 0; i < k_ma_order; ++i) {
                if (t - 1 - i >= 0) dyn += p.nu[i] * e[i];
            }
        }
        const double w = winter_regime_mean(p, weather.day(t)) + dyn;
        const double s = summer_regime_mean(p) + dyn;
        out.mu[t] = lse_mix(w, s, p.k_mix);
        out.tau[t] = tau_weight(w, s, p.k_mix);
        out.sigma[t] = mixed_sigma(out.tau[t], p);
        const double phi_t = next_phi(t, out.mu[t], out.sigma[t]);
        if (ma) {
            for (int i = k_ma_order - 1; i > 0; --i) e[i] = e[i - 1];
            e[0] = phi_t - out.mu[t];
        }
        phi_prev = phi_t;
    }
}

} // namespace

MeanSeries mean_series(ModelKind kind, const ParameterVector& p,
                       const BuildingDataset& data) {
    MeanSeries out;
    run_recursion(kind, p, data.weather(), out,
                  [&](int t, double, double) { return data.phi(t); });
    return out;
}

LogLikelihood log_likelihood(ModelKind kind, const ParameterVector& p,
                             const BuildingDataset& data) {
    const MeanSeries ms = mean_series(kind, p, data);
    const int n = data.size();
    LogLikelihood ll;
    ll.pointwise.resize(n);
    double total = 0;
    constexpr double half_log_2pi = 0.9189385332046727;
    for (int t = 0; t < n; ++t) {
        double v = k_neg_inf;
        const double sigma = ms.sigma[t];
        if (std::isfinite(ms.mu[t]) && sigma > 0 && std::isfinite(sigma)) {
            const double z = (data.phi(t) - ms.mu[t]) / sigma;
            v = -half_log_2pi - std::log(sigma) - 0.5 * z * z;
        }
        if (std::isnan(v)) v = k_neg_inf;
        ll.pointwise[t] = v;
        total += v;
    }
    ll.total = std::isnan(total) ? k_neg_inf : total;
    return ll;
}

HeatDemandSeries simulate(ModelKind kind, const ParameterVector& p,
                          const WeatherSeries& weather, std::mt19937_64& rng,
                          std::string building_id) {
    const int n = weather.size();
    std::vector<double> phi(n);
    std::normal_distribution<double> unit(0.0, 1.0);
    MeanSeries scratch;
    // one z per day regardless of sigma, so the stream position is stable
    run_recursion(kind, p, weather, scratch,
                  [&](int t, double mu, double sigma) {
                      phi[t] = mu + sigma * unit(rng);
                      return phi[t];
                  });
    return HeatDemandSeries(weather.index(), std::move(phi),
                            std::move(building_id));
}

LongTermParameters long_term_transform(const ParameterVector& p) {
    if (!(std::abs(p.rho1) < 1)) {
        throw UnstableAR("|rho1| >= 1 has no long-term form");
    }
    const double gamma = 1.0 - p.rho1;
    return {p.ua0 / gamma, p.ua_wind / gamma, p.t_base,
            p.ga / gamma,  p.phi_base / gamma, gamma};
}

ParameterVector long_term_invert(const LongTermParameters& lt,
                                 const ParameterVector& rest) {
    ParameterVector p = rest;
    p.ua0 = lt.ua0_lt * lt.gamma;
    p.ua_wind = lt.ua_wind_lt * lt.gamma;
    p.t_base = lt.t_base_lt;
    p.ga = lt.ga_lt * lt.gamma;
    p.phi_base = lt.phi_base_lt * lt.gamma;
    p.rho1 = 1.0 - lt.gamma;
    return p;
}

std::array<double, 5> EcmForm::regressors(const WeatherDay& w) {
    return {1.0, w.wind_speed, -w.t_ambient, -w.t_ambient * w.wind_speed,
            -w.irradiance};
}

double EcmForm::equilibrium(const WeatherDay& w) const {
    const auto x = regressors(w);
    double v = phi_base_lt;
    for (int i = 0; i < 5; ++i) v += x[i] * theta_lt[i];
    return v;
}

double EcmForm::delta(const WeatherDay& today, const WeatherDay& yesterday,
                      double phi_prev) const {
    const auto xt = regressors(today);
    const auto xp = regressors(yesterday);
    double dx_theta = 0;
    for (int i = 0; i < 5; ++i) dx_theta += (xt[i] - xp[i]) * theta[i];
    return dx_theta - gamma * (phi_prev - equilibrium(yesterday));
}

EcmForm ecm_form(const ParameterVector& p) {
    if (!(std::abs(p.rho1) < 1)) {
        throw UnstableAR("|rho1| >= 1 has no error-correction form");
    }
    EcmForm f;
    f.gamma = 1.0 - p.rho1;
    f.phi_base_lt = p.phi_base / f.gamma;
    f.theta = {p.ua0 * p.t_base, p.ua_wind * p.t_base, p.ua0, p.ua_wind, p.ga};
    for (int i = 0; i < 5; ++i) f.theta_lt[i] = f.theta[i] / f.gamma;
    return f;
}

} // namespace heatsig
