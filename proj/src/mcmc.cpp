#include "heatsig/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "heatsig/errors.hpp"

namespace heatsig {

namespace {

constexpr double k_neg_inf = -std::numeric_limits<double>::infinity();

enum class Transform { Log, Identity, Atanh };

// Canonical order: UA0, UA_wind, T_base, gA, Phi_base, k, sigma_winter,
// sigma_reduction, rho1, nu1..nu3.
Transform transform_of(int i) {
    if (i == 2 || i >= 9) return Transform::Identity;
    if (i == 8) return Transform::Atanh;
    return Transform::Log;
}

// log(1 - tanh(v)^2), stable for large |v|
double log_dtanh(double v) {
    const double a = std::abs(v);
    return 2.0 * (std::log(2.0) - a - std::log1p(std::exp(-2.0 * a)));
}

} // namespace

std::vector<double> to_unconstrained(ModelKind kind, const ParameterVector& p) {
    const int n = param_count(kind);
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) {
        const double x = p.get(kind, i);
        switch (transform_of(i)) {
            case Transform::Log: v[i] = std::log(x); break;
            case Transform::Identity: v[i] = x; break;
            case Transform::Atanh: v[i] = std::atanh(x); break;
        }
    }
    return v;
}

ParameterVector to_constrained(ModelKind kind, std::span<const double> v) {
    const int n = param_count(kind);
    if (static_cast<int>(v.size()) != n) {
        throw std::invalid_argument("unconstrained vector has wrong length");
    }
    ParameterVector p;
    for (int i = 0; i < n; ++i) {
        double x = v[i];
        switch (transform_of(i)) {
            case Transform::Log: x = std::exp(x); break;
            case Transform::Identity: break;
            case Transform::Atanh: x = std::tanh(x); break;
        }
        p.set(kind, i, x);
    }
    return p;
}

double log_jacobian(ModelKind kind, std::span<const double> v) {
    const int n = param_count(kind);
    if (static_cast<int>(v.size()) != n) {
        throw std::invalid_argument("unconstrained vector has wrong length");
    }
    double lj = 0;
    for (int i = 0; i < n; ++i) {
        switch (transform_of(i)) {
            case Transform::Log: lj += v[i]; break;
            case Transform::Identity: break;
            case Transform::Atanh: lj += log_dtanh(v[i]); break;
        }
    }
    return lj;
}

double log_prior_with_jacobian(ModelKind kind, std::span<const double> v,
                               const PriorSet& priors) {
    const auto names = param_names(kind);
    const ParameterVector p = to_constrained(kind, v);
    double lp = 0;
    for (int i = 0; i < static_cast<int>(names.size()); ++i) {
        lp += priors.at(names[i]).log_pdf(p.get(kind, i));
    }
    lp += log_jacobian(kind, v);
    return std::isnan(lp) ? k_neg_inf : lp;
}

double log_posterior(ModelKind kind, std::span<const double> v,
                     const BuildingDataset& data, const PriorSet& priors) {
    const double lp = log_prior_with_jacobian(kind, v, priors);
    if (!std::isfinite(lp)) return k_neg_inf;
    const ParameterVector p = to_constrained(kind, v);
    const double ll = log_likelihood(kind, p, data).total;
    const double post = lp + ll;
    return std::isnan(post) ? k_neg_inf : post;
}

double PosteriorSamples::value(int c, int d, int p) const {
    return draws[(static_cast<std::size_t>(c) * n_draws + d) * n_params() + p];
}

ParameterVector PosteriorSamples::at(int c, int d) const {
    const std::size_t off =
        (static_cast<std::size_t>(c) * n_draws + d) * n_params();
    return ParameterVector::from_array(
        kind, std::span<const double>(draws.data() + off, n_params()));
}

std::span<const double> PosteriorSamples::pointwise(int c, int d) const {
    const std::size_t off =
        (static_cast<std::size_t>(c) * n_draws + d) * n_days;
    return {pointwise_loglik.data() + off, static_cast<std::size_t>(n_days)};
}

int PosteriorSamples::param_index(const std::string& name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    return it == names.end() ? -1 : static_cast<int>(it - names.begin());
}

std::vector<double> PosteriorSamples::flat(int p) const {
    std::vector<double> out;
    out.reserve(total_draws());
    for (int c = 0; c < n_chains; ++c) {
        for (int d = 0; d < n_draws; ++d) out.push_back(value(c, d, p));
    }
    return out;
}

std::vector<double> PosteriorSamples::flat(const std::string& name) const {
    const int p = param_index(name);
    if (p < 0) throw std::invalid_argument("unknown parameter: " + name);
    return flat(p);
}

std::vector<std::vector<double>> PosteriorSamples::chains_of(int p) const {
    std::vector<std::vector<double>> out(n_chains);
    for (int c = 0; c < n_chains; ++c) {
        out[c].resize(n_draws);
        for (int d = 0; d < n_draws; ++d) out[c][d] = value(c, d, p);
    }
    return out;
}

namespace {

// Proposal scales on the sampling scale, from the prior spread: roughly
// sd(log x) for log-transformed parameters, sd(x) otherwise.
std::vector<double> initial_scales(ModelKind kind, const PriorSet& priors) {
    const auto names = param_names(kind);
    std::vector<double> s(names.size(), 1.0);
    for (std::size_t i = 0; i < names.size(); ++i) {
        const PriorSpec& spec = priors.at(names[i]);
        double v = 1.0;
        if (transform_of(static_cast<int>(i)) == Transform::Log) {
            v = spec.sd() / spec.mean();
        } else {
            v = spec.sd();
        }
        s[i] = std::clamp(v, 0.05, 2.0);
    }
    return s;
}

} // namespace

PosteriorSamples fit(ModelKind kind, const BuildingDataset& data,
                     const PriorSet& priors, const SamplerConfig& config,
                     std::optional<int> omit_day) {
    config.check(false);
    if (omit_day && (*omit_day < 0 || *omit_day >= data.size())) {
        throw std::invalid_argument("omit_day out of range");
    }
    const auto names = param_names(kind);
    const int dim = static_cast<int>(names.size());
    // resolve all priors now so a missing one fails before sampling
    std::vector<PriorSpec> specs;
    specs.reserve(names.size());
    for (const auto& name : names) specs.push_back(priors.at(name));

    const LogDensity target = [&](std::span<const double> v) {
        double lp = log_prior_with_jacobian(kind, v, priors);
        if (!std::isfinite(lp)) return k_neg_inf;
        const ParameterVector p = to_constrained(kind, v);
        const LogLikelihood ll = log_likelihood(kind, p, data);
        double total = ll.total;
        if (omit_day) {
            if (std::isfinite(ll.pointwise[*omit_day])) {
                total -= ll.pointwise[*omit_day];
            } else if (!std::isfinite(total)) {
                // recompute without the offending day
                total = 0;
                for (int t = 0; t < data.size(); ++t) {
                    if (t != *omit_day) total += ll.pointwise[t];
                }
            }
        }
        const double post = lp + total;
        return std::isnan(post) ? k_neg_inf : post;
    };

    const StartDraw start = [&](std::mt19937_64& rng) {
        ParameterVector p;
        for (int i = 0; i < dim; ++i) p.set(kind, i, specs[i].sample(rng));
        if (!p.valid(kind)) {
            // signal a retry (e.g. a normal prior put |rho1| >= 1)
            return std::vector<double>{};
        }
        return to_unconstrained(kind, p);
    };

    const auto scales = initial_scales(kind, priors);
    const RawChains raw = sample_chains(target, dim, config, start, scales);

    PosteriorSamples out;
    out.kind = kind;
    out.names = names;
    out.n_chains = raw.n_chains;
    out.n_draws = raw.n_draws;
    out.n_days = data.size();
    out.accept_rate = raw.accept_rate;
    out.draws.resize(raw.draws.size());
    out.pointwise_loglik.resize(static_cast<std::size_t>(out.total_draws()) *
                                data.size());
    for (int c = 0; c < out.n_chains; ++c) {
        for (int d = 0; d < out.n_draws; ++d) {
            const ParameterVector p = to_constrained(kind, raw.point(c, d));
            const std::size_t poff =
                (static_cast<std::size_t>(c) * out.n_draws + d) * dim;
            for (int i = 0; i < dim; ++i) {
                out.draws[poff + i] = p.get(kind, i);
            }
            const LogLikelihood ll = log_likelihood(kind, p, data);
            const std::size_t loff =
                (static_cast<std::size_t>(c) * out.n_draws + d) * data.size();
            std::copy(ll.pointwise.begin(), ll.pointwise.end(),
                      out.pointwise_loglik.begin() + loff);
        }
    }
    return out;
}

double rhat(const PosteriorSamples& samples, int p) {
    return split_rhat(samples.chains_of(p));
}

double ess(const PosteriorSamples& samples, int p) {
    return ess(samples.chains_of(p));
}

bool converged(const PosteriorSamples& samples, double threshold) {
    for (int p = 0; p < samples.n_params(); ++p) {
        const double r = rhat(samples, p);
        if (!(r < threshold)) return false;
    }
    return true;
}

} // namespace heatsig
