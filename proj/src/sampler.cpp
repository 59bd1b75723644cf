#include "heatsig/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "heatsig/errors.hpp"

namespace heatsig {

namespace {

constexpr double k_neg_inf = -std::numeric_limits<double>::infinity();
constexpr int k_start_attempts = 100;

double sanitize(double lp) { return std::isnan(lp) ? k_neg_inf : lp; }

// Running mean/variance per coordinate (Welford).
struct RunningMoments {
    explicit RunningMoments(int dim) : mean(dim, 0.0), m2(dim, 0.0) {}
    void add(std::span<const double> x) {
        ++n;
        for (std::size_t i = 0; i < mean.size(); ++i) {
            const double d = x[i] - mean[i];
            mean[i] += d / n;
            m2[i] += d * (x[i] - mean[i]);
        }
    }
    double variance(std::size_t i) const {
        return n > 1 ? m2[i] / (n - 1) : 0.0;
    }
    long n = 0;
    std::vector<double> mean;
    std::vector<double> m2;
};

} // namespace

void SamplerConfig::check(bool reporting) const {
    if (chains < 2) throw std::invalid_argument("need at least 2 chains");
    if (warmup_draws < 1) throw std::invalid_argument("warmup_draws must be >= 1");
    if (kept_draws < 1) throw std::invalid_argument("kept_draws must be >= 1");
    if (thin < 1) throw std::invalid_argument("thin must be >= 1");
    if (reporting && kept_draws < 500) {
        throw std::invalid_argument("reported fits need kept_draws >= 500");
    }
    if (!(target_accept > 0 && target_accept < 1)) {
        throw std::invalid_argument("target_accept must be in (0, 1)");
    }
    if (adapt_window < 1) throw std::invalid_argument("adapt_window must be >= 1");
}

RawChains sample_chains(const LogDensity& target, int dim,
                        const SamplerConfig& config, const StartDraw& start,
                        std::span<const double> init_scales) {
    config.check(false);
    if (dim < 1) throw std::invalid_argument("dim must be >= 1");
    if (!init_scales.empty() && static_cast<int>(init_scales.size()) != dim) {
        throw std::invalid_argument("init_scales size mismatch");
    }

    RawChains out;
    out.dim = dim;
    out.n_chains = config.chains;
    out.n_draws = config.kept_draws;
    out.draws.resize(static_cast<std::size_t>(config.chains) *
                     config.kept_draws * dim);
    out.accept_rate.resize(config.chains, 0.0);

    for (int c = 0; c < config.chains; ++c) {
        std::mt19937_64 rng(config.seed ^ static_cast<std::uint64_t>(c));
        std::normal_distribution<double> unit(0.0, 1.0);
        std::uniform_real_distribution<double> uniform(0.0, 1.0);

        // starting point: retry prior draws until the density is finite
        std::vector<double> x;
        double lp = k_neg_inf;
        bool found = false;
        for (int attempt = 0; attempt < k_start_attempts; ++attempt) {
            std::vector<double> cand = start(rng);
            if (static_cast<int>(cand.size()) != dim) continue;
            if (std::any_of(cand.begin(), cand.end(),
                            [](double v) { return !std::isfinite(v); })) {
                continue;
            }
            const double cand_lp = sanitize(target(cand));
            if (std::isfinite(cand_lp)) {
                x = std::move(cand);
                lp = cand_lp;
                found = true;
                break;
            }
        }
        if (!found) {
            throw NonFiniteStart("chain " + std::to_string(c) + ": no finite start in " +
                                 std::to_string(k_start_attempts) + " attempts");
        }

        std::vector<double> scale(dim, 1.0);
        if (!init_scales.empty()) {
            for (int i = 0; i < dim; ++i) {
                scale[i] = init_scales[i] > 0 ? init_scales[i] : 1.0;
            }
        }
        double log_lambda = std::log(2.38 / std::sqrt(double(dim)));
        std::vector<double> prop(dim);

        // settle phase: walk in from the overdispersed start before the
        // calibrated adaptation begins. While the chain is still climbing,
        // almost any uphill proposal is accepted no matter how large, so the
        // acceptance rate carries no step-size signal and Robbins-Monro would
        // overshoot. Here the step reacts only to accept/reject streaks, and
        // the phase ends once the log density stops improving.
        {
            int accepts = 0;
            int accept_streak = 0;
            int reject_streak = 0;
            int since_progress = 0;
            double best_lp = lp;
            for (int tries = 0; tries < 5000 && since_progress < 100; ++tries) {
                const double lambda = std::exp(log_lambda);
                for (int i = 0; i < dim; ++i) {
                    prop[i] = x[i] + lambda * scale[i] * unit(rng);
                }
                const double prop_lp = sanitize(target(prop));
                if (std::log(uniform(rng)) < prop_lp - lp) {
                    x = prop;
                    lp = prop_lp;
                    ++accepts;
                    reject_streak = 0;
                    if (++accept_streak == 5) {
                        log_lambda += std::log(1.3);
                        accept_streak = 0;
                    }
                } else {
                    accept_streak = 0;
                    if (++reject_streak == 5) {
                        log_lambda += std::log(0.7);
                        reject_streak = 0;
                    }
                }
                if (lp > best_lp + 1.0) {
                    best_lp = lp;
                    since_progress = 0;
                } else {
                    ++since_progress;
                }
            }
            if (accepts == 0) {
                throw AllProposalsRejected("chain " + std::to_string(c) +
                                           ": stuck at its starting point");
            }
        }

        RunningMoments moments(dim);
        int window_accepts = 0;
        for (int it = 1; it <= config.warmup_draws; ++it) {
            const double lambda = std::exp(log_lambda);
            for (int i = 0; i < dim; ++i) {
                prop[i] = x[i] + lambda * scale[i] * unit(rng);
            }
            const double prop_lp = sanitize(target(prop));
            const double log_alpha = prop_lp - lp;
            const double alpha = std::min(1.0, std::exp(log_alpha));
            if (std::log(uniform(rng)) < log_alpha) {
                x = prop;
                lp = prop_lp;
                ++window_accepts;
            }
            moments.add(x);
            // Robbins-Monro step toward the target acceptance rate. The gain
            // restarts each adapt window: a single cooling schedule goes cold
            // during the climb from an overdispersed start, and a step size
            // that overshoots there can no longer be pulled back.
            const int it_window = (it - 1) % config.adapt_window + 1;
            log_lambda += std::pow(double(5 + it_window), -0.6) *
                          (alpha - config.target_accept);
            if (it % config.adapt_window == 0) {
                if (window_accepts == 0) {
                    throw AllProposalsRejected(
                        "chain " + std::to_string(c) + ": no accepted proposal in " +
                        std::to_string(config.adapt_window) +
                        " warmup iterations");
                }
                window_accepts = 0;
                for (int i = 0; i < dim; ++i) {
                    const double v = moments.variance(i);
                    if (v > 0) scale[i] = std::sqrt(v);
                }
                // window-local variance so early transients wash out
                moments = RunningMoments(dim);
            }
        }

        // sampling phase, proposal frozen
        const double lambda = std::exp(log_lambda);
        long accepts = 0;
        for (int d = 0; d < config.kept_draws; ++d) {
            for (int s = 0; s < config.thin; ++s) {
                for (int i = 0; i < dim; ++i) {
                    prop[i] = x[i] + lambda * scale[i] * unit(rng);
                }
                const double prop_lp = sanitize(target(prop));
                if (std::log(uniform(rng)) < prop_lp - lp) {
                    x = prop;
                    lp = prop_lp;
                    ++accepts;
                }
            }
            double* row = out.draws.data() +
                          (static_cast<std::size_t>(c) * config.kept_draws + d) * dim;
            std::copy(x.begin(), x.end(), row);
        }
        out.accept_rate[c] = double(accepts) /
                             (double(config.kept_draws) * config.thin);
    }
    return out;
}

namespace {

double sample_mean(const std::vector<double>& xs) {
    double s = 0;
    for (double x : xs) s += x;
    return s / double(xs.size());
}

double sample_var(const std::vector<double>& xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double s = 0;
    for (double x : xs) s += (x - mean) * (x - mean);
    return s / double(xs.size() - 1);
}

std::vector<std::vector<double>> split_in_half(
    const std::vector<std::vector<double>>& chains) {
    std::vector<std::vector<double>> halves;
    for (const auto& ch : chains) {
        const std::size_t h = ch.size() / 2;
        if (h == 0) continue;
        halves.emplace_back(ch.begin(), ch.begin() + h);
        halves.emplace_back(ch.end() - h, ch.end());
    }
    return halves;
}

} // namespace

double split_rhat(const std::vector<std::vector<double>>& chains) {
    const auto halves = split_in_half(chains);
    const std::size_t m = halves.size();
    if (m < 2) return std::numeric_limits<double>::quiet_NaN();
    const std::size_t n = halves.front().size();
    for (const auto& h : halves) {
        if (h.size() != n) throw std::invalid_argument("unequal chain lengths");
    }
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();

    std::vector<double> means(m);
    double w = 0;
    for (std::size_t j = 0; j < m; ++j) {
        means[j] = sample_mean(halves[j]);
        w += sample_var(halves[j], means[j]);
    }
    w /= double(m);
    const double grand = sample_mean(means);
    double b_over_n = sample_var(means, grand); // B/n in the classic notation
    if (w == 0) {
        // all-constant chains are trivially converged; disagreeing constant
        // chains are maximally unconverged
        return b_over_n == 0 ? 1.0 : std::numeric_limits<double>::infinity();
    }
    const double var_plus = (double(n - 1) / double(n)) * w + b_over_n;
    return std::sqrt(var_plus / w);
}

double ess(const std::vector<std::vector<double>>& chains) {
    const std::size_t m = chains.size();
    if (m == 0) return 0;
    const std::size_t n = chains.front().size();
    for (const auto& ch : chains) {
        if (ch.size() != n) throw std::invalid_argument("unequal chain lengths");
    }
    if (n < 4) return double(m * n);

    // chain-averaged autocorrelation, each chain centered on its own mean
    double denom = 0;
    std::vector<std::vector<double>> centered(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double mu = sample_mean(chains[j]);
        centered[j].resize(n);
        for (std::size_t t = 0; t < n; ++t) centered[j][t] = chains[j][t] - mu;
        for (std::size_t t = 0; t < n; ++t) denom += centered[j][t] * centered[j][t];
    }
    if (denom == 0) return double(m * n);
    auto rho = [&](std::size_t lag) {
        double s = 0;
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t t = 0; t + lag < n; ++t) {
                s += centered[j][t] * centered[j][t + lag];
            }
        }
        return s / denom;
    };

    // Geyer initial positive sequence over lag pairs; evaluated lazily,
    // mixing chains rarely need more than a few dozen lags
    double tau = -1.0; // each pair (2k, 2k+1) is added once, double-counting rho_0
    for (std::size_t k = 0; 2 * k + 1 < n; ++k) {
        const double pair = rho(2 * k) + rho(2 * k + 1);
        if (pair <= 0) break;
        tau += 2.0 * pair;
    }
    tau = std::max(tau, 1.0 / double(m * n));
    const double total = double(m * n);
    return std::min(total, total / tau);
}

} // namespace heatsig
