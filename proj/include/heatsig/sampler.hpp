#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

namespace heatsig {

struct SamplerConfig {
    int chains = 4;
    int warmup_draws = 1000;
    int kept_draws = 2000;
    int thin = 1;                 // proposals per kept draw
    std::uint64_t seed = 0;
    double target_accept = 0.234; // multivariate random-walk optimum
    int adapt_window = 50;        // iterations per scale refresh during warmup

    // Throws std::invalid_argument on violation. Reported fits additionally
    // require kept_draws >= 500; pass reporting = false for scratch runs.
    void check(bool reporting = true) const;
};

// Log density on R^dim. Must return -inf (not NaN) outside support;
// the engine maps NaN to -inf defensively.
using LogDensity = std::function<double(std::span<const double>)>;

// Draws a starting point using the chain's own RNG. Entries may be NaN or
// yield -inf density; the engine retries up to its attempt budget.
using StartDraw = std::function<std::vector<double>(std::mt19937_64&)>;

struct RawChains {
    int dim = 0;
    int n_chains = 0;
    int n_draws = 0;               // kept per chain
    std::vector<double> draws;     // [chain][draw][dim]
    std::vector<double> accept_rate; // per chain, over kept draws

    double value(int c, int d, int k) const {
        return draws[(static_cast<std::size_t>(c) * n_draws + d) * dim + k];
    }
    std::span<const double> point(int c, int d) const {
        return {draws.data() + (static_cast<std::size_t>(c) * n_draws + d) * dim,
                static_cast<std::size_t>(dim)};
    }
};

// Adaptive random-walk Metropolis. Proposals are independent Gaussian
// steps per coordinate, scale = lambda * s_i. During warmup lambda follows
// a Robbins-Monro recursion toward target_accept and the s_i track the
// running marginal standard deviations, refreshed every adapt_window
// iterations; both are frozen when sampling starts. Chain c uses
// mt19937_64(seed ^ c), so chains are reproducible individually and
// independent of execution order.
//
// init_scales seeds the s_i (defaults to all ones). Throws NonFiniteStart
// if no finite starting point is found in 100 attempts per chain, and
// AllProposalsRejected if a full adaptation window accepts nothing.
RawChains sample_chains(const LogDensity& target, int dim,
                        const SamplerConfig& config, const StartDraw& start,
                        std::span<const double> init_scales = {});

// Convergence and mixing diagnostics on generic per-chain scalar series.
// split_rhat halves each chain before the between/within comparison.
double split_rhat(const std::vector<std::vector<double>>& chains);

// Effective sample size from chain-averaged autocorrelations, summed over
// Geyer initial positive pairs.
double ess(const std::vector<std::vector<double>>& chains);

} // namespace heatsig
