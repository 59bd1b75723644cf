#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "heatsig/model.hpp"
#include "heatsig/priors.hpp"
#include "heatsig/sampler.hpp"
#include "heatsig/series.hpp"

namespace heatsig {

// Sampling runs in an unconstrained space:
//   log for the positive parameters (all but T_base, rho1, nu),
//   atanh for rho1 (keeps |rho1| < 1), identity for T_base and nu.
std::vector<double> to_unconstrained(ModelKind kind, const ParameterVector& p);
ParameterVector to_constrained(ModelKind kind, std::span<const double> v);

// log |d constrained / d unconstrained| at v; added to densities stated on
// the constrained scale.
double log_jacobian(ModelKind kind, std::span<const double> v);

// Prior density of the constrained point plus the transform Jacobian,
// i.e. the prior expressed in the sampling space. Throws MissingPrior if a
// parameter of this family has no entry.
double log_prior_with_jacobian(ModelKind kind, std::span<const double> v,
                               const PriorSet& priors);

// Unnormalized posterior in the sampling space. Never NaN: any non-finite
// intermediate collapses to -inf.
double log_posterior(ModelKind kind, std::span<const double> v,
                     const BuildingDataset& data, const PriorSet& priors);

struct PosteriorSamples {
    ModelKind kind = ModelKind::Es;
    std::vector<std::string> names;
    int n_chains = 0;
    int n_draws = 0; // kept per chain
    int n_days = 0;

    // Constrained-scale draws, [chain][draw][param].
    std::vector<double> draws;
    // Per-day log likelihood at each kept draw, [chain][draw][day].
    // Rows sum to the draw's total log likelihood.
    std::vector<double> pointwise_loglik;
    std::vector<double> accept_rate; // per chain

    int n_params() const { return static_cast<int>(names.size()); }
    int total_draws() const { return n_chains * n_draws; }

    double value(int c, int d, int p) const;
    ParameterVector at(int c, int d) const;
    std::span<const double> pointwise(int c, int d) const;

    int param_index(const std::string& name) const; // -1 if absent
    // All draws of one parameter, chain-major.
    std::vector<double> flat(int p) const;
    std::vector<double> flat(const std::string& name) const;
    // Same values split per chain (for rhat / ess).
    std::vector<std::vector<double>> chains_of(int p) const;
};

// Posterior sampling for one building. Starting points are prior draws,
// retried until the posterior is finite. Kept draws are mapped back to the
// constrained scale and their pointwise log likelihood is evaluated on
// data as stored.
//
// omit_day excludes that day's likelihood term from the target (its
// pointwise row entries are still evaluated and stored), which turns a
// one-day dataset with omit_day = 0 into a prior-only run. Reported fits
// leave it empty.
PosteriorSamples fit(ModelKind kind, const BuildingDataset& data,
                     const PriorSet& priors, const SamplerConfig& config,
                     std::optional<int> omit_day = std::nullopt);

// Split-chain rhat / ESS for one parameter of a fit.
double rhat(const PosteriorSamples& samples, int p);
double ess(const PosteriorSamples& samples, int p);

// True when every parameter's split rhat is below 1.05.
bool converged(const PosteriorSamples& samples, double threshold = 1.05);

} // namespace heatsig
