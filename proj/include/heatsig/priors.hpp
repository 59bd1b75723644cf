#pragma once

#include <map>
#include <random>
#include <string>
#include <utility>

namespace heatsig {

enum class PriorFamily { Gamma, Normal };

// Gamma parameterizations. MeanSd is the user-facing default; ShapeRate is
// the canonical form used for density evaluation and sampling.
enum class GammaParam { MeanSd, ShapeRate };

// Converts (a, b) between Gamma parameterizations.
// MeanSd -> ShapeRate: shape = mean^2 / sd^2, rate = mean / sd^2.
std::pair<double, double> gamma_convert(double a, double b,
                                        GammaParam from, GammaParam to);

class PriorSpec {
public:
    static PriorSpec gamma_mean_sd(double mean, double sd);
    static PriorSpec gamma_shape_rate(double shape, double rate);
    static PriorSpec normal(double mean, double sd);

    PriorFamily family() const { return family_; }
    // Raw parameters as given, interpreted per family and gamma_param.
    double a() const { return a_; }
    double b() const { return b_; }
    GammaParam gamma_param() const { return gamma_param_; }

    double mean() const;
    double sd() const;
    // Gamma only: canonical (shape, rate).
    std::pair<double, double> shape_rate() const;

    // Log density. Gamma support is x > 0; outside support returns -inf.
    double log_pdf(double x) const;
    double sample(std::mt19937_64& rng) const;

private:
    PriorSpec(PriorFamily family, double a, double b, GammaParam gp);

    PriorFamily family_;
    double a_;
    double b_;
    GammaParam gamma_param_;
};

// Priors keyed by parameter name ("UA0", "T_base", ...).
class PriorSet {
public:
    PriorSet() = default;
    explicit PriorSet(std::map<std::string, PriorSpec> specs)
        : specs_(std::move(specs)) {}

    bool contains(const std::string& name) const;
    // Throws MissingPrior if absent.
    const PriorSpec& at(const std::string& name) const;
    void set(const std::string& name, PriorSpec spec);

    const std::map<std::string, PriorSpec>& specs() const { return specs_; }

private:
    std::map<std::string, PriorSpec> specs_;
};

// Defaults for single-building district heating fits. Covers every
// parameter of the largest model so any subset model is also covered.
PriorSet default_priors();

} // namespace heatsig
