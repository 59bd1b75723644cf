#include "heatsig/priors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "heatsig/errors.hpp"

namespace heatsig {

std::pair<double, double> gamma_convert(double a, double b, GammaParam from,
                                        GammaParam to) {
    if (!(a > 0) || !(b > 0)) {
        throw std::invalid_argument("gamma parameters must be positive");
    }
    if (from == to) return {a, b};
    if (from == GammaParam::MeanSd) {
        // shape = mean^2 / sd^2, rate = mean / sd^2
        return {a * a / (b * b), a / (b * b)};
    }
    // shape/rate -> mean = shape/rate, sd = sqrt(shape)/rate
    return {a / b, std::sqrt(a) / b};
}

PriorSpec::PriorSpec(PriorFamily family, double a, double b, GammaParam gp)
    : family_(family), a_(a), b_(b), gamma_param_(gp) {
    if (family_ == PriorFamily::Gamma) {
        if (!(a_ > 0) || !(b_ > 0)) {
            throw std::invalid_argument("gamma prior needs positive parameters");
        }
    } else {
        if (!(b_ > 0)) {
            throw std::invalid_argument("normal prior needs positive sd");
        }
        if (!std::isfinite(a_)) {
            throw std::invalid_argument("normal prior mean must be finite");
        }
    }
}

PriorSpec PriorSpec::gamma_mean_sd(double mean, double sd) {
    return PriorSpec(PriorFamily::Gamma, mean, sd, GammaParam::MeanSd);
}

PriorSpec PriorSpec::gamma_shape_rate(double shape, double rate) {
    return PriorSpec(PriorFamily::Gamma, shape, rate, GammaParam::ShapeRate);
}

PriorSpec PriorSpec::normal(double mean, double sd) {
    return PriorSpec(PriorFamily::Normal, mean, sd, GammaParam::MeanSd);
}

std::pair<double, double> PriorSpec::shape_rate() const {
    if (family_ != PriorFamily::Gamma) {
        throw std::invalid_argument("shape_rate on a non-gamma prior");
    }
    return gamma_convert(a_, b_, gamma_param_, GammaParam::ShapeRate);
}

double PriorSpec::mean() const {
    if (family_ == PriorFamily::Normal) return a_;
    auto [shape, rate] = shape_rate();
    return shape / rate;
}

double PriorSpec::sd() const {
    if (family_ == PriorFamily::Normal) return b_;
    auto [shape, rate] = shape_rate();
    return std::sqrt(shape) / rate;
}

double PriorSpec::log_pdf(double x) const {
    if (family_ == PriorFamily::Normal) {
        const double z = (x - a_) / b_;
        return -0.5 * z * z - std::log(b_) -
               0.5 * std::log(2.0 * std::numbers::pi);
    }
    if (!(x > 0)) return -std::numeric_limits<double>::infinity();
    auto [shape, rate] = shape_rate();
    return shape * std::log(rate) - std::lgamma(shape) +
           (shape - 1.0) * std::log(x) - rate * x;
}

double PriorSpec::sample(std::mt19937_64& rng) const {
    if (family_ == PriorFamily::Normal) {
        return std::normal_distribution<double>(a_, b_)(rng);
    }
    auto [shape, rate] = shape_rate();
    // std::gamma_distribution is shape/scale
    return std::gamma_distribution<double>(shape, 1.0 / rate)(rng);
}

bool PriorSet::contains(const std::string& name) const {
    return specs_.count(name) != 0;
}

const PriorSpec& PriorSet::at(const std::string& name) const {
    auto it = specs_.find(name);
    if (it == specs_.end()) {
        throw MissingPrior("no prior assigned for parameter " + name);
    }
    return it->second;
}

void PriorSet::set(const std::string& name, PriorSpec spec) {
    specs_.insert_or_assign(name, spec);
}

PriorSet default_priors() {
    PriorSet set;
    set.set("UA0", PriorSpec::gamma_mean_sd(4.75, 0.3));
    set.set("UA_wind", PriorSpec::gamma_mean_sd(0.27, 0.02));
    set.set("T_base", PriorSpec::normal(18.0, 1.2));
    set.set("gA", PriorSpec::gamma_mean_sd(4.0, 0.075));
    set.set("Phi_base", PriorSpec::gamma_mean_sd(0.5, 0.5));
    set.set("k", PriorSpec::gamma_mean_sd(1.0, 1.0));
    set.set("sigma_winter", PriorSpec::gamma_mean_sd(4.25, 0.82));
    set.set("sigma_reduction", PriorSpec::gamma_mean_sd(4.25, 0.82));
    set.set("rho1", PriorSpec::normal(0.0, 0.3));
    set.set("nu1", PriorSpec::normal(0.0, 0.2));
    set.set("nu2", PriorSpec::normal(0.0, 0.2));
    set.set("nu3", PriorSpec::normal(0.0, 0.2));
    return set;
}

} // namespace heatsig
