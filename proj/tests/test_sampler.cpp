#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "heatsig/errors.hpp"
#include "heatsig/sampler.hpp"

using namespace heatsig;

namespace {

// per-chain scalar series for one coordinate, as the diagnostics expect
std::vector<std::vector<double>> coordinate_chains(const RawChains& raw, int k) {
    std::vector<std::vector<double>> out(raw.n_chains);
    for (int c = 0; c < raw.n_chains; ++c) {
        out[c].resize(raw.n_draws);
        for (int d = 0; d < raw.n_draws; ++d) out[c][d] = raw.value(c, d, k);
    }
    return out;
}

} // namespace

TEST_CASE("sampler config validation") {
    SamplerConfig cfg;
    CHECK_NOTHROW(cfg.check());

    SamplerConfig bad = cfg;
    bad.chains = 1;
    CHECK_THROWS_AS(bad.check(), std::invalid_argument);

    bad = cfg;
    bad.warmup_draws = 0;
    CHECK_THROWS_AS(bad.check(), std::invalid_argument);

    bad = cfg;
    bad.kept_draws = 0;
    CHECK_THROWS_AS(bad.check(false), std::invalid_argument);

    bad = cfg;
    bad.thin = 0;
    CHECK_THROWS_AS(bad.check(false), std::invalid_argument);

    bad = cfg;
    bad.kept_draws = 499;
    CHECK_THROWS_AS(bad.check(), std::invalid_argument); // reporting floor
    CHECK_NOTHROW(bad.check(false));                     // scratch run is fine

    bad = cfg;
    bad.target_accept = 1.0;
    CHECK_THROWS_AS(bad.check(), std::invalid_argument);
    bad.target_accept = 0.0;
    CHECK_THROWS_AS(bad.check(), std::invalid_argument);

    bad = cfg;
    bad.adapt_window = 0;
    CHECK_THROWS_AS(bad.check(), std::invalid_argument);
}

TEST_CASE("argument validation in sample_chains") {
    const LogDensity flat = [](std::span<const double>) { return 0.0; };
    const StartDraw start = [](std::mt19937_64&) {
        return std::vector<double>{0.0};
    };
    SamplerConfig cfg;
    cfg.kept_draws = 10;
    cfg.warmup_draws = 50;
    CHECK_THROWS_AS(sample_chains(flat, 0, cfg, start), std::invalid_argument);
    const std::vector<double> wrong{1.0, 1.0};
    CHECK_THROWS_AS(sample_chains(flat, 1, cfg, start, wrong),
                    std::invalid_argument);
}

TEST_CASE("samples a separated-scale gaussian to its known moments") {
    // two independent components with very different scales; the adaptation
    // has to find both marginal sds for this to mix at all
    const double mu0 = 2.5, sd0 = 1.7;
    const double mu1 = -1.0, sd1 = 12.0;
    const LogDensity target = [&](std::span<const double> x) {
        const double z0 = (x[0] - mu0) / sd0;
        const double z1 = (x[1] - mu1) / sd1;
        return -0.5 * (z0 * z0 + z1 * z1);
    };
    const StartDraw start = [](std::mt19937_64& rng) {
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        return std::vector<double>{5.0 * u(rng), 50.0 * u(rng)};
    };

    SamplerConfig cfg;
    cfg.chains = 4;
    cfg.warmup_draws = 1000;
    cfg.kept_draws = 1500;
    cfg.thin = 3;
    cfg.seed = 20240814;

    const RawChains raw = sample_chains(target, 2, cfg, start);
    REQUIRE(raw.n_chains == 4);
    REQUIRE(raw.n_draws == 1500);
    REQUIRE(raw.dim == 2);
    for (double a : raw.accept_rate) {
        CHECK(a > 0.08);
        CHECK(a < 0.5);
    }

    const double mus[2] = {mu0, mu1};
    const double sds[2] = {sd0, sd1};
    for (int k = 0; k < 2; ++k) {
        const auto chains = coordinate_chains(raw, k);
        CHECK(split_rhat(chains) < 1.05);
        const double n_eff = ess(chains);
        CHECK(n_eff > 200.0);

        double mean = 0;
        int n = 0;
        for (const auto& ch : chains) {
            for (double v : ch) { mean += v; ++n; }
        }
        mean /= n;
        double var = 0;
        for (const auto& ch : chains) {
            for (double v : ch) var += (v - mean) * (v - mean);
        }
        var /= (n - 1);

        const double se_mean = sds[k] / std::sqrt(n_eff);
        CHECK(std::abs(mean - mus[k]) < 4.0 * se_mean);
        const double se_sd = sds[k] / std::sqrt(2.0 * n_eff);
        CHECK(std::abs(std::sqrt(var) - sds[k]) < 5.0 * se_sd);
    }
}

TEST_CASE("chains are reproducible from the seed alone") {
    const LogDensity target = [](std::span<const double> x) {
        return -0.5 * x[0] * x[0];
    };
    const StartDraw start = [](std::mt19937_64& rng) {
        std::normal_distribution<double> n(0.0, 3.0);
        return std::vector<double>{n(rng)};
    };
    SamplerConfig cfg;
    cfg.chains = 2;
    cfg.warmup_draws = 200;
    cfg.kept_draws = 100;
    cfg.seed = 99;

    const RawChains a = sample_chains(target, 1, cfg, start);
    const RawChains b = sample_chains(target, 1, cfg, start);
    REQUIRE(a.draws.size() == b.draws.size());
    CHECK(a.draws == b.draws);
    CHECK(a.accept_rate == b.accept_rate);

    cfg.seed = 100;
    const RawChains c = sample_chains(target, 1, cfg, start);
    CHECK(a.draws != c.draws);
}

TEST_CASE("hopeless starting points raise NonFiniteStart") {
    SamplerConfig cfg;
    cfg.kept_draws = 10;
    cfg.warmup_draws = 50;

    const LogDensity fine = [](std::span<const double> x) {
        return -0.5 * x[0] * x[0];
    };
    const StartDraw nan_start = [](std::mt19937_64&) {
        return std::vector<double>{std::numeric_limits<double>::quiet_NaN()};
    };
    CHECK_THROWS_AS(sample_chains(fine, 1, cfg, nan_start), NonFiniteStart);

    const LogDensity nowhere = [](std::span<const double>) {
        return -std::numeric_limits<double>::infinity();
    };
    const StartDraw origin = [](std::mt19937_64&) {
        return std::vector<double>{0.0};
    };
    CHECK_THROWS_AS(sample_chains(nowhere, 1, cfg, origin), NonFiniteStart);
}

TEST_CASE("a chain that can never move raises AllProposalsRejected") {
    // the only point of positive density is the exact starting point, which
    // no gaussian proposal ever hits again
    const LogDensity point_mass = [](std::span<const double> x) {
        return x[0] == 7.25 ? 0.0
                            : -std::numeric_limits<double>::infinity();
    };
    const StartDraw start = [](std::mt19937_64&) {
        return std::vector<double>{7.25};
    };
    SamplerConfig cfg;
    cfg.kept_draws = 10;
    cfg.warmup_draws = 50;
    CHECK_THROWS_WITH_AS(sample_chains(point_mass, 1, cfg, start),
                         doctest::Contains("stuck"), AllProposalsRejected);
}

TEST_CASE("split rhat hand-computed anchor") {
    // halves (1,2) (3,4) (1,2) (3,4): W = 1/2, B/n = 4/3,
    // var+ = 1/4 + 4/3 = 19/12, rhat = sqrt(19/6)
    const std::vector<std::vector<double>> chains{{1, 2, 3, 4}, {1, 2, 3, 4}};
    CHECK(split_rhat(chains) ==
          doctest::Approx(std::sqrt(19.0 / 6.0)).epsilon(1e-12));
}

TEST_CASE("split rhat edge cases") {
    CHECK(split_rhat({{2, 2, 2, 2}, {2, 2, 2, 2}}) == 1.0);
    CHECK(std::isinf(split_rhat({{1, 1, 1, 1}, {2, 2, 2, 2}})));

    // a single chain is diagnosed against its own halves
    const double one = split_rhat({{1, 2, 3, 4, 5, 6, 7, 8}});
    CHECK(std::isfinite(one));
    CHECK(one > 1.5); // strong trend: halves disagree

    CHECK(std::isnan(split_rhat({{1, 2, 3}})));      // halves of length 1
    CHECK(std::isnan(split_rhat({{1}, {2}})));       // nothing to split
    CHECK(std::isnan(split_rhat({})));
    CHECK_THROWS_AS(split_rhat({{1, 2, 3, 4}, {1, 2}}), std::invalid_argument);
}

TEST_CASE("ess tracks independence and trends") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> unit(0.0, 1.0);
    std::vector<std::vector<double>> iid(4, std::vector<double>(2000));
    for (auto& ch : iid) {
        for (double& v : ch) v = unit(rng);
    }
    const double n_iid = ess(iid);
    CHECK(n_iid > 4000.0);   // close to the nominal 8000
    CHECK(n_iid <= 8000.0);  // never exceeds the draw count

    std::vector<std::vector<double>> trend(2, std::vector<double>(500));
    for (auto& ch : trend) {
        for (int t = 0; t < 500; ++t) ch[t] = t;
    }
    CHECK(ess(trend) < 50.0); // perfectly autocorrelated

    CHECK(ess({}) == 0.0);
    CHECK(ess({{1, 2, 3}}) == 3.0);                 // too short to estimate
    CHECK(ess({{5, 5, 5, 5, 5}}) == 5.0);           // constant series
}
