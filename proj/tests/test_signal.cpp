#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "oracle_helpers.hpp"
#include "revsim/quadrature.hpp"
#include "revsim/signal.hpp"

using namespace revsim;

namespace {
const ModelParams kParams;  // H=3, L=0, c=1, beta=0.9, p1=0.5
const GaussianSignal kSig(3.0, 0.0, 4.0);
}  // namespace

TEST_CASE("log-likelihood ratio: Gaussian closed form and MLRP") {
    CHECK(log_likelihood_ratio(kSig, 1.5) == doctest::Approx(0.0).epsilon(1e-15));
    // ln f_H(3) - ln f_L(3) evaluated from the normal log-density directly
    CHECK(log_likelihood_ratio(kSig, 3.0) == doctest::Approx(0.28125).epsilon(1e-12));
    CHECK(log_likelihood_ratio(kSig, 0.0) < log_likelihood_ratio(kSig, 2.0));
    CHECK_THROWS_AS((void)kSig.loglr(std::numeric_limits<double>::infinity()),
                    std::domain_error);

    // inverse round trip
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    for (int i = 0; i < 100; ++i) {
        const double v = u(rng);
        CHECK(kSig.loglr_inv(kSig.loglr(v)) == doctest::Approx(v).epsilon(1e-12));
    }
}

TEST_CASE("posterior_b: degenerate priors and midpoint neutrality") {
    CHECK(posterior_b(kSig, 0.0, 7.3) == 0.0);
    CHECK(posterior_b(kSig, 1.0, -4.0) == 1.0);
    CHECK(posterior_b(kSig, 0.5, 1.5) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(posterior_b(kSig, 1.0 / 3.0, 1.5) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("log-odds additivity to 1e-12 on randomized (p, v)") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> up(0.01, 0.99), uv(-15.0, 18.0);
    for (int i = 0; i < 500; ++i) {
        const double p = up(rng), v = uv(rng);
        const double b = posterior_b(kSig, p, v);
        CHECK(logit(b) - logit(p) == doctest::Approx(kSig.loglr(v)).epsilon(1e-12));
    }
}

TEST_CASE("posterior_cdf: limits, FOSD, frozen value, degenerate prior") {
    CHECK(posterior_cdf(kSig, Quality::High, 0.0, 0.5) == 0.0);
    CHECK(posterior_cdf(kSig, Quality::High, 1.0, 0.5) == 1.0);
    // Phi_H(0.5|0.5) = F_H(1.5); standard normal cdf at -0.375
    CHECK(posterior_cdf(kSig, Quality::High, 0.5, 0.5) ==
          doctest::Approx(0.3538302333272762).epsilon(1e-12));
    for (int i = 1; i < 1000; ++i) {
        const double b = i / 1000.0;
        CHECK(posterior_cdf(kSig, Quality::High, b, 0.4) <=
              posterior_cdf(kSig, Quality::Low, b, 0.4) + 1e-15);
    }
    CHECK_THROWS_AS((void)posterior_cdf(kSig, Quality::High, 0.5, 0.0), std::domain_error);
    CHECK_THROWS_AS((void)posterior_mixture(kSig, 0.5, 1.0), std::domain_error);
}

TEST_CASE("round trip: posterior_cdf at posterior_b(p,v) equals F_theta(v)") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> up(0.02, 0.98), uv(-12.0, 15.0);
    for (int i = 0; i < 300; ++i) {
        const double p = up(rng), v = uv(rng);
        const double b = posterior_b(kSig, p, v);
        CHECK(posterior_cdf(kSig, Quality::High, b, p) ==
              doctest::Approx(kSig.cdf(Quality::High, v)).epsilon(1e-10));
        CHECK(posterior_cdf(kSig, Quality::Low, b, p) ==
              doctest::Approx(kSig.cdf(Quality::Low, v)).epsilon(1e-10));
    }
}

TEST_CASE("posterior mixture: density matches change of variables and integrates to 1") {
    const GaussLegendre gl(64);
    const auto range = kSig.effective_range(1e-14);
    for (double p : {0.34, 0.5, 0.9}) {
        // integral of phi(b) db recovered in v-space: phi(b(v)) db/dv dv
        const double total = gl.integrate(
            [&](double v) {
                const double b = posterior_b(kSig, p, v);
                const double dbdv = b * (1.0 - b) * kSig.loglr_slope(v);
                return posterior_mixture(kSig, b, p).density * dbdv;
            },
            range.first, range.second, 16);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-8));

        // martingale by quadrature: int b dPhi(b|p) = p
        const double mean = gl.integrate(
            [&](double v) {
                const double fmix = p * kSig.pdf(Quality::High, v) +
                                    (1.0 - p) * kSig.pdf(Quality::Low, v);
                return posterior_b(kSig, p, v) * fmix;
            },
            range.first, range.second, 16);
        CHECK(mean == doctest::Approx(p).epsilon(1e-8));
    }
    // density positive and finite across (0,1)
    for (double b : {1e-6, 0.01, 0.3, 0.501, 0.9, 1.0 - 1e-6}) {
        const auto m = posterior_mixture(kSig, b, 0.4);
        CHECK(m.density > 0.0);
        CHECK(std::isfinite(m.density));
    }
}

TEST_CASE("interval_mean: martingale, local-midpoint limit, frozen oracle values") {
    for (double p : {0.34, 0.4, 0.5, 0.77, 0.98})
        CHECK(interval_mean(kSig, p, 0.0, 1.0) == doctest::Approx(p).epsilon(1e-8));

    // shrinking interval converges to its midpoint
    CHECK(interval_mean(kSig, 0.5, 0.40, 0.40001) ==
          doctest::Approx(0.400005).epsilon(1e-7));

    // frozen from the Riemann oracle (1e6-node trapezoid in belief space)
    CHECK(interval_mean(kSig, 0.5, 0.2, 0.8) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(interval_mean(kSig, 0.5, 0.3, 0.9) ==
          doctest::Approx(0.5452691158916274).epsilon(1e-7));
    CHECK(interval_mean(kSig, 0.7, 0.2, 0.8) ==
          doctest::Approx(0.6328442164497079).epsilon(1e-7));
    CHECK(interval_mean(kSig, 0.34, 0.1, 0.5) ==
          doctest::Approx(0.2943059172147033).epsilon(1e-7));

    // and a fresh randomized comparison against the oracle route
    oracle::Gauss g;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> up(0.1, 0.9);
    for (int i = 0; i < 4; ++i) {
        const double p = up(rng);
        double l = up(rng), r = up(rng);
        if (l > r) std::swap(l, r);
        if (r - l < 0.05) r = l + 0.05;
        CHECK(interval_mean(kSig, p, l, r) ==
              doctest::Approx(oracle::riemann_interval_mean(g, p, l, r, 200001))
                  .epsilon(1e-6));
    }

    CHECK_THROWS_AS((void)interval_mean(kSig, 0.5, 0.4, 0.4), std::invalid_argument);
    // a far-tail interval carries no numerical mass
    CHECK_THROWS_AS(
        (void)interval_mean(kSig, 0.5, 1.0 - 1e-12, 1.0 - 1e-13), SolveError);
}

TEST_CASE("sample_value: determinism, LLN, KS against the cdf") {
    std::mt19937_64 a(42), b(42);
    for (int i = 0; i < 32; ++i)
        CHECK(sample_value(kSig, Quality::High, a) == sample_value(kSig, Quality::High, b));

    const int n = 1000000;
    std::mt19937_64 rng(7);
    std::vector<double> draws(n);
    double mean = 0.0;
    for (int i = 0; i < n; ++i) {
        draws[i] = sample_value(kSig, Quality::High, rng);
        mean += draws[i];
    }
    mean /= n;
    CHECK(std::fabs(mean - 3.0) < 4.0 * 4.0 / 1000.0);  // 4 sigma / sqrt(n)

    const double ks = oracle::ks_distance(
        draws, [&](double v) { return kSig.cdf(Quality::High, v); });
    CHECK(ks < 0.002);
}

TEST_CASE("quantile: inverse of the cdf") {
    for (double u : {1e-8, 0.01, 0.3, 0.5, 0.77, 0.999, 1.0 - 1e-9}) {
        const double v = kSig.quantile(Quality::Low, u);
        CHECK(kSig.cdf(Quality::Low, v) == doctest::Approx(u).epsilon(1e-9));
    }
}

TEST_CASE("ModelParams validation") {
    CHECK(kParams.p_bar() == doctest::Approx(1.0 / 3.0));
    ModelParams bad = kParams;
    bad.c = 3.5;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = kParams;
    bad.beta = 1.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    CHECK_NOTHROW(bad.validate(/*allow_unit_beta=*/true));
    bad = kParams;
    bad.p1 = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}
