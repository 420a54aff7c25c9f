#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "oracle_helpers.hpp"
#include "revsim/pooling.hpp"

using namespace revsim;

namespace {
const ModelParams kParams;
const GaussianSignal kSig(3.0, 0.0, 4.0);
const double kPbar = kParams.p_bar();
}  // namespace

TEST_CASE("solve_r: boundary, monotonicity, frozen brute-force value") {
    const PosteriorDist dist(kSig, 0.5);
    CHECK(solve_r(dist, kPbar, kPbar) == kPbar);

    // dr/dl < 0: larger l pools less below, so r falls
    const double r1 = solve_r(dist, kPbar, 0.15);
    const double r2 = solve_r(dist, kPbar, 0.25);
    CHECK(r1 > r2);

    // frozen from the 1e6-point belief-grid scan of the balance condition
    CHECK(solve_r(dist, kPbar, 0.2) == doctest::Approx(0.4324776954).epsilon(2e-7));
}

TEST_CASE("solve_r: constraint residual <= 1e-9 across randomized (l, p)") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> up(kPbar, 0.995), ul(0.0, kPbar);
    for (int i = 0; i < 60; ++i) {
        const double p = up(rng), l = ul(rng);
        const PosteriorDist dist(kSig, p);
        const double r = solve_r(dist, kPbar, l);
        if (r >= 1.0 - 1e-9) continue;  // boundary case (p ~ pbar, l ~ 0)
        CHECK(std::fabs(dist.mean_on(l, r) - kPbar) <= 1e-9);
    }
}

TEST_CASE("solve_r: agrees with an independent brute-force scan") {
    oracle::Gauss g;
    for (double p : {0.4, 0.6, 0.85}) {
        for (double l : {0.05, 0.2, 0.3}) {
            const PosteriorDist dist(kSig, p);
            CHECK(solve_r(dist, kPbar, l) ==
                  doctest::Approx(oracle::brute_solve_r(g, kPbar, p, l, 400000))
                      .epsilon(5e-6));
        }
    }
}

TEST_CASE("density-ratio bounds on r(l) near the threshold") {
    // for l in [pbar - eps, pbar], (r(l)-pbar)/(pbar-l) stays within
    // [sqrt(Bl/Bh), sqrt(Bh/Bl)] where Bl/Bh bound the density on the bracket
    const double eps = 0.05;
    for (double p : {kPbar, 0.5, 0.8}) {
        const PosteriorDist dist(kSig, p);
        const double r_at = solve_r(dist, kPbar, kPbar - eps);
        double b_lo = 1e300, b_hi = 0.0;
        for (int i = 0; i <= 2000; ++i) {
            const double b = (kPbar - eps) + (r_at - (kPbar - eps)) * i / 2000.0;
            const double d = dist.density(b);
            b_lo = std::min(b_lo, d);
            b_hi = std::max(b_hi, d);
        }
        for (double l : {kPbar - eps, kPbar - eps / 2, kPbar - eps / 10}) {
            const double ratio = (solve_r(dist, kPbar, l) - kPbar) / (kPbar - l);
            CHECK(ratio >= std::sqrt(b_lo / b_hi) - 1e-9);
            CHECK(ratio <= std::sqrt(b_hi / b_lo) + 1e-9);
        }
    }
}

TEST_CASE("solve_r: continuity under small perturbations") {
    const double l0 = 0.21, p0 = 0.55;
    const PosteriorDist d0(kSig, p0);
    const double r0 = solve_r(d0, kPbar, l0);
    for (auto [dl, dp] : {std::pair{1e-6, 0.0}, {0.0, 1e-6}, {-1e-6, 1e-6}}) {
        const PosteriorDist d(kSig, p0 + dp);
        CHECK(std::fabs(solve_r(d, kPbar, l0 + dl) - r0) < 1e-4);
    }
}

TEST_CASE("dr_dl: sign, finite-difference oracle, near-threshold limit") {
    const PosteriorDist dist(kSig, 0.5);

    CHECK(dr_dl(dist, kPbar, 0.2) < 0.0);
    CHECK_THROWS_AS((void)dr_dl(dist, kPbar, kPbar), std::domain_error);

    // central finite differences of solve_r to relative 1e-5
    for (double l : {0.05, 0.15, 0.25, 0.31}) {
        const double h = 1e-6;
        const double fd = (solve_r(dist, kPbar, l + h, 1e-13) -
                           solve_r(dist, kPbar, l - h, 1e-13)) / (2.0 * h);
        CHECK(dr_dl(dist, kPbar, l) == doctest::Approx(fd).epsilon(1e-5));
    }

    // l -> pbar: second-order expansion of the balance condition gives
    // dr/dl -> -sqrt(phi(l)/phi(r)) -> -1 at the common point
    const double d = dr_dl(dist, kPbar, kPbar - 1e-6);
    CHECK(std::isfinite(d));
    CHECK(d == doctest::Approx(-1.0).epsilon(1e-3));
}

TEST_CASE("solve_r input validation") {
    const PosteriorDist dist(kSig, 0.5);
    CHECK_THROWS_AS((void)solve_r(dist, kPbar, kPbar + 0.01), std::invalid_argument);
    const PosteriorDist low(kSig, 0.2);
    CHECK_THROWS_AS((void)solve_r(low, kPbar, 0.1), std::invalid_argument);
}
