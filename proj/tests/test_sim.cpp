#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "oracle_helpers.hpp"
#include "revsim/sim.hpp"

using namespace revsim;

namespace {
const ModelParams kParams;
const GaussianSignal kSig(3.0, 0.0, 4.0);
const double kPbar = kParams.p_bar();

const ValueSolution& solved() {
    static const ValueSolution sol = [] {
        Numerics n;
        n.grid_n = 201;
        return solve_commitment(kParams, kSig, n);
    }();
    return sol;
}
}  // namespace

TEST_CASE("policy_step: table of induced beliefs") {
    CHECK(policy_step(Policy::truthful(), kParams, 0.6, 0.42) == 0.42);
    CHECK(policy_step(Policy::babbling(), kParams, 0.6, 0.01) == 0.6);

    const auto pol = Policy::commitment(solved());
    const double p = 0.5;
    const double l = solved().lstar_at(p), r = solved().rstar_at(p);
    CHECK(policy_step(pol, kParams, p, 0.5 * (l + r)) == kPbar);            // pooled
    CHECK(policy_step(pol, kParams, p, l * 0.5) == 0.5 * kPbar);            // stop
    CHECK(policy_step(pol, kParams, p, r + 0.1) == doctest::Approx(r + 0.1));  // truthful
}

TEST_CASE("auto_horizon: tail below the tolerance") {
    const int T = auto_horizon(kParams);
    CHECK(T == 94);
    const double tail = std::pow(kParams.beta, T) * (kParams.H - kParams.c) /
                        (1.0 - kParams.beta);
    CHECK(tail < 1e-3);
    CHECK(std::pow(kParams.beta, T - 1) * (kParams.H - kParams.c) /
              (1.0 - kParams.beta) >= 1e-3);
}

TEST_CASE("run_episode: closed market, determinism, absorbing stop") {
    ModelParams closed = kParams;
    closed.p1 = 0.2;  // below the threshold
    std::mt19937_64 rng(1);
    const auto trace = run_episode(Policy::truthful(), closed, kSig, 50, rng);
    CHECK(trace.welfare == 0.0);
    CHECK(trace.records.size() == 1);
    CHECK(!trace.records[0].bought);
    CHECK(trace.stop_time.has_value());

    std::mt19937_64 a(9), b(9);
    const auto ta = run_episode(Policy::truthful(), kParams, kSig, 94, a);
    const auto tb = run_episode(Policy::truthful(), kParams, kSig, 94, b);
    CHECK(ta.welfare == tb.welfare);
    CHECK(ta.records.size() == tb.records.size());

    // absorbing stop: nothing is bought at or after the stop
    for (int k = 0; k < 1000; ++k) {
        std::mt19937_64 r(episode_seed(77, k));
        const auto t = run_episode(Policy::truthful(), kParams, kSig, 94, r);
        bool stopped = false;
        for (const auto& rec : t.records) {
            if (stopped) CHECK(!rec.bought);
            CHECK(rec.bought == (rec.p >= kPbar));
            if (rec.bought && rec.next_p < kPbar) stopped = true;
        }
    }
}

TEST_CASE("detect_cascade: classification table") {
    std::mt19937_64 rng(3);
    const auto bab = run_episode(Policy::babbling(), kParams, kSig, 20, rng);
    const auto cb = detect_cascade(Policy::babbling(), kParams, bab);
    CHECK(cb.kind == CascadeClass::BuyCascade);
    CHECK(cb.t == 1);

    // force a stop by feeding a trace through a closed market
    ModelParams closed = kParams;
    closed.p1 = 0.1;
    std::mt19937_64 rng2(4);
    const auto t2 = run_episode(Policy::truthful(), closed, kSig, 20, rng2);
    CHECK(detect_cascade(Policy::truthful(), closed, t2).kind ==
          CascadeClass::StopCascade);

    // truthful trace that stays above the threshold: no cascade
    for (int k = 0; k < 200; ++k) {
        std::mt19937_64 r(episode_seed(5, k));
        const auto t = run_episode(Policy::truthful(), kParams, kSig, 94, r);
        const auto c = detect_cascade(Policy::truthful(), kParams, t);
        if (!t.stop_time.has_value()) {
            CHECK(c.kind == CascadeClass::None);
        } else {
            CHECK(c.kind == CascadeClass::StopCascade);
            CHECK(c.t == *t.stop_time - 1);
        }
    }
}

TEST_CASE("prior exactly at the threshold: indifferent consumers buy") {
    ModelParams at = kParams;
    at.p1 = at.p_bar();
    std::mt19937_64 rng(15);
    const auto trace = run_episode(Policy::truthful(), at, kSig, 10, rng);
    REQUIRE(!trace.records.empty());
    CHECK(trace.records[0].bought);
}

TEST_CASE("run_batch: determinism and babbling closed form") {
    const auto s1 = run_batch(Policy::babbling(), kParams, kSig, 94, 20000, 123);
    const auto s2 = run_batch(Policy::babbling(), kParams, kSig, 94, 20000, 123);
    CHECK(s1.mean_welfare == s2.mean_welfare);
    CHECK(s1.std_error == s2.std_error);
    CHECK(s1.to_json().dump() == s2.to_json().dump());

    // frozen-belief stream: E[welfare] = (theta(p1) - c)(1 - beta^T)/(1 - beta)
    const double expect = (kParams.theta(kParams.p1) - kParams.c) *
                          (1.0 - std::pow(kParams.beta, 94)) / (1.0 - kParams.beta);
    CHECK(std::fabs(s1.mean_welfare - expect) <= 3.0 * s1.std_error);
    CHECK(s1.buy_cascade_freq == 1.0);
    CHECK(s1.stop_cascade_freq == 0.0);
}

TEST_CASE("run_batch: standard-error scaling with episode count") {
    const auto a = run_batch(Policy::truthful(), kParams, kSig, 94, 1000, 99);
    const auto b = run_batch(Policy::truthful(), kParams, kSig, 94, 10000, 99);
    const auto c = run_batch(Policy::truthful(), kParams, kSig, 94, 100000, 99);
    CHECK(a.std_error / b.std_error == doctest::Approx(std::sqrt(10.0)).epsilon(0.2));
    CHECK(b.std_error / c.std_error == doctest::Approx(std::sqrt(10.0)).epsilon(0.2));
}

TEST_CASE("belief consistency under the truthful policy (first period, KS)") {
    // conditional on theta, the first-period private posterior follows
    // Phi_theta(.|p1)
    std::vector<double> bh, bl;
    bh.reserve(120000);
    bl.reserve(120000);
    for (int k = 0; bh.size() < 100000 || bl.size() < 100000; ++k) {
        std::mt19937_64 rng(episode_seed(2024, k));
        const auto t = run_episode(Policy::truthful(), kParams, kSig, 1, rng);
        if (t.records.empty() || !t.records[0].bought) continue;
        (t.theta == Quality::High ? bh : bl).push_back(t.records[0].b);
    }
    bh.resize(100000);
    bl.resize(100000);
    const double ks_h = oracle::ks_distance(bh, [&](double b) {
        return posterior_cdf(kSig, Quality::High, b, kParams.p1);
    });
    const double ks_l = oracle::ks_distance(bl, [&](double b) {
        return posterior_cdf(kSig, Quality::Low, b, kParams.p1);
    });
    CHECK(ks_h < 0.01);
    CHECK(ks_l < 0.01);
}

TEST_CASE("commitment batch: mean within noise of the solved value, CRN dominance") {
    const auto& sol = solved();
    const int T = auto_horizon(kParams);
    const auto commit = run_batch(Policy::commitment(sol), kParams, kSig, T, 20000, 777);
    CHECK(std::fabs(commit.mean_welfare - sol.value_at(kParams.p1)) <=
          4.0 * commit.std_error);

    // welfare decomposition: E[welfare | theta] = (theta_v - c) + beta V_theta(p1)
    double sum_h = 0.0, sum_l = 0.0, sq_h = 0.0, sq_l = 0.0;
    std::int64_t n_h = 0, n_l = 0;
    const auto pol = Policy::commitment(sol);
    for (int k = 0; k < 20000; ++k) {
        std::mt19937_64 rng(episode_seed(777, k));
        const auto t = run_episode(pol, kParams, kSig, T, rng);
        if (t.theta == Quality::High) {
            sum_h += t.welfare;
            sq_h += t.welfare * t.welfare;
            ++n_h;
        } else {
            sum_l += t.welfare;
            sq_l += t.welfare * t.welfare;
            ++n_l;
        }
    }
    const double mean_h = sum_h / n_h, mean_l = sum_l / n_l;
    const double se_h = std::sqrt((sq_h / n_h - mean_h * mean_h) / n_h);
    const double se_l = std::sqrt((sq_l / n_l - mean_l * mean_l) / n_l);
    const double want_h = (kParams.H - kParams.c) +
                          kParams.beta * sol.v_theta(Quality::High, kParams.p1);
    const double want_l = (kParams.L - kParams.c) +
                          kParams.beta * sol.v_theta(Quality::Low, kParams.p1);
    CHECK(std::fabs(mean_h - want_h) <= 3.0 * se_h);
    CHECK(std::fabs(mean_l - want_l) <= 3.0 * se_l);

    // common random numbers: truthful cannot beat commitment
    const auto truthful = run_batch(Policy::truthful(), kParams, kSig, T, 20000, 777);
    CHECK(truthful.mean_welfare <= commit.mean_welfare);

    // and the truthful batch pins the no-pooling fixed point
    Numerics num;
    num.grid_n = 201;
    const auto vt = value_truthful(kParams, kSig, num);
    CHECK(std::fabs(truthful.mean_welfare - vt(kParams.p1)) <= 4.0 * truthful.std_error);
}
