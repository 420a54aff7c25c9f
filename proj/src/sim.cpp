#include "revsim/sim.hpp"

#include <cmath>

namespace revsim {

namespace {

// splitmix64: decorrelates per-episode seeds derived from (master, index)
std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t episode_seed(std::uint64_t master_seed, std::int64_t episode) {
    return splitmix64(master_seed ^ splitmix64(static_cast<std::uint64_t>(episode)));
}

double policy_step(const Policy& policy, const ModelParams& params, double p, double b) {
    const double p_bar = params.p_bar();
    const double stop = 0.5 * p_bar;
    switch (policy.kind) {
        case Policy::Kind::Truthful:
            return clamp_belief(b);
        case Policy::Kind::Babbling:
            return p;
        case Policy::Kind::Commitment: {
            const double l = policy.solution->lstar_at(p);
            if (b < l) return stop;
            if (b <= policy.solution->rstar_at(p)) return p_bar;
            return clamp_belief(b);
        }
        case Policy::Kind::CheapTalk3P: {
            const auto& part = *policy.partition;
            std::size_t j = 0;
            while (j + 1 < part.thresholds.size() && b > part.thresholds[j + 1]) ++j;
            if (j == 0) return stop;
            return part.messages[j];
        }
    }
    return stop;
}

EpisodeTrace run_episode(const Policy& policy, const ModelParams& params,
                         const SignalModel& sig, int horizon, std::mt19937_64& rng) {
    if (horizon < 1) throw std::invalid_argument("run_episode: horizon must be >= 1");
    EpisodeTrace trace;
    trace.theta = (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < params.p1)
                      ? Quality::High
                      : Quality::Low;
    double p = params.p1;
    double disc = 1.0;
    const double p_bar = params.p_bar();
    for (int t = 1; t <= horizon; ++t) {
        PeriodRecord rec;
        rec.p = p;
        if (p < p_bar) {
            // market shut: no purchase now or ever after
            trace.stop_time = t;
            trace.records.push_back(rec);
            break;
        }
        rec.bought = true;
        rec.v = sample_value(sig, trace.theta, rng);
        rec.b = posterior_b(sig, p, rec.v);
        trace.welfare += disc * (rec.v - params.c);
        rec.next_p = policy_step(policy, params, p, rec.b);
        trace.records.push_back(rec);
        p = rec.next_p;
        disc *= params.beta;
    }
    return trace;
}

CascadeClass detect_cascade(const Policy& policy, const ModelParams& params,
                            const EpisodeTrace& trace) {
    const double p_bar = params.p_bar();
    if (trace.records.empty()) return {CascadeClass::None, 0};
    if (trace.records.front().p < p_bar) {
        // market closed from the start
        return {CascadeClass::StopCascade, 0};
    }
    for (std::size_t i = 0; i < trace.records.size(); ++i) {
        const auto& rec = trace.records[i];
        if (rec.bought && rec.next_p < p_bar)
            return {CascadeClass::StopCascade, static_cast<int>(i + 1)};
    }
    if (!policy.admits_stop()) {
        // frozen public belief: every future consumer buys regardless of reviews
        return {CascadeClass::BuyCascade, 1};
    }
    return {CascadeClass::None, 0};
}

WelfareStats run_batch(const Policy& policy, const ModelParams& params,
                       const SignalModel& sig, int horizon, std::int64_t episodes,
                       std::uint64_t master_seed) {
    if (episodes < 1) throw std::invalid_argument("run_batch: episodes must be >= 1");
    WelfareStats stats;
    stats.episodes = episodes;
    stats.horizon = horizon;
    stats.master_seed = master_seed;

    double sum = 0.0, sumsq = 0.0;
    std::int64_t stops = 0, buys = 0;
    double stop_time_sum = 0.0;
    for (std::int64_t k = 0; k < episodes; ++k) {
        std::mt19937_64 rng(episode_seed(master_seed, k));
        const auto trace = run_episode(policy, params, sig, horizon, rng);
        sum += trace.welfare;
        sumsq += trace.welfare * trace.welfare;
        const auto cas = detect_cascade(policy, params, trace);
        if (cas.kind == CascadeClass::StopCascade) {
            ++stops;
            stop_time_sum += cas.t;
        } else if (cas.kind == CascadeClass::BuyCascade) {
            ++buys;
        }
    }
    const double n = static_cast<double>(episodes);
    stats.mean_welfare = sum / n;
    const double var = std::max(0.0, (sumsq - n * stats.mean_welfare * stats.mean_welfare) /
                                         std::max(1.0, n - 1.0));
    stats.std_error = std::sqrt(var / n);
    stats.stop_cascade_freq = static_cast<double>(stops) / n;
    stats.buy_cascade_freq = static_cast<double>(buys) / n;
    stats.stopped_episodes = stops;
    stats.mean_stop_time = stops > 0 ? stop_time_sum / static_cast<double>(stops) : 0.0;
    return stats;
}

int auto_horizon(const ModelParams& params, double tail_tol) {
    const double target = tail_tol * (1.0 - params.beta) / (params.H - params.c);
    return static_cast<int>(std::ceil(std::log(target) / std::log(params.beta)));
}

nlohmann::json WelfareStats::to_json() const {
    return nlohmann::json{{"episodes", episodes},
                          {"horizon", horizon},
                          {"master_seed", master_seed},
                          {"mean_welfare", mean_welfare},
                          {"std_error", std_error},
                          {"stop_cascade_freq", stop_cascade_freq},
                          {"buy_cascade_freq", buy_cascade_freq},
                          {"stopped_episodes", stopped_episodes},
                          {"mean_stop_time", mean_stop_time}};
}

}  // namespace revsim
