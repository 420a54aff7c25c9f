#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "revsim/bellman.hpp"
#include "revsim/params.hpp"
#include "revsim/signal.hpp"
#include "revsim/threeperiod.hpp"

#include "json.hpp"

namespace revsim {

// Communication policy mapping (public belief p, private posterior b) to the
// induced next public belief.  Any induced belief below p_bar is an absorbing
// stop; off-path/stopping messages all map to stop_belief = p_bar/2 (the
// value never matters, all stops are equivalent).
struct Policy {
    enum class Kind { Commitment, Truthful, Babbling, CheapTalk3P };

    Kind kind = Kind::Truthful;
    const ValueSolution* solution = nullptr;       // Commitment
    const CheapTalkPartition* partition = nullptr; // CheapTalk3P

    static Policy commitment(const ValueSolution& sol) {
        Policy p; p.kind = Kind::Commitment; p.solution = &sol; return p;
    }
    static Policy truthful() { return Policy{}; }
    static Policy babbling() { Policy p; p.kind = Kind::Babbling; return p; }
    static Policy cheaptalk3p(const CheapTalkPartition& part) {
        Policy p; p.kind = Kind::CheapTalk3P; p.partition = &part; return p;
    }

    // whether a stopping message is reachable on path (used to classify
    // buy cascades structurally)
    bool admits_stop() const { return kind != Kind::Babbling; }

    const char* name() const {
        switch (kind) {
            case Kind::Commitment: return "commitment";
            case Kind::Truthful: return "truthful";
            case Kind::Babbling: return "babbling";
            case Kind::CheapTalk3P: return "cheaptalk3p";
        }
        return "?";
    }
};

// Next public belief induced by the policy at (p, b); requires p >= p_bar
// (the caller only steps after a purchase).
double policy_step(const Policy& policy, const ModelParams& params, double p, double b);

struct PeriodRecord {
    double p = 0.0;        // public belief at the start of the period
    bool bought = false;
    double v = 0.0;        // consumption utility (valid iff bought)
    double b = 0.0;        // private posterior (valid iff bought)
    double next_p = 0.0;   // induced public belief (valid iff bought)
};

struct EpisodeTrace {
    Quality theta = Quality::Low;
    std::vector<PeriodRecord> records;
    double welfare = 0.0;              // sum beta^{t-1} 1{buy}(v_t - c)
    std::optional<int> stop_time;      // first period with no purchase
};

EpisodeTrace run_episode(const Policy& policy, const ModelParams& params,
                         const SignalModel& sig, int horizon, std::mt19937_64& rng);

struct CascadeClass {
    enum Kind { None, StopCascade, BuyCascade } kind = None;
    int t = 0;  // period of the message that started the cascade
};

// Stop cascades are read off the trace (the first review that pushes the
// public belief below p_bar); buy cascades are a structural property of the
// policy (a finite sample cannot witness "p_s >= p_bar forever").
CascadeClass detect_cascade(const Policy& policy, const ModelParams& params,
                            const EpisodeTrace& trace);

struct WelfareStats {
    std::int64_t episodes = 0;
    int horizon = 0;
    std::uint64_t master_seed = 0;
    double mean_welfare = 0.0;
    double std_error = 0.0;        // sample std / sqrt(episodes)
    double stop_cascade_freq = 0.0;
    double buy_cascade_freq = 0.0;
    std::int64_t stopped_episodes = 0;
    double mean_stop_time = 0.0;   // over stopped episodes; 0 if none

    nlohmann::json to_json() const;
};

// Deterministic batch: episode k uses a stream seeded from
// (master_seed, k), so runs with equal seeds are bit-identical and separate
// policies can share random numbers for paired comparisons.
WelfareStats run_batch(const Policy& policy, const ModelParams& params,
                       const SignalModel& sig, int horizon, std::int64_t episodes,
                       std::uint64_t master_seed);

// Episode-k generator seed (exposed for trace dumps and tests).
std::uint64_t episode_seed(std::uint64_t master_seed, std::int64_t episode);

// Smallest T with beta^T (H - c)/(1 - beta) below tail_tol.
int auto_horizon(const ModelParams& params, double tail_tol = 1e-3);

}  // namespace revsim
