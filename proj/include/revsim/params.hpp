#pragma once

#include "revsim/common.hpp"

namespace revsim {

// Economic primitives of the review game.
//
// Quality theta in {L, H} is the mean consumption utility, c is the price,
// beta the common discount factor and p1 the prior P(theta = H).  The model
// requires 0 <= L < c < H; consumers buy iff their belief weakly exceeds
// p_bar = (c - L)/(H - L), buying when indifferent.
struct ModelParams {
    double H = 3.0;
    double L = 0.0;
    double c = 1.0;
    double beta = 0.9;
    double p1 = 0.5;

    double p_bar() const { return (c - L) / (H - L); }

    // Expected consumption utility at belief p.
    double theta(double p) const { return p * H + (1.0 - p) * L; }

    double mean(Quality q) const { return q == Quality::High ? H : L; }

    // Validates the invariants; beta = 1 is only legal for the three-period
    // computations, which pass allow_unit_beta.
    void validate(bool allow_unit_beta = false) const {
        if (!(L >= 0.0)) throw ConfigError("model.L: must satisfy L >= 0");
        if (!(L < c)) throw ConfigError("model.c: must satisfy L < c");
        if (!(c < H)) throw ConfigError("model.c: must satisfy c < H");
        if (allow_unit_beta) {
            if (!(beta > 0.0 && beta <= 1.0))
                throw ConfigError("model.beta: must lie in (0, 1]");
        } else {
            if (!(beta > 0.0 && beta < 1.0))
                throw ConfigError("model.beta: must lie in (0, 1) for infinite-horizon use");
        }
        if (!(p1 > 0.0 && p1 < 1.0)) throw ConfigError("model.p1: must lie in (0, 1)");
        const double pb = p_bar();
        if (!(pb > 0.0 && pb < 1.0))
            throw ConfigError("model: derived threshold (c-L)/(H-L) must lie in (0, 1)");
    }
};

}  // namespace revsim
