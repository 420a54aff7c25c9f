#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace revsim {

// Product quality state.
enum class Quality { Low, High };

inline const char* to_string(Quality q) { return q == Quality::High ? "H" : "L"; }

// Beliefs are clamped to [kBeliefEps, 1 - kBeliefEps] at interfaces: the
// log-likelihood ratio is unbounded, so exact 0/1 map to infinite log-odds.
inline constexpr double kBeliefEps = 1e-12;

inline double clamp_belief(double p) {
    if (p < kBeliefEps) return kBeliefEps;
    if (p > 1.0 - kBeliefEps) return 1.0 - kBeliefEps;
    return p;
}

inline double logit(double p) {
    p = clamp_belief(p);
    return std::log(p / (1.0 - p));
}

inline double sigmoid(double x) {
    // evaluate from the smaller exponential to avoid overflow
    if (x >= 0.0) {
        const double e = std::exp(-x);
        return 1.0 / (1.0 + e);
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// Thrown when an iterative solver fails to reach its tolerance.
class SolveError : public std::runtime_error {
public:
    SolveError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

// Thrown on invalid run configuration; message names the violated field.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace revsim
