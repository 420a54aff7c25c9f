#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "revsim/grid_function.hpp"
#include "revsim/params.hpp"
#include "revsim/pooling.hpp"
#include "revsim/signal.hpp"

#include "json.hpp"

namespace revsim {

// Numerical controls for the solvers.
struct Numerics {
    int grid_n = 401;         // belief grid points on [p_bar, 1]
    double tol_value = 1e-8;  // value-iteration stopping tolerance (value units)
    double tol_root = 1e-10;  // root tolerance in belief units
    int quad_nodes = 64;      // Gauss-Legendre nodes per panel
    int quad_panels = 16;     // panels for generic v-space quadrature
    int max_iters = 10000;

    void validate() const {
        if (grid_n < 51) throw ConfigError("numerics.grid_n: must be >= 51");
        if (!(tol_value > 0.0)) throw ConfigError("numerics.tol_value: must be > 0");
        if (!(tol_root > 0.0)) throw ConfigError("numerics.tol_root: must be > 0");
        if (quad_nodes < 2) throw ConfigError("numerics.quad_nodes: must be >= 2");
        if (quad_panels < 1) throw ConfigError("numerics.quad_panels: must be >= 1");
        if (max_iters < 1) throw ConfigError("numerics.max_iters: must be >= 1");
    }
};

// Pooling lower bound Delta = (1-beta)(c-L) / (H - beta c - (1-beta) L):
// no equilibrium message pools private beliefs below Delta.
double delta_bound(const ModelParams& params);

// The solved commitment equilibrium on a belief grid over [p_bar, 1].
struct ValueSolution {
    ModelParams params;
    double sigma = 0.0;  // Gaussian signal scale (echoed for serialization)

    std::vector<double> grid;
    std::vector<double> vstar;
    std::vector<double> lstar;
    std::vector<double> rstar;
    std::vector<double> v_high;
    std::vector<double> v_low;

    double delta = 0.0;     // delta_bound(params)
    double residual = 0.0;  // sup-norm Bellman residual at the fixed point
    int iterations = 0;

    // diagnostics only: monotone quality-conditional values are known for the
    // cheap-talk counterpart but are not asserted for this solution
    bool vh_nondecreasing = true;
    bool vl_nonincreasing = true;

    double value_at(double p) const { return interp(vstar, p); }
    double lstar_at(double p) const { return interp(lstar, p); }
    double rstar_at(double p) const { return interp(rstar, p); }

    // theta-conditional continuation value V_theta(p) (zero below p_bar)
    double v_theta(Quality q, double p) const {
        if (p < params.p_bar()) return 0.0;
        return interp(q == Quality::High ? v_high : v_low, p);
    }

    nlohmann::json to_json() const;
    static ValueSolution from_json(const nlohmann::json& j);

private:
    double interp(const std::vector<double>& ys, double p) const;
};

// One application of the Bellman operator T_f at public belief p:
//   T_f(p) = max_{l in [0, pbar]} theta(p) - c
//            + beta [ f(pbar) (Phi(r(l)|p) - Phi(l|p)) + int_{r(l)}^1 f dPhi(.|p) ]
// with r(l) from solve_r.  Returns the value and the maximizing interval.
// f must be continuous, non-decreasing, with f(pbar) >= 0 and
// f(1) = (H - c)/(1 - beta); p = 1 is handled analytically.
struct OperatorResult {
    double value;
    double l;
    double r;
};

OperatorResult bellman_operator(const ModelParams& params, const SignalModel& sig,
                                const GridFunction& f, double p,
                                const Numerics& num = {});

// Root of the bracketed first-order condition
//   G(l) = ((f(r(l)) - f(pbar)) / (r(l) - pbar)) (pbar - l) - f(pbar)
// (strictly decreasing in l at the fixed point); returns l = 0 when G(0) <= 0.
double optimal_l(const ModelParams& params, const SignalModel& sig,
                 const GridFunction& f, double p, const Numerics& num = {});

// Value of truthful communication: fixed point of
//   V(p) = theta(p) - c + beta int_{pbar}^1 V(b) dPhi(b|p),
// with beliefs below pbar absorbing at value zero.
GridFunction value_truthful(const ModelParams& params, const SignalModel& sig,
                            const Numerics& num = {});

// Solves the commitment equilibrium by value iteration on T_f (contraction
// with modulus beta), then extracts the pooling policy and the
// quality-conditional values V^H, V^L by policy evaluation.
// Throws SolveError if the iteration does not converge within max_iters.
ValueSolution solve_commitment(const ModelParams& params, const SignalModel& sig,
                               const Numerics& num = {});

}  // namespace revsim
