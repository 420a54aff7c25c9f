#pragma once

#include <functional>

#include "revsim/signal.hpp"

namespace revsim {

// A pooling interval [l, r] around the purchase threshold, with
// E[b | b in [l, r]] = p_bar when produced by solve_r.
struct PoolingInterval {
    double l;
    double r;
};

// Unique r in [p_bar, 1) with E[b | b in [l, r]] = p_bar under Phi(.|p),
// i.e. the root of
//   int_pbar^r (b - pbar) phi(b|p) db = int_l^pbar (pbar - b) phi(b|p) db.
// The left side is continuous, strictly increasing in r and zero at r = pbar;
// existence below 1 holds whenever p >= pbar.  Requires l in [0, p_bar].
double solve_r(const PosteriorDist& dist, double p_bar, double l, double tol_root = 1e-10);

// d r(l) / d l = -((pbar - l)/(r(l) - pbar)) * phi(l|p)/phi(r(l)|p),
// by the implicit function theorem on the constraint above.  Always <= 0.
// Rejects l = p_bar, where the ratio is singular.
double dr_dl(const PosteriorDist& dist, double p_bar, double l, double tol_root = 1e-10);

// Inner maximization over the pooling cutoff shared by the Bellman operator
// and the three-period solver.  The objective is
//   f(pbar) * mass(l, r(l)) + int_{r(l)}^1 f(b) dPhi(b|p),
// whose l-derivative is phi(l|p) * G(l) with
//   G(l) = ((f(r(l)) - f(pbar)) / (r(l) - pbar)) * (pbar - l) - f(pbar).
// G is decreasing in l when f is convex-ish (it always is at the fixed
// point); the root is found by bisection, with a golden-section fallback on
// the full objective when the FOC bracket is unavailable.
struct PoolingChoice {
    double l;
    double r;
    bool at_lower_boundary = false;  // G(0) <= 0: optimum pinned at l = 0
};

PoolingChoice optimal_pooling(const PosteriorDist& dist, double p_bar,
                              const std::function<double(double)>& terminal_value,
                              const std::function<double(double)>& tail_integral,
                              double tol_root = 1e-10, double tol_l = 1e-10);

}  // namespace revsim
