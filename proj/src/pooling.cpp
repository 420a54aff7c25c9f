#include "revsim/pooling.hpp"

#include <cmath>

#include "revsim/rootfind.hpp"

namespace revsim {

namespace {

// residual(r) = int_pbar^r (b - pbar) dPhi - int_l^pbar (pbar - b) dPhi;
// strictly increasing in r, negative at r = pbar for l < pbar.
double pool_residual(const PosteriorDist& dist, double p_bar, double l, double r) {
    const double lhs = dist.first_moment(p_bar, r) - p_bar * dist.mass(p_bar, r);
    const double rhs = p_bar * dist.mass(l, p_bar) - dist.first_moment(l, p_bar);
    return lhs - rhs;
}

}  // namespace

double solve_r(const PosteriorDist& dist, double p_bar, double l, double tol_root) {
    if (!(l >= 0.0 && l <= p_bar))
        throw std::invalid_argument("solve_r: l must lie in [0, p_bar]");
    if (!(dist.p() >= p_bar))
        throw std::invalid_argument("solve_r: requires p >= p_bar");
    if (l == p_bar) return p_bar;  // empty pooling mass

    const double hi_cap = 1.0 - kBeliefEps;
    const double f_lo = pool_residual(dist, p_bar, l, p_bar);
    if (f_lo >= 0.0) return p_bar;  // zero mass below as well

    // grow the upper bracket geometrically toward 1
    double hi = std::min(p_bar + 2.0 * (p_bar - l), hi_cap);
    double f_hi = pool_residual(dist, p_bar, l, hi);
    while (f_hi < 0.0 && hi < hi_cap) {
        hi = std::min(p_bar + 2.0 * (hi - p_bar), hi_cap);
        f_hi = pool_residual(dist, p_bar, l, hi);
    }
    if (f_hi < 0.0) {
        // the full upper tail just balances the lower mass (p = pbar, l = 0);
        // residual at the cap is then a rounding-level negative
        return hi_cap;
    }
    return brent([&](double r) { return pool_residual(dist, p_bar, l, r); },
                 p_bar, hi, f_lo, f_hi, tol_root);
}

double dr_dl(const PosteriorDist& dist, double p_bar, double l, double tol_root) {
    if (!(l > 0.0 && l < p_bar))
        throw std::domain_error("dr_dl: l must lie strictly inside (0, p_bar)");
    const double r = solve_r(dist, p_bar, l, tol_root);
    return -((p_bar - l) / (r - p_bar)) * (dist.density(l) / dist.density(r));
}

PoolingChoice optimal_pooling(const PosteriorDist& dist, double p_bar,
                              const std::function<double(double)>& terminal_value,
                              const std::function<double(double)>& tail_integral,
                              double tol_root, double tol_l) {
    const double f_pbar = terminal_value(p_bar);
    if (!(f_pbar > 0.0)) {
        // pooling below pbar only destroys tail information when the pooled
        // message is worthless
        return {p_bar, p_bar, false};
    }

    const auto G = [&](double l) {
        const double r = solve_r(dist, p_bar, l, tol_root);
        if (r - p_bar < 1e-14) return -f_pbar;  // l -> pbar limit
        return ((terminal_value(r) - f_pbar) / (r - p_bar)) * (p_bar - l) - f_pbar;
    };

    const double g0 = G(0.0);
    if (g0 <= 0.0) {
        // can only happen away from the fixed point (the bracket premise is
        // f'(pbar) pbar > f(pbar)); the objective is then decreasing in l
        return {0.0, solve_r(dist, p_bar, 0.0, tol_root), true};
    }
    const double l_hi = p_bar * (1.0 - 1e-12);
    const double g1 = G(l_hi);
    if (g1 >= 0.0) return {p_bar, p_bar, false};

    double l_star;
    try {
        l_star = brent(G, 0.0, l_hi, g0, g1, tol_l);
    } catch (const std::exception&) {
        // FOC bracket failed (possible for a non-convex iterate early in
        // value iteration): golden-section on the objective itself
        const auto objective = [&](double l) {
            const double r = solve_r(dist, p_bar, l, tol_root);
            return f_pbar * dist.mass(l, r) + tail_integral(r);
        };
        l_star = golden_max(objective, 0.0, p_bar, tol_l);
    }
    return {l_star, solve_r(dist, p_bar, l_star, tol_root), false};
}

}  // namespace revsim
