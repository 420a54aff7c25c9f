#include "revsim/bellman.hpp"

#include <algorithm>
#include <cmath>

#include "revsim/quadrature.hpp"
#include "revsim/rootfind.hpp"

namespace revsim {

double delta_bound(const ModelParams& params) {
    return (1.0 - params.beta) * (params.c - params.L) /
           (params.H - params.beta * params.c - (1.0 - params.beta) * params.L);
}

namespace {

constexpr double kNearOne = 1.0 - 1e-6;  // switch to the analytic p -> 1 limit

// Integration and optimization machinery for one public belief p and one
// belief grid.  Node values of Phi_theta are cached once (they do not depend
// on the value-function iterate); per-sweep suffix sums make the tail
// integral of a piecewise-linear f an O(1) lookup.
class OperatorContext {
public:
    OperatorContext(const ModelParams& params, const SignalModel& sig,
                    const std::vector<double>& grid, double p, const Numerics& num)
        : params_(params),
          dist_(sig, p),
          grid_(&grid),
          num_(num),
          p_bar_(params.p_bar()) {
        const std::size_t n = grid.size();
        fh_.resize(n);
        fl_.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            fh_[j] = dist_.cdf_theta(Quality::High, grid[j]);
            fl_[j] = dist_.cdf_theta(Quality::Low, grid[j]);
        }
        suffix_.assign(n, 0.0);
        f_ = nullptr;
    }

    const PosteriorDist& dist() const { return dist_; }

    // installs the current iterate (values on the shared grid) and rebuilds
    // the suffix integrals int_{grid[j]}^1 f dPhi
    void set_function(const std::vector<double>& f) {
        f_ = &f;
        const auto& g = *grid_;
        const std::size_t n = g.size();
        suffix_[n - 1] = 0.0;
        for (std::size_t j = n - 1; j-- > 0;) {
            const double mass = mix_mass(fh_[j], fl_[j], fh_[j + 1], fl_[j + 1]);
            const double m1 = dist_.p() * (fh_[j + 1] - fh_[j]);
            const double slope = (f[j + 1] - f[j]) / (g[j + 1] - g[j]);
            suffix_[j] = suffix_[j + 1] + f[j] * mass + slope * (m1 - g[j] * mass);
        }
    }

    double f_at(double b) const {
        const auto& g = *grid_;
        const auto& f = *f_;
        if (b <= g.front()) return f.front();
        if (b >= g.back()) return f.back();
        const std::size_t j = cell_index(b);
        const double t = (b - g[j]) / (g[j + 1] - g[j]);
        return f[j] + t * (f[j + 1] - f[j]);
    }

    // int_r^1 f dPhi(.|p) for the installed iterate
    double tail_integral(double r) const {
        const auto& g = *grid_;
        if (r <= g.front()) return suffix_.front();
        if (r >= g.back()) return 0.0;
        const std::size_t j = cell_index(r);
        const double fhr = dist_.cdf_theta(Quality::High, r);
        const double flr = dist_.cdf_theta(Quality::Low, r);
        const double mass = mix_mass(fhr, flr, fh_[j + 1], fl_[j + 1]);
        const double m1 = dist_.p() * (fh_[j + 1] - fhr);
        const double slope = ((*f_)[j + 1] - (*f_)[j]) / (g[j + 1] - g[j]);
        const double f_r = (*f_)[j] + slope * (r - g[j]);
        return suffix_[j + 1] + f_r * mass + slope * (m1 - r * mass);
    }

    // T_f(p) together with the maximizing pooling interval
    OperatorResult apply() const {
        const double base = params_.theta(dist_.p()) - params_.c;
        const double beta = params_.beta;
        const auto choice = optimal_pooling(
            dist_, p_bar_, [this](double b) { return f_at(b); },
            [this](double r) { return tail_integral(r); }, num_.tol_root, num_.tol_root);
        const double pooled = (choice.r > choice.l)
                                  ? f_at(p_bar_) * dist_.mass(choice.l, choice.r)
                                  : 0.0;
        return {base + beta * (pooled + tail_integral(choice.r)), choice.l, choice.r};
    }

    // truthful variant: no pooling, beliefs below p_bar stop
    double apply_truthful() const {
        return params_.theta(dist_.p()) - params_.c + params_.beta * suffix_.front();
    }

private:
    std::size_t cell_index(double b) const {
        const auto& g = *grid_;
        if (b >= g[g.size() - 2]) return g.size() - 2;
        return static_cast<std::size_t>(
                   std::upper_bound(g.begin(), g.end(), b) - g.begin()) - 1;
    }

    double mix_mass(double fha, double fla, double fhb, double flb) const {
        return dist_.p() * (fhb - fha) + (1.0 - dist_.p()) * (flb - fla);
    }

    const ModelParams& params_;
    PosteriorDist dist_;
    const std::vector<double>* grid_;
    Numerics num_;
    double p_bar_;
    std::vector<double> fh_, fl_;      // Phi_theta at the grid nodes
    std::vector<double> suffix_;       // int_{node}^1 f dPhi
    const std::vector<double>* f_;
};

std::vector<double> initial_guess(const ModelParams& params,
                                  const std::vector<double>& grid) {
    std::vector<double> f(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        f[i] = std::max(params.theta(grid[i]) - params.c, 0.0) / (1.0 - params.beta);
    return f;
}

// Generic value iteration driver: `sweep` fills `next` from `cur`, the last
// node is pinned to (H-c)/(1-beta).  Returns the number of sweeps.
template <typename Sweep>
int iterate_to_fixed_point(const ModelParams& params, const Numerics& num,
                           std::vector<double>& f, Sweep&& sweep, const char* what) {
    const double pin = (params.H - params.c) / (1.0 - params.beta);
    const double stop = num.tol_value * (1.0 - params.beta);
    std::vector<double> next(f.size());
    f.back() = pin;
    for (int it = 1; it <= num.max_iters; ++it) {
        sweep(f, next);
        next.back() = pin;
        double delta = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i)
            delta = std::max(delta, std::fabs(next[i] - f[i]));
        f.swap(next);
        if (delta <= stop) return it;
        if (it == num.max_iters)
            throw SolveError(std::string(what) + ": no convergence within max_iters", delta);
    }
    return num.max_iters;
}

// theta-conditional tail machinery for policy evaluation.  Masses of grid
// cells under Phi_theta(.|p) are exact; first moments need quadrature since
// int b dPhi_theta has no antiderivative in terms of F_theta alone.
struct ThetaSegments {
    // segment s covers [lo_s, grid[cell_s + 1]] inside cell cell_s
    std::vector<std::size_t> cell;
    std::vector<double> lo, mass_h, m1_h, mass_l, m1_l;
    double buy_mass_h = 0.0, buy_mass_l = 0.0;    // 1 - Phi_theta(l*|p)
    double pool_mass_h = 0.0, pool_mass_l = 0.0;  // Phi_theta(r*) - Phi_theta(l*)
};

ThetaSegments build_theta_segments(const PosteriorDist& dist,
                                   const std::vector<double>& grid, double l_star,
                                   double r_star, const GaussLegendre& gl) {
    ThetaSegments seg;
    seg.buy_mass_h = 1.0 - dist.cdf_theta(Quality::High, l_star);
    seg.buy_mass_l = 1.0 - dist.cdf_theta(Quality::Low, l_star);
    seg.pool_mass_h = dist.mass_theta(Quality::High, l_star, r_star);
    seg.pool_mass_l = dist.mass_theta(Quality::Low, l_star, r_star);

    const std::size_t n = grid.size();
    // panel width resolving both smoothness scales of b(p,v) f_theta(v):
    // the density scale (~sigma, via the effective range) and the belief
    // transition scale 1/L'(v)
    const auto range = dist.signal().effective_range(1e-12);
    const double mid = 0.5 * (range.first + range.second);
    const double scale = std::min((range.second - range.first) / 15.0,
                                  1.0 / dist.signal().loglr_slope(mid));
    const double panel_w = 2.0 * scale;

    // moment of b over [a_b, b_b] (belief units) under theta, by v-space GL
    const auto moment = [&](Quality q, double a_b, double b_b, double mass_q) {
        if (mass_q <= 1e-300) return 0.0;
        const double va = dist.v_of_b(a_b);
        double vb = dist.v_of_b(b_b);
        double upper_mass = 0.0;
        if (b_b >= 1.0 - kBeliefEps) {
            // split the unbounded top at b = 1 - 1e-14; beyond it b == 1
            const double v_stop =
                dist.signal().loglr_inv(logit(1.0 - 1e-14) - logit(dist.p()));
            if (va >= v_stop) return mass_q;
            upper_mass = 1.0 - dist.signal().cdf(q, v_stop);
            vb = v_stop;
        }
        const int panels = std::max(1, (int)std::ceil((vb - va) / panel_w));
        return gl.integrate(
                   [&](double v) { return dist.b_of_v(v) * dist.signal().pdf(q, v); },
                   va, vb, panels) +
               upper_mass;
    };

    // partial cell at r_star, then the full cells above it
    std::size_t k = 0;
    while (k + 2 < n && grid[k + 1] <= r_star) ++k;
    for (std::size_t s = k; s + 1 < n; ++s) {
        const double lo = (s == k) ? r_star : grid[s];
        const double hi = grid[s + 1];
        if (hi <= lo) continue;
        const double mh = dist.cdf_theta(Quality::High, hi) - dist.cdf_theta(Quality::High, lo);
        const double ml = dist.cdf_theta(Quality::Low, hi) - dist.cdf_theta(Quality::Low, lo);
        seg.cell.push_back(s);
        seg.lo.push_back(lo);
        seg.mass_h.push_back(mh);
        seg.mass_l.push_back(ml);
        seg.m1_h.push_back(moment(Quality::High, lo, hi, mh));
        seg.m1_l.push_back(moment(Quality::Low, lo, hi, ml));
    }
    return seg;
}

}  // namespace

OperatorResult bellman_operator(const ModelParams& params, const SignalModel& sig,
                                const GridFunction& f, double p, const Numerics& num) {
    const double p_bar = params.p_bar();
    if (!(p >= p_bar && p <= 1.0))
        throw std::invalid_argument("bellman_operator: p must lie in [p_bar, 1]");
    if (p >= kNearOne) {
        // Phi(.|p) is numerically degenerate at b = 1
        return {params.theta(p) - params.c + params.beta * f.ys.back(), p_bar, p_bar};
    }
    OperatorContext ctx(params, sig, f.xs, p, num);
    ctx.set_function(f.ys);
    return ctx.apply();
}

double optimal_l(const ModelParams& params, const SignalModel& sig,
                 const GridFunction& f, double p, const Numerics& num) {
    return bellman_operator(params, sig, f, p, num).l;
}

GridFunction value_truthful(const ModelParams& params, const SignalModel& sig,
                            const Numerics& num) {
    params.validate();
    num.validate();
    const double p_bar = params.p_bar();
    auto grid = uniform_grid(p_bar, 1.0, num.grid_n);

    std::vector<OperatorContext> ctxs;
    ctxs.reserve(grid.size() - 1);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        ctxs.emplace_back(params, sig, grid, grid[i], num);

    auto f = initial_guess(params, grid);
    iterate_to_fixed_point(params, num, f,
                           [&](const std::vector<double>& cur, std::vector<double>& next) {
                               for (std::size_t i = 0; i < ctxs.size(); ++i) {
                                   if (grid[i] >= kNearOne) {
                                       next[i] = params.theta(grid[i]) - params.c +
                                                 params.beta * cur.back();
                                       continue;
                                   }
                                   ctxs[i].set_function(cur);
                                   next[i] = ctxs[i].apply_truthful();
                               }
                           },
                           "value_truthful");
    return GridFunction(std::move(grid), std::move(f));
}

ValueSolution solve_commitment(const ModelParams& params, const SignalModel& sig,
                               const Numerics& num) {
    params.validate();
    num.validate();
    const double p_bar = params.p_bar();
    const std::size_t n = static_cast<std::size_t>(num.grid_n);
    auto grid = uniform_grid(p_bar, 1.0, num.grid_n);

    std::vector<OperatorContext> ctxs;
    ctxs.reserve(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i)
        ctxs.emplace_back(params, sig, grid, grid[i], num);

    auto f = initial_guess(params, grid);
    const int iterations = iterate_to_fixed_point(
        params, num, f,
        [&](const std::vector<double>& cur, std::vector<double>& next) {
            for (std::size_t i = 0; i + 1 < n; ++i) {
                if (grid[i] >= kNearOne) {
                    next[i] = params.theta(grid[i]) - params.c + params.beta * cur.back();
                    continue;
                }
                ctxs[i].set_function(cur);
                next[i] = ctxs[i].apply().value;
            }
        },
        "solve_commitment");

    ValueSolution sol;
    sol.params = params;
    if (const auto* g = dynamic_cast<const GaussianSignal*>(&sig)) sol.sigma = g->sigma();
    sol.grid = grid;
    sol.vstar = f;
    sol.delta = delta_bound(params);
    sol.iterations = iterations;
    sol.lstar.assign(n, p_bar);
    sol.rstar.assign(n, p_bar);

    // policy extraction and the reported fixed-point residual
    double residual = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (grid[i] >= kNearOne) {
            residual = std::max(
                residual, std::fabs(params.theta(grid[i]) - params.c +
                                    params.beta * f.back() - f[i]));
            continue;
        }
        ctxs[i].set_function(f);
        const auto res = ctxs[i].apply();
        sol.lstar[i] = res.l;
        sol.rstar[i] = res.r;
        residual = std::max(residual, std::fabs(res.value - f[i]));
    }
    sol.residual = residual;

    // quality-conditional continuation values under the extracted policy:
    //   V_theta(p) = (theta_v - c) (1 - Phi_theta(l*|p))
    //              + beta [ V_theta(pbar) (Phi_theta(r*|p) - Phi_theta(l*|p))
    //                       + int_{r*}^1 V_theta(b) dPhi_theta(b|p) ]
    const GaussLegendre gl(12);
    std::vector<ThetaSegments> segs;
    segs.reserve(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i)
        segs.push_back(build_theta_segments(ctxs[i].dist(), grid, sol.lstar[i],
                                            sol.rstar[i], gl));

    const double beta = params.beta;
    const auto policy_eval = [&](Quality q, double pinned) {
        const double util = params.mean(q) - params.c;
        std::vector<double> v(n, 0.0);
        v.back() = pinned;
        const double stop = num.tol_value * (1.0 - beta);
        std::vector<double> next(n);
        for (int it = 1; it <= num.max_iters; ++it) {
            for (std::size_t i = 0; i + 1 < n; ++i) {
                if (grid[i] >= kNearOne) {
                    next[i] = util + beta * v.back();
                    continue;
                }
                const auto& s = segs[i];
                const double buy_mass =
                    q == Quality::High ? s.buy_mass_h : s.buy_mass_l;
                const double pool_mass =
                    q == Quality::High ? s.pool_mass_h : s.pool_mass_l;
                double tail = 0.0;
                for (std::size_t k = 0; k < s.cell.size(); ++k) {
                    const std::size_t c = s.cell[k];
                    const double slope = (v[c + 1] - v[c]) / (grid[c + 1] - grid[c]);
                    const double v_lo = v[c] + slope * (s.lo[k] - grid[c]);
                    const double mass = q == Quality::High ? s.mass_h[k] : s.mass_l[k];
                    const double m1 = q == Quality::High ? s.m1_h[k] : s.m1_l[k];
                    tail += v_lo * mass + slope * (m1 - s.lo[k] * mass);
                }
                next[i] = util * buy_mass + beta * (v.front() * pool_mass + tail);
            }
            next.back() = pinned;
            double delta = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                delta = std::max(delta, std::fabs(next[i] - v[i]));
            v.swap(next);
            if (delta <= stop) break;
            if (it == num.max_iters)
                throw SolveError("policy evaluation: no convergence", delta);
        }
        return v;
    };

    sol.v_high = policy_eval(Quality::High, (params.H - params.c) / (1.0 - beta));
    sol.v_low = policy_eval(Quality::Low, (params.L - params.c) / (1.0 - beta));
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (sol.v_high[i + 1] < sol.v_high[i] - 1e-9) sol.vh_nondecreasing = false;
        if (sol.v_low[i + 1] > sol.v_low[i] + 1e-9) sol.vl_nonincreasing = false;
    }
    return sol;
}

// --- ValueSolution -----------------------------------------------------------

double ValueSolution::interp(const std::vector<double>& ys, double p) const {
    if (p <= grid.front()) return ys.front();
    if (p >= grid.back()) return ys.back();
    const std::size_t i = static_cast<std::size_t>(
                              std::upper_bound(grid.begin(), grid.end(), p) -
                              grid.begin()) - 1;
    const double t = (p - grid[i]) / (grid[i + 1] - grid[i]);
    return ys[i] + t * (ys[i + 1] - ys[i]);
}

nlohmann::json ValueSolution::to_json() const {
    return nlohmann::json{
        {"params",
         {{"H", params.H},
          {"L", params.L},
          {"c", params.c},
          {"beta", params.beta},
          {"p1", params.p1},
          {"sigma", sigma}}},
        {"grid", grid},
        {"vstar", vstar},
        {"lstar", lstar},
        {"rstar", rstar},
        {"v_high", v_high},
        {"v_low", v_low},
        {"delta_bound", delta},
        {"residual", residual},
        {"iterations", iterations},
        {"diagnostics",
         {{"v_high_nondecreasing", vh_nondecreasing},
          {"v_low_nonincreasing", vl_nonincreasing}}}};
}

ValueSolution ValueSolution::from_json(const nlohmann::json& j) {
    ValueSolution s;
    const auto& p = j.at("params");
    s.params.H = p.at("H").get<double>();
    s.params.L = p.at("L").get<double>();
    s.params.c = p.at("c").get<double>();
    s.params.beta = p.at("beta").get<double>();
    s.params.p1 = p.at("p1").get<double>();
    s.sigma = p.at("sigma").get<double>();
    j.at("grid").get_to(s.grid);
    j.at("vstar").get_to(s.vstar);
    j.at("lstar").get_to(s.lstar);
    j.at("rstar").get_to(s.rstar);
    j.at("v_high").get_to(s.v_high);
    j.at("v_low").get_to(s.v_low);
    s.delta = j.at("delta_bound").get<double>();
    s.residual = j.at("residual").get<double>();
    s.iterations = j.at("iterations").get<int>();
    if (j.contains("diagnostics")) {
        const auto& d = j.at("diagnostics");
        s.vh_nondecreasing = d.value("v_high_nondecreasing", true);
        s.vl_nonincreasing = d.value("v_low_nonincreasing", true);
    }
    const std::size_t n = s.grid.size();
    if (n < 2 || s.vstar.size() != n || s.lstar.size() != n || s.rstar.size() != n ||
        s.v_high.size() != n || s.v_low.size() != n)
        throw ConfigError("solution file: inconsistent array lengths");
    return s;
}

}  // namespace revsim
