#include "revsim/threeperiod.hpp"

#include <cmath>

#include "revsim/quadrature.hpp"
#include "revsim/rootfind.hpp"

namespace revsim {

ThreePeriodModel::ThreePeriodModel(ModelParams model, double sigma, int quad_nodes,
                                   int quad_panels)
    : model_(model),
      signal_(model.H, model.L, sigma),
      quad_(quad_nodes),
      quad_panels_(quad_panels) {
    model_.beta = 1.0;  // second- and third-consumer welfare enter equally
    model_.validate(/*allow_unit_beta=*/true);
    if (quad_panels_ < 1)
        throw ConfigError("three-period model: invalid quadrature settings");
}

double ThreePeriodModel::vbar2(double p2) const {
    return signal_.loglr_inv(logit(p_bar()) - logit(p2));
}

double ThreePeriodModel::vhat(double p2, double b1) const {
    const double v2 = vbar2(p2);
    const double sh = 1.0 - signal_.cdf(Quality::High, v2);
    const double sl = 1.0 - signal_.cdf(Quality::Low, v2);
    return model_.theta(b1) - model_.c + b1 * sh * (model_.H - model_.c) +
           (1.0 - b1) * sl * (model_.L - model_.c);
}

double ThreePeriodModel::vhat_dp2(double p2, double b1) const {
    const double v2 = vbar2(p2);
    const double pb = p_bar();
    const double sig2 = signal_.sigma() * signal_.sigma();
    const double pref = (1.0 - b1) * signal_.pdf(Quality::Low, v2) * pb * sig2 /
                        (p2 * (1.0 - p2));
    // bracket (b1/(1-b1)) ((1-pbar)/pbar) f_H/f_L - 1 collapses to
    // exp(logit(b1) - logit(p2)) - 1 via the defining identity of vbar2,
    // which keeps the root at p2 = b1 exact
    return pref * std::expm1(logit(b1) - logit(p2));
}

double ThreePeriodModel::truthful_tail(double p1, double r) const {
    const PosteriorDist dist(signal_, p1);
    if (r >= 1.0 - kBeliefEps) return 0.0;
    const double v_lo = std::max(dist.v_of_b(std::max(r, p_bar())),
                                 signal_.effective_range(1e-12).first);
    const double v_hi = signal_.effective_range(1e-12).second;
    if (v_lo >= v_hi) {
        // nearly all mass already above: vhat(b|b) -> theta(b1) - c + ... at b=1
        return vhat(1.0 - kBeliefEps, 1.0 - kBeliefEps) * dist.mass(r, 1.0);
    }
    const double p = dist.p();
    const double bulk = quad_.integrate(
        [&](double v) {
            const double b = dist.b_of_v(v);
            const double fmix = p * signal_.pdf(Quality::High, v) +
                                (1.0 - p) * signal_.pdf(Quality::Low, v);
            return vhat(b, b) * fmix;
        },
        v_lo, v_hi, quad_panels_);
    // beyond v_hi the posterior is numerically 1
    const double top = vhat(1.0 - kBeliefEps, 1.0 - kBeliefEps) *
                       dist.mass(dist.b_of_v(v_hi), 1.0);
    return bulk + top;
}

Commitment3P ThreePeriodModel::solve_commitment(double p1, double tol_root) const {
    if (!(p1 >= p_bar()))
        throw std::invalid_argument("solve_commitment_3p: requires p1 >= p_bar");
    const PosteriorDist dist(signal_, p1);
    const auto terminal = [this](double b) { return vhat(b, b); };
    const auto tail = [this, p1](double r) { return truthful_tail(p1, r); };
    const auto choice = optimal_pooling(dist, p_bar(), terminal, tail, tol_root, tol_root);
    Commitment3P out;
    out.l = choice.l;
    out.r = choice.r;
    const double pooled =
        (choice.r > choice.l) ? vhat(p_bar(), p_bar()) * dist.mass(choice.l, choice.r) : 0.0;
    out.value = pooled + truthful_tail(p1, choice.r);
    return out;
}

double ThreePeriodModel::commitment_value_at(const Commitment3P& sol, double b1) const {
    if (b1 < sol.l) return 0.0;
    if (b1 <= sol.r) return vhat(p_bar(), b1);
    return vhat(b1, b1);
}

// --- cheap talk ---------------------------------------------------------------

namespace {

// surrogate terminal gaps for infeasible chains; sign encodes the direction
// the shooting parameter must move (negative: D_1 too small)
constexpr double kSeedFail = -3.0;
constexpr double kOvershoot = 2.0;

}  // namespace

struct ThreePeriodModel::Shot {
    // Terminal residual m_K - E[b | b in (D_K, 1]] when the chain completes
    // (zero iff the last consistency equation closes at D_{K+1} = 1); smooth
    // in the shooting parameter, unlike the location of the last threshold,
    // because the posterior density vanishes at b = 1.
    double gap = 0.0;
    bool complete = false;
    std::vector<double> deltas;    // D_1 .. D_{K+1}
    std::vector<double> messages;  // m_1 .. m_K
};

ThreePeriodModel::Shot ThreePeriodModel::run_chain(const PosteriorDist& dist, double d1,
                                                   int K, bool pinned,
                                                   double tol_root) const {
    Shot s;
    const double pb = p_bar();
    const double hi = 1.0 - kBeliefEps;

    double m1;
    if (pinned) {
        m1 = pb;
    } else {
        // seed indifference: vhat(m1, d1) = 0 on the decreasing branch m > d1
        const double peak = vhat(d1, d1);
        if (peak < 0.0) {
            s.gap = kSeedFail;
            return s;
        }
        const double at_top = vhat(hi, d1);
        if (at_top > 0.0) {
            s.gap = kOvershoot * (K + 1);
            return s;
        }
        m1 = brent([&](double m) { return vhat(m, d1); }, d1, hi, peak, at_top, tol_root);
    }

    s.deltas.push_back(d1);
    s.messages.push_back(m1);

    for (int j = 1; j <= K; ++j) {
        const double dj = s.deltas.back();
        const double mj = s.messages.back();
        if (j == K) {
            // the last buy message must absorb (D_K, 1]; its consistency
            // residual is the shooting target
            s.deltas.push_back(1.0);
            s.complete = true;
            s.gap = mj - dist.mean_on(dj, 1.0);
            return s;
        }
        // consistency: E[b | b in (dj, x]] = mj determines the next threshold
        const auto excess = [&](double x) {
            return dist.first_moment(dj, x) - mj * dist.mass(dj, x);
        };
        const double at_one = excess(1.0);
        if (at_one < 0.0) {
            // remaining mass cannot average up to mj: chain overshoots
            s.gap = kOvershoot * (K + 1 - j);
            return s;
        }
        const double f_lo = excess(std::min(mj * (1.0 + 1e-12), hi));
        if (f_lo >= 0.0) {
            s.gap = kOvershoot * (K - j);  // degenerate interval
            return s;
        }
        double d_next = brent(excess, std::min(mj * (1.0 + 1e-12), hi), 1.0, f_lo,
                              at_one, tol_root);
        if (d_next >= hi) {
            s.gap = kOvershoot * (K - j);
            return s;
        }
        // indifference at d_next: vhat(m_next, d_next) = vhat(mj, d_next),
        // m_next on the decreasing branch beyond the peak at d_next
        const double target = vhat(mj, d_next);
        const double peak = vhat(d_next, d_next);
        const double at_top = vhat(hi, d_next);
        if (at_top > target) {
            s.gap = kOvershoot * (K - j);
            return s;
        }
        if (peak < target) {
            // single-peakedness rules this out for mj < d_next
            s.gap = kSeedFail;
            return s;
        }
        const double m_next = brent([&](double m) { return vhat(m, d_next) - target; },
                                    d_next, hi, peak - target, at_top - target, tol_root);
        s.deltas.push_back(d_next);
        s.messages.push_back(m_next);
    }
    return s;
}

namespace {

// residual audit over every consistency and indifference equation; the seed
// indifference is excluded for the pinned-m1 family (it is the deliberately
// dropped equation there)
double partition_residual(const ThreePeriodModel& tp, const PosteriorDist& dist,
                          const std::vector<double>& deltas,
                          const std::vector<double>& messages, bool pinned) {
    double res = 0.0;
    const int K = static_cast<int>(messages.size());
    for (int j = 0; j < K; ++j)
        res = std::max(res, std::fabs(dist.mean_on(deltas[j], deltas[j + 1]) - messages[j]));
    if (!pinned) res = std::max(res, std::fabs(tp.vhat(messages[0], deltas[0])));
    for (int j = 0; j + 1 < K; ++j)
        res = std::max(res, std::fabs(tp.vhat(messages[j], deltas[j + 1]) -
                                      tp.vhat(messages[j + 1], deltas[j + 1])));
    return res;
}

bool interleaving_ok(double p_bar, const std::vector<double>& deltas,
                     const std::vector<double>& messages) {
    constexpr double sep = 1e-7;  // rejects numerically degenerate partitions
    if (!(deltas.front() > 0.0 && deltas.front() < p_bar)) return false;
    if (!(messages.front() >= p_bar)) return false;
    for (std::size_t j = 0; j < messages.size(); ++j) {
        if (!(deltas[j] + sep < messages[j])) return false;
        if (j + 1 < deltas.size() && !(messages[j] + sep < deltas[j + 1])) return false;
    }
    return true;
}

}  // namespace

CheapTalkResult ThreePeriodModel::scan_cheaptalk(double p1, int K, bool pinned,
                                                 double tol_root) const {
    if (!(p1 >= p_bar()))
        throw std::invalid_argument("solve_cheaptalk_3p: requires p1 >= p_bar");
    if (K < 2) throw std::invalid_argument("solve_cheaptalk_3p: requires K >= 2");
    const PosteriorDist dist(signal_, p1);

    // scan the shooting parameter for sign changes of the terminal gap; a
    // bracket is accepted only if the full residual audit passes (the gap has
    // jump discontinuities where the chain switches feasibility branches).
    // Unpinned: the first valid crossing.  Pinned: the crossing minimizing the
    // dropped seed-indifference residual.
    const int scan = 400;
    const double accept_tol = 1e-8;
    const double lo = 1e-6, hi = p_bar() - 1e-9;
    CheapTalkResult best;
    double prev_d1 = lo;
    Shot prev = run_chain(dist, prev_d1, K, pinned, tol_root);
    for (int i = 1; i <= scan; ++i) {
        const double d1 = lo + (hi - lo) * i / scan;
        Shot cur = run_chain(dist, d1, K, pinned, tol_root);
        if ((prev.gap < 0.0) != (cur.gap < 0.0)) {
            const double root = brent(
                [&](double x) { return run_chain(dist, x, K, pinned, tol_root).gap; },
                prev_d1, d1, prev.gap, cur.gap, 1e-13);
            Shot sol = run_chain(dist, root, K, pinned, tol_root);
            const double audit =
                sol.complete
                    ? partition_residual(*this, dist, sol.deltas, sol.messages, pinned)
                    : 1.0;
            if (sol.complete && audit <= accept_tol &&
                interleaving_ok(p_bar(), sol.deltas, sol.messages)) {
                CheapTalkPartition part;
                part.pinned_m1 = pinned;
                part.thresholds.push_back(0.0);
                part.thresholds.insert(part.thresholds.end(), sol.deltas.begin(),
                                       sol.deltas.end());
                part.messages.push_back(0.5 * p_bar());  // stopping message
                part.messages.insert(part.messages.end(), sol.messages.begin(),
                                     sol.messages.end());
                part.residual = pinned ? std::fabs(vhat(p_bar(), sol.deltas.front()))
                                       : audit;
                if (!pinned) return {true, part, ""};
                if (!best.found || part.residual < best.partition.residual)
                    best = {true, part, ""};
            }
        }
        prev = cur;
        prev_d1 = d1;
    }
    if (best.found) return best;
    return {false, {},
            std::string(pinned ? "no pinned-m1" : "no") +
                " interval equilibrium closes for K = " + std::to_string(K)};
}

CheapTalkResult ThreePeriodModel::solve_cheaptalk(double p1, int K, double tol_root) const {
    return scan_cheaptalk(p1, K, /*pinned=*/false, tol_root);
}

CheapTalkResult ThreePeriodModel::solve_cheaptalk_pinned(double p1, int K,
                                                         double tol_root) const {
    return scan_cheaptalk(p1, K, /*pinned=*/true, tol_root);
}

std::vector<CheapTalkResult> ThreePeriodModel::find_partitions(double p1, int k_max) const {
    std::vector<CheapTalkResult> out;
    for (int K = 2; K <= k_max; ++K) {
        auto res = solve_cheaptalk(p1, K);
        if (res.found) out.push_back(std::move(res));
    }
    return out;
}

double ThreePeriodModel::cheaptalk_value_at(const CheapTalkPartition& part,
                                            double b1) const {
    // locate the partition cell of b1; cell 0 is the stop region
    std::size_t j = 0;
    while (j + 1 < part.thresholds.size() && b1 > part.thresholds[j + 1]) ++j;
    if (j == 0) return 0.0;
    return vhat(part.messages[j], b1);
}

double ThreePeriodModel::cheaptalk_expected_value(const CheapTalkPartition& part,
                                                  double p1) const {
    const PosteriorDist dist(signal_, p1);
    double ev = 0.0;
    for (std::size_t j = 1; j < part.messages.size(); ++j) {
        const double lo = part.thresholds[j], hi = part.thresholds[j + 1];
        const double mass = dist.mass(lo, hi);
        if (mass <= 0.0) continue;
        // vhat is affine in b1, so the cell integrates to mass * vhat(m_j, cell mean)
        ev += mass * vhat(part.messages[j], dist.first_moment(lo, hi) / mass);
    }
    return ev;
}

}  // namespace revsim
