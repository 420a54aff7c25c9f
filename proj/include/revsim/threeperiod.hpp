#pragma once

#include <optional>
#include <string>
#include <vector>

#include "revsim/bellman.hpp"
#include "revsim/params.hpp"
#include "revsim/pooling.hpp"
#include "revsim/quadrature.hpp"
#include "revsim/signal.hpp"

namespace revsim {

// Interval equilibrium of the three-period cheap-talk game: thresholds
// 0 = D_0 < D_1 < ... < D_{K+1} = 1 and messages m_0 < m_1 < ... < m_K,
// where m_0 is the stopping message (no purchase) and each buy message
// satisfies consistency m_j = E[b | b in (D_j, D_{j+1}]].
struct CheapTalkPartition {
    std::vector<double> thresholds;  // size K+2, first 0, last 1
    std::vector<double> messages;    // size K+1, messages[0] is the stop message
    double residual = 0.0;           // max violated indifference/consistency
    bool pinned_m1 = false;          // variant family with m_1 forced to p_bar

    int buy_messages() const { return static_cast<int>(messages.size()) - 1; }
};

struct CheapTalkResult {
    bool found = false;
    CheapTalkPartition partition;
    std::string note;
};

// Commitment solution of the three-period game at prior p1.
struct Commitment3P {
    double l = 0.0;
    double r = 0.0;
    double value = 0.0;  // ex-ante continuation value E_{b1}[V_1]
};

// Three-period market: no discounting (beta = 1), Gaussian
// utilities v ~ N(theta, sigma^2).  The first reviewer's continuation value
// conditional on the second consumer buying is
//   vhat(p2, b1) = theta(b1) - c + b1 (1 - F_H(vbar2(p2))) (H - c)
//                + (1 - b1)(1 - F_L(vbar2(p2))) (L - c),
// where vbar2(p2) is the utility that leaves the second reviewer exactly at
// the purchase threshold.
class ThreePeriodModel {
public:
    // quad_nodes/quad_panels control the v-space Gauss-Legendre rule used for
    // the truthful tail integral
    ThreePeriodModel(ModelParams model, double sigma, int quad_nodes = 64,
                     int quad_panels = 16);

    const ModelParams& model() const { return model_; }
    const GaussianSignal& signal() const { return signal_; }
    double p_bar() const { return model_.p_bar(); }

    // unique v with posterior_b(p2, v) = p_bar
    double vbar2(double p2) const;

    double vhat(double p2, double b1) const;

    // d vhat / d p2; zero exactly at p2 = b1 (single peak)
    double vhat_dp2(double p2, double b1) const;

    // Optimal committed pooling interval around p_bar at prior p1 >= p_bar:
    // maximizes vhat(pbar|pbar) mass(l, r(l)) + int_{r(l)}^1 vhat(b|b) dPhi(b|p1).
    Commitment3P solve_commitment(double p1, double tol_root = 1e-10) const;

    // First-period value curve under the committed policy.
    double commitment_value_at(const Commitment3P& sol, double b1) const;

    // Shooting solver for the K-buy-message interval equilibrium.  Returns a
    // no-solution result (found = false) when no partition closes for this K.
    CheapTalkResult solve_cheaptalk(double p1, int K, double tol_root = 1e-10) const;

    // Pinned variant (the fig3 default): m_1 forced to p_bar; the terminal
    // condition is met by shooting on D_1, and the left-over seed indifference
    // |vhat(pbar, D_1)| is reported as the partition residual.
    CheapTalkResult solve_cheaptalk_pinned(double p1, int K, double tol_root = 1e-10) const;

    // All closing (unpinned) partitions for K = 2..k_max.
    std::vector<CheapTalkResult> find_partitions(double p1, int k_max = 8) const;

    // Value curve under a cheap-talk partition.
    double cheaptalk_value_at(const CheapTalkPartition& part, double b1) const;

    // Ex-ante value E_{b1 ~ Phi(.|p1)} of a cheap-talk partition (exact:
    // vhat is affine in b1 and the partition is consistent).
    double cheaptalk_expected_value(const CheapTalkPartition& part, double p1) const;

    // int_r^1 vhat(b|b) dPhi(b|p1), by composite Gauss-Legendre in v-space.
    double truthful_tail(double p1, double r) const;

private:
    struct Shot;  // forward recursion state
    Shot run_chain(const PosteriorDist& dist, double d1, int K, bool pinned,
                   double tol_root) const;
    CheapTalkResult scan_cheaptalk(double p1, int K, bool pinned, double tol_root) const;

    ModelParams model_;
    GaussianSignal signal_;
    GaussLegendre quad_;
    int quad_panels_;
};

}  // namespace revsim
