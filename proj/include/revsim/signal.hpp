#pragma once

#include <memory>
#include <limits>
#include <random>
#include <utility>

#include "revsim/common.hpp"
#include "revsim/params.hpp"

namespace revsim {

// Quality-contingent value distributions F_theta with a monotone
// log-likelihood ratio.  Both densities must be strictly positive on a common
// open support, and the log-likelihood ratio L(v) = ln(f_H(v)/f_L(v)) must be
// strictly increasing with limits -inf / +inf at the support edges, so that
// private beliefs are unbounded.
class SignalModel {
public:
    virtual ~SignalModel() = default;

    virtual double pdf(Quality q, double v) const = 0;
    virtual double cdf(Quality q, double v) const = 0;
    virtual double quantile(Quality q, double u) const = 0;

    // ln(f_H(v)/f_L(v)); throws std::domain_error outside the support
    virtual double loglr(double v) const = 0;
    virtual double loglr_inv(double x) const = 0;
    // derivative L'(v), needed for the change of variables to belief space
    virtual double loglr_slope(double v) const = 0;

    virtual double support_lo() const = 0;
    virtual double support_hi() const = 0;

    // [lo, hi] carrying all but `eps` of the mass under either quality;
    // used to truncate v-space quadratures
    virtual std::pair<double, double> effective_range(double eps) const = 0;
};

// Gaussian location family: v ~ N(theta, sigma^2).  The log-likelihood ratio
// is linear: L(v) = (H - L) (v - (H+L)/2) / sigma^2.
class GaussianSignal final : public SignalModel {
public:
    GaussianSignal(double high_mean, double low_mean, double sigma);
    GaussianSignal(const ModelParams& params, double sigma)
        : GaussianSignal(params.H, params.L, sigma) {}

    double pdf(Quality q, double v) const override;
    double cdf(Quality q, double v) const override;
    double quantile(Quality q, double u) const override;
    double loglr(double v) const override;
    double loglr_inv(double x) const override;
    double loglr_slope(double /*v*/) const override { return slope_; }
    double support_lo() const override { return -std::numeric_limits<double>::infinity(); }
    double support_hi() const override { return std::numeric_limits<double>::infinity(); }
    std::pair<double, double> effective_range(double eps) const override;

    double sigma() const { return sigma_; }

private:
    double mean(Quality q) const { return q == Quality::High ? mu_h_ : mu_l_; }
    double mu_h_, mu_l_, sigma_, slope_;
};

// Public/private belief pair of one consumer: the public belief p from past
// reviews and her private posterior b after consuming.
struct BeliefPair {
    double public_belief = 0.5;
    double private_belief = 0.5;
};

// --- Bayesian belief updating ------------------------------------------------

// ln(f_H(v)/f_L(v))
double log_likelihood_ratio(const SignalModel& sig, double v);

// Private posterior b(p, v) = p f_H(v) / (p f_H(v) + (1-p) f_L(v)),
// computed in log-odds space: logit(b) = logit(p) + L(v).
// Degenerate priors p in {0, 1} are absorbing and returned unchanged.
double posterior_b(const SignalModel& sig, double p, double v);

// Phi_theta(b | p) = F_theta(L^{-1}(logit(b) - logit(p))): the c.d.f. of the
// private posterior conditional on quality.  Requires p in (0, 1).
double posterior_cdf(const SignalModel& sig, Quality q, double b, double p);

struct MixturePoint {
    double cdf;      // Phi(b|p) = p Phi_H + (1-p) Phi_L
    double density;  // phi(b|p)
};

// Unconditional c.d.f./density of the private posterior given prior p.
MixturePoint posterior_mixture(const SignalModel& sig, double b, double p);

// E[b | b in [l, r]] under Phi(.|p); throws on zero mass.
double interval_mean(const SignalModel& sig, double p, double l, double r);

// Draw v ~ F_theta by the quantile transform (deterministic given rng state).
double sample_value(const SignalModel& sig, Quality q, std::mt19937_64& rng);

// --- Posterior-belief distribution for a fixed prior -------------------------

// The distribution Phi(.|p) of the reviewer's private posterior at public
// belief p, with the conditional components Phi_theta(.|p).  Mass and first
// moment of the mixture are exact: substituting b = b(p, v) turns them into
// v-space integrals of the mixture density resp. p f_H, whose antiderivatives
// are the signal c.d.f.s (b phi(b|p) db = p dPhi_H).
class PosteriorDist {
public:
    PosteriorDist(const SignalModel& sig, double p);

    double p() const { return p_; }

    // v with b(p, v) = b; +/-inf at clamped endpoints
    double v_of_b(double b) const;
    double b_of_v(double v) const { return sigmoid(logit_p_ + sig_->loglr(v)); }

    double cdf(double b) const;                      // Phi(b|p)
    double density(double b) const;                  // phi(b|p)
    double cdf_theta(Quality q, double b) const;     // Phi_theta(b|p)

    double mass(double a, double b) const;           // Phi(b|p) - Phi(a|p)
    double first_moment(double a, double b) const;   // int_a^b x dPhi(x|p)
    double mass_theta(Quality q, double a, double b) const;

    // conditional mean on [a, b]; throws SolveError on (numerically) zero mass
    double mean_on(double a, double b) const;

    const SignalModel& signal() const { return *sig_; }

private:
    const SignalModel* sig_;
    double p_, logit_p_;
};

}  // namespace revsim
