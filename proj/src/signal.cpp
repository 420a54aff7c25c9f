#include "revsim/signal.hpp"

#include <cmath>
#include <limits>

namespace revsim {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;

double std_normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

// Acklam's rational approximation for the standard normal quantile,
// polished with one Halley step (~1e-15 absolute accuracy).
double std_normal_quantile(double u) {
    if (u <= 0.0) return -std::numeric_limits<double>::infinity();
    if (u >= 1.0) return std::numeric_limits<double>::infinity();
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double plow = 0.02425;
    double z;
    if (u < plow) {
        const double q = std::sqrt(-2.0 * std::log(u));
        z = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (u <= 1.0 - plow) {
        const double q = u - 0.5, r = q * q;
        z = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - u));
        z = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // Halley refinement
    const double e = std_normal_cdf(z) - u;
    const double g = e / std_normal_pdf(z);
    z -= g / (1.0 + 0.5 * g * z);
    return z;
}

}  // namespace

GaussianSignal::GaussianSignal(double high_mean, double low_mean, double sigma)
    : mu_h_(high_mean), mu_l_(low_mean), sigma_(sigma) {
    if (!(sigma > 0.0)) throw ConfigError("signal.sigma: must be > 0");
    if (!(high_mean > low_mean))
        throw ConfigError("signal: high mean must exceed low mean");
    slope_ = (mu_h_ - mu_l_) / (sigma_ * sigma_);
}

double GaussianSignal::pdf(Quality q, double v) const {
    return std_normal_pdf((v - mean(q)) / sigma_) / sigma_;
}

double GaussianSignal::cdf(Quality q, double v) const {
    return std_normal_cdf((v - mean(q)) / sigma_);
}

double GaussianSignal::quantile(Quality q, double u) const {
    return mean(q) + sigma_ * std_normal_quantile(u);
}

double GaussianSignal::loglr(double v) const {
    if (!std::isfinite(v)) throw std::domain_error("loglr: v outside support");
    return slope_ * (v - 0.5 * (mu_h_ + mu_l_));
}

double GaussianSignal::loglr_inv(double x) const {
    return 0.5 * (mu_h_ + mu_l_) + x / slope_;
}

std::pair<double, double> GaussianSignal::effective_range(double eps) const {
    const double z = -std_normal_quantile(eps);  // > 0 for small eps
    return {mu_l_ - z * sigma_, mu_h_ + z * sigma_};
}

// --- free functions ----------------------------------------------------------

double log_likelihood_ratio(const SignalModel& sig, double v) { return sig.loglr(v); }

double posterior_b(const SignalModel& sig, double p, double v) {
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    return sigmoid(logit(p) + sig.loglr(v));
}

double posterior_cdf(const SignalModel& sig, Quality q, double b, double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("posterior_cdf: degenerate prior p");
    if (b <= 0.0) return 0.0;
    if (b >= 1.0) return 1.0;
    return sig.cdf(q, sig.loglr_inv(logit(b) - logit(p)));
}

MixturePoint posterior_mixture(const SignalModel& sig, double b, double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("posterior_mixture: degenerate prior p");
    MixturePoint out;
    out.cdf = p * posterior_cdf(sig, Quality::High, b, p) +
              (1.0 - p) * posterior_cdf(sig, Quality::Low, b, p);
    const double bc = clamp_belief(b);
    const double v = sig.loglr_inv(logit(bc) - logit(p));
    const double fmix = p * sig.pdf(Quality::High, v) + (1.0 - p) * sig.pdf(Quality::Low, v);
    out.density = fmix / (sig.loglr_slope(v) * bc * (1.0 - bc));
    return out;
}

double interval_mean(const SignalModel& sig, double p, double l, double r) {
    return PosteriorDist(sig, p).mean_on(l, r);
}

double sample_value(const SignalModel& sig, Quality q, std::mt19937_64& rng) {
    // open-interval uniform so the quantile stays finite
    const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
    return sig.quantile(q, u);
}

// --- PosteriorDist -----------------------------------------------------------

PosteriorDist::PosteriorDist(const SignalModel& sig, double p) : sig_(&sig), p_(p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::domain_error("PosteriorDist: degenerate prior p");
    logit_p_ = logit(p);
}

double PosteriorDist::v_of_b(double b) const {
    if (b <= kBeliefEps) return -std::numeric_limits<double>::infinity();
    if (b >= 1.0 - kBeliefEps) return std::numeric_limits<double>::infinity();
    return sig_->loglr_inv(logit(b) - logit_p_);
}

double PosteriorDist::cdf_theta(Quality q, double b) const {
    if (b <= kBeliefEps) return 0.0;
    if (b >= 1.0 - kBeliefEps) return 1.0;
    return sig_->cdf(q, v_of_b(b));
}

double PosteriorDist::cdf(double b) const {
    return p_ * cdf_theta(Quality::High, b) + (1.0 - p_) * cdf_theta(Quality::Low, b);
}

double PosteriorDist::density(double b) const {
    const double bc = clamp_belief(b);
    const double v = sig_->loglr_inv(logit(bc) - logit_p_);
    const double fmix =
        p_ * sig_->pdf(Quality::High, v) + (1.0 - p_) * sig_->pdf(Quality::Low, v);
    return fmix / (sig_->loglr_slope(v) * bc * (1.0 - bc));
}

double PosteriorDist::mass(double a, double b) const { return cdf(b) - cdf(a); }

double PosteriorDist::first_moment(double a, double b) const {
    // int_a^b x dPhi(x|p) = p (Phi_H(b|p) - Phi_H(a|p))
    return p_ * (cdf_theta(Quality::High, b) - cdf_theta(Quality::High, a));
}

double PosteriorDist::mass_theta(Quality q, double a, double b) const {
    return cdf_theta(q, b) - cdf_theta(q, a);
}

double PosteriorDist::mean_on(double a, double b) const {
    if (!(a < b)) throw std::invalid_argument("mean_on: requires a < b");
    const double m = mass(a, b);
    if (m <= 1e-300)
        throw SolveError("mean_on: interval carries no posterior mass", m);
    return first_moment(a, b) / m;
}

}  // namespace revsim
