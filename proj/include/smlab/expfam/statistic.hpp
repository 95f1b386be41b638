#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace smlab::expfam {

// erf from the positive-term series erf(x) = (2x/sqrt(pi)) e^{-x^2}
// sum_n (2x^2)^n / (2n+1)!!  (Abramowitz-Stegun 7.1.6), |error| < 1e-15;
// saturates to +-1 for |x| >= 6.5 where |erfc| < 4e-20.
double erf(double x);

// Vector-valued sufficient statistic F: R -> R^m with first and second
// derivatives, plus an optional carrier term g(x) added to the exponent
// with fixed coefficient 1 (used by the Gaussian location family, where
// p_theta(x) ∝ exp(theta x - x^2/2)). Carrier-free families leave g = 0.
class SufficientStatistic {
public:
    virtual ~SufficientStatistic() = default;
    virtual std::size_t m() const = 0;
    virtual void eval(double x, std::span<double> F) const = 0;
    virtual void jac(double x, std::span<double> dF) const = 0;
    virtual void lap(double x, std::span<double> ddF) const = 0;

    virtual bool has_base() const { return false; }
    virtual double base(double) const { return 0.0; }
    virtual double base_d(double) const { return 0.0; }
    virtual double base_dd(double) const { return 0.0; }
};

using StatPtr = std::shared_ptr<const SufficientStatistic>;

// Compactly supported bump psi(y) = exp(-1/(1-y^2)) / I1 on (-1,1), sharpened
// to scale gamma: psi_gamma(y) = psi(y/gamma)/gamma. The normalizer I1 and the
// cumulative table are computed by quadrature at construction.
class Mollifier {
public:
    explicit Mollifier(double gamma);
    double gamma() const { return gamma_; }
    double psi_norm() const { return norm_; }
    double psi(double y) const;      // psi_gamma(y)
    double psi_d(double y) const;    // d/dy psi_gamma(y)
    double cdf(double x) const;      // integral of psi_gamma over (-inf, x]

private:
    double gamma_;
    double norm_;                    // I1
    std::vector<double> cum_;        // unit-bump cumulative at panel edges
    std::size_t panels_;
};

// --- statistic catalog -------------------------------------------------------

// F1(x) = -x^4/(8 a^2) + x^2/4 - a^2/8 ; modes near +-a with unit curvature.
StatPtr bimodal_quartic(double a);

// Two statistics (F1, F1 + erf): F1(x) = x^2 - x^4/(2 a^2). The erf component
// tracks the half-line cut {x > 0}.
StatPtr bimodal_with_cut(double a);

// The cut family with the erf statistic removed: F(x) = x^2 - x^4/(2 a^2).
StatPtr bimodal_nocut(double a);

// Gaussian location family in one dimension: F(x) = x with carrier -x^2/2,
// so p_theta = N(theta, 1) and the score matching estimate is the sample mean.
StatPtr gaussian_mean();

// F = (-x^2/2, -sin(omega x)): unimodal with a rapidly oscillating component.
StatPtr oscillating(double omega);

// Smoothed half-line indicator F2 = 1_{x>0} * psi_gamma (monotone 0 -> 1,
// F2' = psi_gamma, F2'' = psi_gamma').
StatPtr mollifier_cut(double gamma);

// Mixture of standard Gaussians at +-a expressed as a one-statistic family:
// F(x) = -x^2/2 + log cosh(a x), theta = 1.
StatPtr gaussian_mixture(double a);

// Name-based builder for configs: names above, one numeric parameter
// (ignored for gaussian_mean). Throws std::invalid_argument for unknown names.
StatPtr make_statistic(const std::string& name, double param);

// Statistic with argument shifted by c: G(x) = F(x - c).
StatPtr shifted(StatPtr stat, double c);

} // namespace smlab::expfam
