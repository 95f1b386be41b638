#pragma once

#include <span>
#include <vector>

#include "smlab/expfam/model.hpp"
#include "smlab/expfam/statistic.hpp"

namespace smlab::estimators {

enum class Method { score_matching, mle };

struct FitReport {
    std::vector<double> theta_hat;
    std::size_t n_samples = 0;
    Method method = Method::score_matching;
    double objective_value = 0.0;
    std::size_t newton_iters = 0;   // MLE only
    bool converged = false;
};

// Closed-form score matching: theta solves the empirical normal equations
// E_hat[(JF)(JF)^T] theta = -E_hat[dF + (JF) g'] via a row-sequential QR of the
// per-sample Jacobians (forming the Gram matrix explicitly would square the
// conditioning, which matters for the near-degenerate cut families).
// Throws SingularEmpiricalMatrix when the sample does not identify all
// directions (n < m, or a relative R-diagonal collapse).
FitReport score_matching_fit(const expfam::StatPtr& stat, std::span<const double> samples);

// Empirical score matching loss (1/n) sum_i [ <theta, dF(x_i)> + g''(x_i)
//   + 0.5 (<theta, JF(x_i)> + g'(x_i))^2 ].
double sm_empirical_loss(const expfam::StatPtr& stat, std::span<const double> theta,
                         std::span<const double> samples);

// Newton ascent of <theta, E_hat F> - logZ(theta) with gradient
// E_hat F - E_theta F and Hessian -Sigma_F(theta); step halving (<= 30) when
// the objective does not improve; stops at gradient norm < 1e-8 or 100 iters.
FitReport mle_fit(const expfam::StatPtr& stat, std::span<const double> samples,
                  const numerics::Grid1D& domain, const numerics::QuadratureRule& quad,
                  std::span<const double> theta_init);

// Convenience: SM estimate as the Newton start, falling back to 0 when SM
// fails or lands unusably far out (|theta| > 100).
FitReport mle_fit_auto(const expfam::StatPtr& stat, std::span<const double> samples,
                       const numerics::Grid1D& domain, const numerics::QuadratureRule& quad);

} // namespace smlab::estimators
