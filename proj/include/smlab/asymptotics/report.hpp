#pragma once

#include <vector>

#include "smlab/expfam/model.hpp"
#include "smlab/numerics/linalg.hpp"
#include "smlab/numerics/rng.hpp"

namespace smlab::asymptotics {

// Asymptotic covariance of the MLE: Sigma_F^{-1} (inverse Fisher information).
// Throws NotPositiveDefinite for non-identifiable families.
numerics::SymMatrix gamma_mle(const expfam::ExpFamilyModel& model);

// Asymptotic covariance of score matching: the sandwich
// A^{-1} Sigma_drift A^{-1} with A = E[(JF)(JF)^T] and
// drift = (JF)(JF)^T theta + (JF) g' + Delta F.
numerics::SymMatrix gamma_sm(const expfam::ExpFamilyModel& model);

// Smoothness functionals of the statistic under the model; the carrier term
// (when present) is folded in as one more exponent row with coefficient 1.
struct Smoothness {
    double e_jf4 = 0.0;        // E ||JF||_OP^4  (= E ||F'||_2^4 in 1-D)
    double e_lap2 = 0.0;       // E ||Delta F||_2^2
    double theta_norm_sq = 0.0;
};
Smoothness smoothness_terms(const expfam::ExpFamilyModel& model);

struct AsymptoticReport {
    numerics::SymMatrix gamma_sm;
    numerics::SymMatrix gamma_mle;
    std::vector<double> worst_direction;
    double worst_ratio = 1.0;
    double poincare_bound = 0.0;   // bound value with the restricted constant
    Smoothness smoothness;
    double c_p_restricted = 0.0;
};

AsymptoticReport make_report(const expfam::ExpFamilyModel& model);

// Worst direction of the pencil (Gamma_SM, Gamma_MLE):
// max_w <w, G_sm w>/<w, G_mle w>.
struct Efficiency {
    double worst_ratio;
    std::vector<double> worst_direction;
};
Efficiency relative_efficiency(const numerics::SymMatrix& g_sm,
                               const numerics::SymMatrix& g_mle);

// Closed-form report for the d-dimensional isotropic Gaussian location family:
// Sigma_F = A = I so both covariances are the identity.
AsymptoticReport gaussian_location_report(std::size_t d);

// ||Gamma_SM||_OP <= 2 C_P^2 ||Gamma_MLE||_OP^2 (|theta|^2 E||JF||^4 + E||dF||^2).
struct BoundCheck {
    double lhs;
    double rhs;
    bool holds;
};
double poincare_bound_rhs(double c_p, double gamma_mle_op, const Smoothness& s);
BoundCheck poincare_bound_check(const expfam::ExpFamilyModel& model, double c_p);

// Restricted Poincare constant from the pencil (Sigma_F, A); equals by
// construction the max of the pencil (A^{-1}, Sigma_F^{-1}), and this check
// asserts the two code paths agree to 1e-6 relative.
bool restricted_poincare_consistency_check(const expfam::ExpFamilyModel& model);

// Covariance subadditivity Sigma_{X+Y} <= 2 Sigma_X + 2 Sigma_Y, probed on
// `pairs` random empirical pairs (dim <= 5, 1000 draws each): the smallest
// eigenvalue of the slack matrix stays above -1e-10.
bool covariance_subadditivity_check(numerics::RngStream& stream, std::size_t pairs = 200);

// Half-line cut statistics of a model: how close the cut indicator 1_{x>t}
// is to an affine function of the model's statistics.
struct CutDiagnostics {
    double delta1;         // 1 - sup corr^2, in [0, 1]
    double var_cut;        // prob_S (1 - prob_S)
    double prob_S;
    double surface_mass;   // density(t), the 1-D surface integral
};
CutDiagnostics cut_diagnostics(const expfam::ExpFamilyModel& model, double cut_point = 0.0);

} // namespace smlab::asymptotics
