#include "smlab/estimators/fit.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "smlab/errors.hpp"
#include "smlab/numerics/linalg.hpp"

namespace smlab::estimators {

using numerics::RowQR;
using numerics::SymMatrix;

FitReport score_matching_fit(const expfam::StatPtr& stat, std::span<const double> samples) {
    const std::size_t m = stat->m();
    const std::size_t n = samples.size();
    if (n < m) throw SingularEmpiricalMatrix(0.0);

    RowQR qr(m);
    std::vector<double> dF(m), ddF(m), rhs(m, 0.0);
    for (double x : samples) {
        stat->jac(x, dF);
        stat->lap(x, ddF);
        const double gd = stat->has_base() ? stat->base_d(x) : 0.0;
        for (std::size_t k = 0; k < m; ++k) rhs[k] += ddF[k] + dF[k] * gd;
        qr.add_row(dF);
    }
    for (double& v : rhs) v = -v / double(n);

    if (qr.min_abs_diag() <= 16.0 * std::numeric_limits<double>::epsilon() * qr.max_abs_diag()) {
        // report the Gram matrix's smallest eigenvalue with the error
        SymMatrix gram(m);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k <= std::min(i, j); ++k)
                    s += qr.r(k, i) * qr.r(k, j);
                gram(i, j) = s / double(n);
            }
        throw SingularEmpiricalMatrix(numerics::sym_eig(gram).values.front());
    }

    // R^T R theta = n * rhs  (R holds the unnormalized row accumulation)
    std::vector<double> scaled(rhs.begin(), rhs.end());
    for (double& v : scaled) v *= double(n);
    FitReport rep;
    rep.theta_hat = qr.solve_normal(scaled);
    rep.n_samples = n;
    rep.method = Method::score_matching;
    rep.objective_value = sm_empirical_loss(stat, rep.theta_hat, samples);

    // residual of the normal equations certifies the solve
    std::vector<double> y(m, 0.0), z(m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) y[i] += qr.r(i, j) * rep.theta_hat[j];
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t i = 0; i <= j; ++i) z[j] += qr.r(i, j) * y[i];
    double resid = 0.0, bnorm = 0.0, tnorm = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        resid += (z[k] - scaled[k]) * (z[k] - scaled[k]);
        bnorm += scaled[k] * scaled[k];
        tnorm += rep.theta_hat[k] * rep.theta_hat[k];
    }
    const double gram_scale = qr.max_abs_diag() * qr.max_abs_diag();
    rep.converged = std::isfinite(tnorm) &&
                    std::sqrt(resid) <=
                        1e-10 * (gram_scale * std::sqrt(tnorm) + std::sqrt(bnorm) + 1e-300);
    return rep;
}

double sm_empirical_loss(const expfam::StatPtr& stat, std::span<const double> theta,
                         std::span<const double> samples) {
    const std::size_t m = stat->m();
    std::vector<double> dF(m), ddF(m);
    double loss = 0.0;
    for (double x : samples) {
        stat->jac(x, dF);
        stat->lap(x, ddF);
        double s = stat->has_base() ? stat->base_d(x) : 0.0;
        double lap = stat->has_base() ? stat->base_dd(x) : 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            s += theta[k] * dF[k];
            lap += theta[k] * ddF[k];
        }
        loss += lap + 0.5 * s * s;
    }
    return samples.empty() ? 0.0 : loss / double(samples.size());
}

namespace {

struct ThetaMoments {
    double log_z;
    std::vector<double> mean_F;
    SymMatrix cov_F;
};

ThetaMoments theta_moments(const expfam::StatPtr& stat, std::span<const double> theta,
                           const numerics::Grid1D& domain,
                           const numerics::QuadratureRule& quad) {
    const std::size_t m = stat->m();
    ThetaMoments tm;
    tm.log_z = expfam::log_partition(stat, theta, domain, quad);
    tm.mean_F.assign(m, 0.0);
    tm.cov_F = SymMatrix(m);
    const auto pts = numerics::quad_points(domain.lo, domain.hi, quad);
    std::vector<double> F(m);
    for (std::size_t i = 0; i < pts.x.size(); ++i) {
        const double x = pts.x[i];
        stat->eval(x, F);
        double h = stat->has_base() ? stat->base(x) : 0.0;
        for (std::size_t k = 0; k < m; ++k) h += theta[k] * F[k];
        const double p = pts.w[i] * std::exp(h - tm.log_z);
        for (std::size_t k = 0; k < m; ++k) {
            tm.mean_F[k] += p * F[k];
            for (std::size_t l = k; l < m; ++l) tm.cov_F(k, l) += p * F[k] * F[l];
        }
    }
    for (std::size_t k = 0; k < m; ++k)
        for (std::size_t l = k; l < m; ++l) {
            tm.cov_F(k, l) -= tm.mean_F[k] * tm.mean_F[l];
            tm.cov_F(l, k) = tm.cov_F(k, l);
        }
    return tm;
}

} // namespace

FitReport mle_fit(const expfam::StatPtr& stat, std::span<const double> samples,
                  const numerics::Grid1D& domain, const numerics::QuadratureRule& quad,
                  std::span<const double> theta_init) {
    const std::size_t m = stat->m();
    if (theta_init.size() != m) throw std::invalid_argument("mle_fit: theta_init size");
    const std::size_t n = samples.size();

    std::vector<double> emp_F(m, 0.0), F(m);
    for (double x : samples) {
        stat->eval(x, F);
        for (std::size_t k = 0; k < m; ++k) emp_F[k] += F[k];
    }
    for (double& v : emp_F) v /= double(n);

    std::vector<double> theta(theta_init.begin(), theta_init.end());
    auto objective = [&](std::span<const double> th, double log_z) {
        double o = -log_z;
        for (std::size_t k = 0; k < m; ++k) o += th[k] * emp_F[k];
        return o;
    };

    FitReport rep;
    rep.method = Method::mle;
    rep.n_samples = n;

    ThetaMoments tm = theta_moments(stat, theta, domain, quad);
    double obj = objective(theta, tm.log_z);
    double grad_norm = std::numeric_limits<double>::infinity();
    std::size_t iter = 0;
    for (; iter < 100; ++iter) {
        std::vector<double> grad(m);
        grad_norm = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            grad[k] = emp_F[k] - tm.mean_F[k];
            grad_norm += grad[k] * grad[k];
        }
        grad_norm = std::sqrt(grad_norm);
        if (grad_norm < 1e-8) break;

        const auto step = numerics::solve_spd(tm.cov_F, grad);
        bool accepted = false;
        double scale = 1.0;
        for (int halving = 0; halving <= 30; ++halving, scale *= 0.5) {
            std::vector<double> cand(m);
            for (std::size_t k = 0; k < m; ++k) cand[k] = theta[k] + scale * step[k];
            ThetaMoments tmc;
            try {
                tmc = theta_moments(stat, cand, domain, quad);
            } catch (const DivergentIntegral&) {
                continue;   // leave the integrable region -> halve
            }
            const double cobj = objective(cand, tmc.log_z);
            if (cobj > obj || (halving == 30 && std::isfinite(cobj))) {
                theta = std::move(cand);
                tm = std::move(tmc);
                obj = cobj;
                accepted = true;
                break;
            }
        }
        if (!accepted) throw DivergentIntegral();
    }

    rep.theta_hat = theta;
    rep.newton_iters = iter;
    rep.objective_value = obj;
    rep.converged = grad_norm < 1e-8;
    if (!rep.converged) throw NoConvergence("MLE Newton did not reach gradient tolerance",
                                            grad_norm);
    return rep;
}

FitReport mle_fit_auto(const expfam::StatPtr& stat, std::span<const double> samples,
                       const numerics::Grid1D& domain, const numerics::QuadratureRule& quad) {
    std::vector<double> init(stat->m(), 0.0);
    try {
        auto sm = score_matching_fit(stat, samples);
        double norm = 0.0;
        for (double v : sm.theta_hat) norm += v * v;
        if (sm.converged && std::sqrt(norm) <= 100.0) init = sm.theta_hat;
    } catch (const SingularEmpiricalMatrix&) {
        // keep the zero start
    }
    return mle_fit(stat, samples, domain, quad, init);
}

} // namespace smlab::estimators
