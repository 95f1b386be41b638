#include "smlab/asymptotics/report.hpp"

#include <cmath>

#include "smlab/errors.hpp"

namespace smlab::asymptotics {

using expfam::ExpFamilyModel;
using numerics::SymMatrix;

namespace {

// T^T g T for symmetric g
SymMatrix congruence(const std::vector<double>& t, const SymMatrix& g) {
    const std::size_t m = g.dim;
    SymMatrix out(m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < m; ++k)
                for (std::size_t l = 0; l < m; ++l) s += t[k * m + i] * g(k, l) * t[l * m + j];
            out(i, j) = s;
        }
    out.symmetrize();
    return out;
}

SymMatrix sandwich(const SymMatrix& a_inv, const SymMatrix& sig) {
    const std::size_t m = a_inv.dim;
    SymMatrix tmp(m), out(m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < m; ++k) s += a_inv(i, k) * sig(k, j);
            tmp(i, j) = s;
        }
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < m; ++k) s += tmp(i, k) * a_inv(k, j);
            out(i, j) = s;
        }
    out.symmetrize();
    return out;
}

// Moment matrices in a numerically orthogonalized statistic basis G = T F.
// When the components of F are nearly affinely dependent under the model
// (cut families at large offsets), the canonical-basis Gram matrix carries
// the small directions below quadrature precision; whitening by the
// eigenvectors of the first-pass Gram and re-accumulating keeps them. All
// downstream spectral quantities are congruence-invariant, so results
// transform back exactly.
struct Conditioned {
    expfam::Moments mo;           // basis G
    bool transformed = false;
    std::vector<double> t;        // G = T F
    std::vector<double> t_inv;    // F = T^{-1} G
};

Conditioned conditioned_moments(const ExpFamilyModel& model) {
    Conditioned c;
    c.mo = moments(model);
    const std::size_t m = c.mo.a_matrix.dim;
    const auto eig = numerics::sym_eig(c.mo.a_matrix);
    const double lmax = std::abs(eig.values.back());
    if (m < 2 || eig.values.front() >= 1e-4 * lmax) return c;

    c.transformed = true;
    c.t.assign(m * m, 0.0);
    c.t_inv.assign(m * m, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
        const double d = std::sqrt(std::max(eig.values[k], 1e-28 * lmax));
        for (std::size_t i = 0; i < m; ++i) {
            c.t[k * m + i] = eig.vectors[i * m + k] / d;          // row k = v_k^T / sqrt(d)
            c.t_inv[i * m + k] = eig.vectors[i * m + k] * d;      // col k = v_k sqrt(d)
        }
    }

    // re-sweep, accumulating directly in the G basis
    const auto& stat = *model.stat();
    const auto pts = numerics::quad_points(model.domain().lo, model.domain().hi, model.quad());
    std::vector<double> F(m), dF(m), ddF(m), G(m), dG(m), ddG(m), drift(m);
    expfam::Moments mo;
    mo.mean_F.assign(m, 0.0);
    mo.mean_lapF.assign(m, 0.0);
    mo.mean_drift.assign(m, 0.0);
    numerics::SymMatrix eFF(m), eJJ(m), eDD(m);
    const auto& theta = model.theta();
    for (std::size_t i = 0; i < pts.x.size(); ++i) {
        const double x = pts.x[i];
        const double p = pts.w[i] * model.density(x);
        stat.eval(x, F);
        stat.jac(x, dF);
        stat.lap(x, ddF);
        double s = stat.has_base() ? stat.base_d(x) : 0.0;
        for (std::size_t k = 0; k < m; ++k) s += theta[k] * dF[k];
        for (std::size_t k = 0; k < m; ++k) {
            G[k] = dG[k] = ddG[k] = 0.0;
            for (std::size_t l = 0; l < m; ++l) {
                G[k] += c.t[k * m + l] * F[l];
                dG[k] += c.t[k * m + l] * dF[l];
                ddG[k] += c.t[k * m + l] * ddF[l];
            }
            drift[k] = dG[k] * s + ddG[k];
        }
        for (std::size_t k = 0; k < m; ++k) {
            mo.mean_F[k] += p * G[k];
            mo.mean_lapF[k] += p * ddG[k];
            mo.mean_drift[k] += p * drift[k];
            for (std::size_t l = k; l < m; ++l) {
                eFF(k, l) += p * G[k] * G[l];
                eJJ(k, l) += p * dG[k] * dG[l];
                eDD(k, l) += p * drift[k] * drift[l];
            }
        }
    }
    for (std::size_t k = 0; k < m; ++k)
        for (std::size_t l = k; l < m; ++l) {
            eFF(l, k) = eFF(k, l);
            eJJ(l, k) = eJJ(k, l);
            eDD(l, k) = eDD(k, l);
        }
    mo.cov_F = eFF;
    mo.a_matrix = eJJ;
    mo.cov_drift = eDD;
    for (std::size_t k = 0; k < m; ++k)
        for (std::size_t l = 0; l < m; ++l) {
            mo.cov_F(k, l) -= mo.mean_F[k] * mo.mean_F[l];
            mo.cov_drift(k, l) -= mo.mean_drift[k] * mo.mean_drift[l];
        }
    mo.cov_F.symmetrize();
    mo.cov_drift.symmetrize();
    c.mo = std::move(mo);
    return c;
}

} // namespace

SymMatrix gamma_mle(const ExpFamilyModel& model) {
    return numerics::inverse_spd(moments(model).cov_F);
}

SymMatrix gamma_sm(const ExpFamilyModel& model) {
    const auto c = conditioned_moments(model);
    const SymMatrix g = sandwich(numerics::inverse_spd(c.mo.a_matrix), c.mo.cov_drift);
    return c.transformed ? congruence(c.t, g) : g;
}

Smoothness smoothness_terms(const ExpFamilyModel& model) {
    const auto& stat = *model.stat();
    const std::size_t m = stat.m();
    Smoothness s;
    for (double t : model.theta()) s.theta_norm_sq += t * t;
    if (stat.has_base()) s.theta_norm_sq += 1.0;

    std::vector<double> dF(m), ddF(m);
    s.e_jf4 = model.expectation([&](double x) {
        stat.jac(x, dF);
        double n2 = stat.has_base() ? stat.base_d(x) * stat.base_d(x) : 0.0;
        for (double v : dF) n2 += v * v;
        return n2 * n2;
    });
    s.e_lap2 = model.expectation([&](double x) {
        stat.lap(x, ddF);
        double n2 = stat.has_base() ? stat.base_dd(x) * stat.base_dd(x) : 0.0;
        for (double v : ddF) n2 += v * v;
        return n2;
    });
    return s;
}

Efficiency relative_efficiency(const SymMatrix& g_sm, const SymMatrix& g_mle) {
    auto r = numerics::gen_eig_max(g_sm, g_mle);
    return {r.lambda_max, r.w};
}

double poincare_bound_rhs(double c_p, double gamma_mle_op, const Smoothness& s) {
    return 2.0 * c_p * c_p * gamma_mle_op * gamma_mle_op *
           (s.theta_norm_sq * s.e_jf4 + s.e_lap2);
}

AsymptoticReport make_report(const ExpFamilyModel& model) {
    AsymptoticReport r;
    const auto c = conditioned_moments(model);
    const std::size_t m = c.mo.a_matrix.dim;
    const SymMatrix gsm_g = sandwich(numerics::inverse_spd(c.mo.a_matrix), c.mo.cov_drift);
    const SymMatrix gmle_g = numerics::inverse_spd(c.mo.cov_F);
    const auto eff = relative_efficiency(gsm_g, gmle_g);
    r.worst_ratio = eff.worst_ratio;
    r.c_p_restricted = numerics::gen_eig_max(c.mo.cov_F, c.mo.a_matrix).lambda_max;
    if (c.transformed) {
        r.gamma_sm = congruence(c.t, gsm_g);
        r.gamma_mle = congruence(c.t, gmle_g);
        r.worst_direction.assign(m, 0.0);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t k = 0; k < m; ++k)
                r.worst_direction[i] += c.t_inv[i * m + k] * eff.worst_direction[k];
    } else {
        r.gamma_sm = gsm_g;
        r.gamma_mle = gmle_g;
        r.worst_direction = eff.worst_direction;
    }
    r.smoothness = smoothness_terms(model);
    r.poincare_bound = poincare_bound_rhs(r.c_p_restricted, numerics::op_norm(r.gamma_mle),
                                          r.smoothness);
    return r;
}

AsymptoticReport gaussian_location_report(std::size_t d) {
    AsymptoticReport r;
    r.gamma_mle = SymMatrix::identity(d);
    r.gamma_sm = SymMatrix::identity(d);
    r.worst_ratio = 1.0;
    r.worst_direction.assign(d, 0.0);
    r.worst_direction[0] = 1.0;
    r.c_p_restricted = 1.0;
    // E||(JF, g')||^4 = E(1 + x^2)^2 = mu^4 + 8 mu^2 + 6 at mu = 0; theta = 0
    r.smoothness = {6.0, 1.0, 1.0};
    r.poincare_bound = poincare_bound_rhs(1.0, 1.0, r.smoothness);
    return r;
}

BoundCheck poincare_bound_check(const ExpFamilyModel& model, double c_p) {
    BoundCheck b;
    b.lhs = numerics::op_norm(gamma_sm(model));
    b.rhs = poincare_bound_rhs(c_p, numerics::op_norm(gamma_mle(model)),
                               smoothness_terms(model));
    b.holds = b.lhs <= b.rhs * (1.0 + 1e-6);
    return b;
}

bool restricted_poincare_consistency_check(const ExpFamilyModel& model) {
    const auto mo = moments(model);
    const double c_rest = numerics::gen_eig_max(mo.cov_F, mo.a_matrix).lambda_max;
    const SymMatrix a_inv = numerics::inverse_spd(mo.a_matrix);
    const SymMatrix f_inv = numerics::inverse_spd(mo.cov_F);
    const double pencil = numerics::gen_eig_max(a_inv, f_inv).lambda_max;
    return std::abs(pencil - c_rest) <= 1e-6 * std::max(1.0, std::abs(c_rest)) &&
           pencil <= c_rest * (1.0 + 1e-6);
}

bool covariance_subadditivity_check(numerics::RngStream& stream, std::size_t pairs) {
    for (std::size_t rep = 0; rep < pairs; ++rep) {
        const std::size_t d = 1 + std::size_t(stream.uniform01() * 5.0);
        const std::size_t n = 1000;
        // correlated pair: X = M1 z, Y = M2 z + noise
        std::vector<double> m1(d * d), m2(d * d);
        for (auto& v : m1) v = stream.std_normal();
        for (auto& v : m2) v = stream.std_normal();
        std::vector<double> mx(d, 0.0), my(d, 0.0), ms(d, 0.0);
        SymMatrix cx(d), cy(d), cs(d);
        std::vector<double> x(d), y(d), z(d);
        std::vector<std::vector<double>> xs(n), ys(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (auto& v : z) v = stream.std_normal();
            for (std::size_t a = 0; a < d; ++a) {
                x[a] = 0.0;
                y[a] = 0.3 * stream.std_normal();
                for (std::size_t b = 0; b < d; ++b) {
                    x[a] += m1[a * d + b] * z[b];
                    y[a] += m2[a * d + b] * z[b];
                }
            }
            xs[i] = x;
            ys[i] = y;
            for (std::size_t a = 0; a < d; ++a) {
                mx[a] += x[a];
                my[a] += y[a];
                ms[a] += x[a] + y[a];
            }
        }
        for (std::size_t a = 0; a < d; ++a) {
            mx[a] /= double(n);
            my[a] /= double(n);
            ms[a] /= double(n);
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t a = 0; a < d; ++a)
                for (std::size_t b = 0; b < d; ++b) {
                    cx(a, b) += (xs[i][a] - mx[a]) * (xs[i][b] - mx[b]) / double(n);
                    cy(a, b) += (ys[i][a] - my[a]) * (ys[i][b] - my[b]) / double(n);
                    cs(a, b) += (xs[i][a] + ys[i][a] - ms[a]) * (xs[i][b] + ys[i][b] - ms[b]) /
                                double(n);
                }
        const SymMatrix slack = 2.0 * cx + 2.0 * cy - cs;
        if (numerics::sym_eig(slack).values.front() < -1e-10) return false;
    }
    return true;
}

CutDiagnostics cut_diagnostics(const ExpFamilyModel& model, double cut_point) {
    const auto& stat = *model.stat();
    const std::size_t m = stat.m();
    const auto mo = moments(model);

    // Quadrature split at the cut so the indicator never lands inside a panel.
    const auto& dom = model.domain();
    const auto& rule = model.quad();
    numerics::QuadratureRule half = rule;
    half.panels = std::max<std::size_t>(1, rule.panels / 2);
    const auto left = numerics::quad_points(dom.lo, cut_point, half);
    const auto right = numerics::quad_points(cut_point, dom.hi, half);

    std::vector<double> F(m), c(m, 0.0);
    double prob = 0.0;
    for (std::size_t i = 0; i < right.x.size(); ++i) {
        const double p = right.w[i] * model.density(right.x[i]);
        prob += p;
        stat.eval(right.x[i], F);
        for (std::size_t k = 0; k < m; ++k) c[k] += p * F[k];
    }
    double mass_left = 0.0;
    for (std::size_t i = 0; i < left.x.size(); ++i)
        mass_left += left.w[i] * model.density(left.x[i]);
    const double total = prob + mass_left;
    prob /= total;
    for (std::size_t k = 0; k < m; ++k) c[k] = c[k] / total - mo.mean_F[k] * prob;

    CutDiagnostics d;
    d.prob_S = prob;
    d.var_cut = prob * (1.0 - prob);
    d.surface_mass = model.density(cut_point);
    const auto sol = numerics::solve_spd(mo.cov_F, c);
    double quad = 0.0;
    for (std::size_t k = 0; k < m; ++k) quad += c[k] * sol[k];
    d.delta1 = 1.0 - quad / d.var_cut;
    return d;
}

} // namespace smlab::asymptotics
