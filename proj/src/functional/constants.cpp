#include "smlab/functional/constants.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "smlab/errors.hpp"
#include "smlab/numerics/linalg.hpp"

namespace smlab::functional {

using numerics::Grid1D;

namespace {
constexpr double kLsUpperConst = 1.0;   // K1
constexpr double kLsLowerConst = 4.0;   // K2
}

SpectralGap poincare_spectral_detail(const Grid1D& grid, std::span<const double> density) {
    const std::size_t n = grid.n;
    if (density.size() != n) throw std::invalid_argument("poincare_spectral: table size");
    for (std::size_t i = 1; i + 1 < n; ++i)
        if (!(density[i] > 0.0)) throw ZeroDensityNode(i);
    const double h = grid.spacing();

    // mass (lumped trapezoid) and midpoint stiffness
    std::vector<double> mass(n), qm(n - 1);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mass[i] = density[i] * ((i == 0 || i == n - 1) ? 0.5 * h : h);
        mass[i] = std::max(mass[i], 1e-290);
        total += mass[i];
    }
    for (std::size_t i = 0; i + 1 < n; ++i) qm[i] = 0.5 * (density[i] + density[i + 1]);
    for (double& v : mass) v /= total;
    for (double& v : qm) v /= total;

    // B = M^{-1/2} A M^{-1/2} stays tridiagonal
    std::vector<double> diag(n, 0.0), off(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double k = qm[i] / h;
        diag[i] += k / mass[i];
        diag[i + 1] += k / mass[i + 1];
        // divide twice: the direct product mass_i * mass_{i+1} underflows
        // for deep-tail tables
        off[i] = -(k / std::sqrt(mass[i])) / std::sqrt(mass[i + 1]);
    }

    const auto eigs = numerics::tridiag_smallest_eigs(diag, off, 2);
    SpectralGap out;
    out.lambda0 = eigs[0];
    out.lambda1 = eigs[1];
    if (!(eigs[1] > 0.0)) throw NoConvergence("spectral gap is not positive", eigs[1]);
    out.c_p = 1.0 / eigs[1];
    auto v = numerics::tridiag_eigvec(diag, off, eigs[0]);
    out.null_vec.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.null_vec[i] = v[i] / std::sqrt(mass[i]);
    return out;
}

double poincare_spectral(const Grid1D& grid, std::span<const double> density) {
    return poincare_spectral_detail(grid, density).c_p;
}

FunctionalTables make_tables(const expfam::ExpFamilyModel& model, std::size_t n) {
    const auto& dom = model.domain();
    // narrow to {log density >= max - 500} by scanning the model grid
    double lmax = -std::numeric_limits<double>::infinity();
    std::vector<double> ld(dom.n);
    for (std::size_t i = 0; i < dom.n; ++i) {
        ld[i] = model.log_density(dom.nodes[i]);
        lmax = std::max(lmax, ld[i]);
    }
    std::size_t lo_i = 0, hi_i = dom.n - 1;
    while (lo_i + 1 < dom.n && ld[lo_i] < lmax - 500.0) ++lo_i;
    while (hi_i > lo_i + 16 && ld[hi_i] < lmax - 500.0) --hi_i;

    FunctionalTables t;
    t.grid = Grid1D(dom.nodes[lo_i], dom.nodes[hi_i], n);
    t.density.resize(n);
    t.cdf.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) t.density[i] = model.density(t.grid.nodes[i]);
    const double h = t.grid.spacing();
    double mass = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        mass += 0.5 * h * (t.density[i] + t.density[i - 1]);
        t.cdf[i] = mass;
    }
    for (std::size_t i = 0; i < n; ++i) {
        t.density[i] /= mass;
        t.cdf[i] /= mass;
    }
    t.cdf[n - 1] = 1.0;
    return t;
}

double poincare_restricted(const expfam::ExpFamilyModel& model) {
    const auto mo = moments(model);
    return numerics::gen_eig_max(mo.cov_F, mo.a_matrix).lambda_max;
}

double isoperimetric_1d(const Grid1D& grid, std::span<const double> density,
                        std::span<const double> cdf) {
    const std::size_t n = grid.n;
    if (density.size() != n || cdf.size() != n)
        throw std::invalid_argument("isoperimetric_1d: table size");
    double best = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!(density[i] > 0.0)) throw ZeroDensityNode(i);
        const double mass = std::min(cdf[i], 1.0 - cdf[i]);
        // cuts carrying less than 1e-12 mass sit below the CDF table's
        // rounding floor and would produce spurious sups
        if (mass < 1e-12) continue;
        best = std::max(best, mass / density[i]);
    }
    return best;
}

LsBracket log_sobolev_bg(const Grid1D& grid, std::span<const double> density,
                         std::span<const double> cdf) {
    const std::size_t n = grid.n;
    if (density.size() != n || cdf.size() != n)
        throw std::invalid_argument("log_sobolev_bg: table size");
    const double h = grid.spacing();
    const std::size_t med =
        std::size_t(std::lower_bound(cdf.begin(), cdf.end(), 0.5) - cdf.begin());

    double d_plus = 0.0, d_minus = 0.0;
    std::size_t arg_plus = med, arg_minus = med, last_plus = med, last_minus = med;
    double r = 0.0;
    for (std::size_t i = med + 1; i + 1 < n; ++i) {
        r += 0.5 * h * (1.0 / std::max(density[i - 1], 1e-290) +
                        1.0 / std::max(density[i], 1e-290));
        const double qbar = 1.0 - cdf[i];
        if (qbar < 1e-12) break;   // below the CDF table's rounding floor
        last_plus = i;
        const double v = qbar * std::log(1.0 / qbar) * r;
        if (v > d_plus) {
            d_plus = v;
            arg_plus = i;
        }
    }
    r = 0.0;
    for (std::size_t i = med; i-- > 1;) {
        r += 0.5 * h * (1.0 / std::max(density[i + 1], 1e-290) +
                        1.0 / std::max(density[i], 1e-290));
        const double qb = cdf[i];
        if (qb < 1e-12) break;
        last_minus = i;
        const double v = qb * std::log(1.0 / qb) * r;
        if (v > d_minus) {
            d_minus = v;
            arg_minus = i;
        }
    }
    // The sup was still rising where the scan ended (grid edge or mass
    // floor): sub-gaussian tails, for which the log-Sobolev constant is
    // genuinely infinite, land here.
    if ((arg_plus == last_plus && last_plus > med) ||
        (arg_minus == last_minus && last_minus < med))
        throw DivergentCriterion();

    LsBracket b;
    b.criterion = std::max(d_plus, d_minus);
    b.upper = kLsUpperConst * b.criterion;
    const double c_p = poincare_spectral(grid, density);
    b.lower = std::max(b.criterion / kLsLowerConst, 0.5 * c_p * (1.0 - 0.01));
    return b;
}

FunctionalConstants functional_constants(const expfam::ExpFamilyModel& model) {
    const auto t = make_tables(model);

    FunctionalConstants fc;
    fc.grid_n = t.grid.n;
    fc.c_p = poincare_spectral(t.grid, t.density);
    fc.c_p_restricted = poincare_restricted(model);
    fc.c_is = isoperimetric_1d(t.grid, t.density, t.cdf);
    const auto ls = log_sobolev_bg(t.grid, t.density, t.cdf);
    fc.c_ls_lower = ls.lower;
    fc.c_ls_upper = ls.upper;
    fc.method_notes =
        "c_p: FD Langevin generator spectral gap (lumped trapezoid mass, midpoint "
        "stiffness, Neumann); c_p_restricted: (Sigma_F, E[JF JF^T]) pencil; c_ls: "
        "Muckenhoupt/Bobkov-Goetze-type criterion D bracketed as "
        "[max(D/4, 0.99 c_p/2), 1.0 * D]; c_is: sup over half-line cuts";
    return fc;
}

GapCheck kl_fisher_gap_check(const expfam::ExpFamilyModel& p, const expfam::ExpFamilyModel& q,
                             double c_ls_upper_of_q) {
    if (q.domain().lo > p.domain().lo || q.domain().hi < p.domain().hi)
        throw std::invalid_argument("kl_fisher_gap_check: q domain must cover p domain");
    GapCheck g;
    g.kl = p.expectation([&](double x) { return p.log_density(x) - q.log_density(x); });
    g.gap = p.expectation([&](double x) {
        const double d = p.score(x) - q.score(x);
        return d * d;
    });
    g.holds = g.kl <= c_ls_upper_of_q * g.gap * (1.0 + 1e-4) + 1e-12;
    return g;
}

RademacherBound rademacher_gaussian_bound(double r_ball, std::size_t d, std::size_t n,
                                          numerics::RngStream& stream) {
    if (r_ball < 0.0) throw std::invalid_argument("rademacher_gaussian_bound: r_ball < 0");
    const std::size_t reps = 200;
    RademacherBound out;
    out.bound = r_ball * std::sqrt((r_ball * r_ball + double(d)) / double(n));

    // ground truth mean on the ball boundary
    std::vector<double> mu(d, 0.0);
    if (d > 0) mu[0] = r_ball;

    double r_acc = 0.0, kl_acc = 0.0;
    std::vector<double> sym(d), mean(d);
    for (std::size_t rep = 0; rep < reps; ++rep) {
        std::fill(sym.begin(), sym.end(), 0.0);
        std::fill(mean.begin(), mean.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double eps = stream.rademacher();
            for (std::size_t k = 0; k < d; ++k) {
                const double x = mu[k] + stream.std_normal();
                sym[k] += eps * x;
                mean[k] += x;
            }
        }
        double s2 = 0.0, m2 = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            sym[k] /= double(n);
            mean[k] /= double(n);
            s2 += sym[k] * sym[k];
            m2 += mean[k] * mean[k];
        }
        r_acc += r_ball * std::sqrt(s2);
        // project the sample mean onto the ball
        const double norm = std::sqrt(m2);
        const double scale = (norm > r_ball && norm > 0.0) ? r_ball / norm : 1.0;
        double err2 = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double mh = mean[k] * scale;
            err2 += (mh - mu[k]) * (mh - mu[k]);
        }
        kl_acc += 0.5 * err2;
    }
    out.r_n = r_acc / double(reps);
    out.empirical_kl = kl_acc / double(reps);
    return out;
}

KlDerivativeCheck kl_derivative_equivalence_check(const expfam::ExpFamilyModel& p,
                                                  const expfam::ExpFamilyModel& q,
                                                  const Grid1D& grid) {
    const std::size_t n = grid.n;
    const double h = grid.spacing();
    std::vector<double> pd(n), qd(n);
    for (std::size_t i = 0; i < n; ++i) {
        pd[i] = p.density(grid.nodes[i]);
        qd[i] = q.density(grid.nodes[i]);
    }

    KlDerivativeCheck out;
    out.lhs_deriv = -p.expectation([&](double x) {
        const double d = p.score(x) - q.score(x);
        return d * d;
    });

    auto normalize = [&](std::vector<double>& f) {
        double mass = 0.0;
        for (std::size_t i = 0; i < n; ++i) mass += f[i] * ((i == 0 || i == n - 1) ? 0.5 * h : h);
        for (double& v : f) v /= mass;
    };
    auto smooth = [&](const std::vector<double>& f, double var) {
        std::vector<double> out_f(n, 0.0);
        const double sigma = std::sqrt(var);
        const std::size_t win = std::size_t(8.0 * sigma / h) + 1;
        const double norm = 1.0 / std::sqrt(2.0 * M_PI * var);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t j0 = (i > win) ? i - win : 0;
            const std::size_t j1 = std::min(n - 1, i + win);
            double s = 0.0;
            for (std::size_t j = j0; j <= j1; ++j) {
                const double u = grid.nodes[i] - grid.nodes[j];
                const double w = (j == 0 || j == n - 1) ? 0.5 * h : h;
                s += w * f[j] * std::exp(-0.5 * u * u / var);
            }
            out_f[i] = s * norm;
        }
        normalize(out_f);
        return out_f;
    };
    auto kl_of = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (a[i] <= 0.0) continue;
            const double w = (i == 0 || i == n - 1) ? 0.5 * h : h;
            s += w * a[i] * std::log(a[i] / std::max(b[i], 1e-300));
        }
        return s;
    };

    std::vector<double> p0 = pd, q0 = qd;
    normalize(p0);
    normalize(q0);
    const double t0 = 1e-3;
    const double kl0 = kl_of(p0, q0);
    const double kl1 = kl_of(smooth(pd, 2.0 * t0), smooth(qd, 2.0 * t0));
    const double kl2 = kl_of(smooth(pd, 4.0 * t0), smooth(qd, 4.0 * t0));
    out.rhs_deriv = (4.0 * kl1 - kl2 - 3.0 * kl0) / (2.0 * t0);

    const double scale = std::max({std::abs(out.lhs_deriv), std::abs(out.rhs_deriv)});
    out.agree = scale < 1e-10 || std::abs(out.lhs_deriv - out.rhs_deriv) < 1e-2 * scale;
    return out;
}

} // namespace smlab::functional
