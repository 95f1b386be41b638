#include "smlab/expfam/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "smlab/errors.hpp"

namespace smlab::expfam {

namespace {

double exponent_at(const StatPtr& stat, std::span<const double> theta, double x,
                   std::vector<double>& buf) {
    stat->eval(x, buf);
    double h = stat->has_base() ? stat->base(x) : 0.0;
    for (std::size_t k = 0; k < theta.size(); ++k) h += theta[k] * buf[k];
    return h;
}

} // namespace

double log_partition(const StatPtr& stat, std::span<const double> theta,
                     const numerics::Grid1D& domain, const numerics::QuadratureRule& quad) {
    if (theta.size() != stat->m())
        throw std::invalid_argument("log_partition: theta size mismatch");
    const auto pts = numerics::quad_points(domain.lo, domain.hi, quad);
    std::vector<double> buf(stat->m());
    std::vector<double> h(pts.x.size());
    double hmax = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.x.size(); ++i) {
        h[i] = exponent_at(stat, theta, pts.x[i], buf);
        if (!std::isfinite(h[i])) throw NonFiniteIntegrand(pts.x[i]);
        hmax = std::max(hmax, h[i]);
    }
    // Growth toward an endpoint with non-negligible mass means the truncation
    // is hiding a divergent integral.
    const double h_lo = exponent_at(stat, theta, domain.lo, buf);
    const double h_hi = exponent_at(stat, theta, domain.hi, buf);
    if ((h_lo > h.front() && h_lo > hmax - 30.0) || (h_hi > h.back() && h_hi > hmax - 30.0))
        throw DivergentIntegral();

    double sum = 0.0;
    for (std::size_t i = 0; i < pts.x.size(); ++i) sum += pts.w[i] * std::exp(h[i] - hmax);
    return hmax + std::log(sum);
}

ExpFamilyModel::ExpFamilyModel(StatPtr stat, std::vector<double> theta, numerics::Grid1D domain,
                               numerics::QuadratureRule quad)
    : stat_(std::move(stat)), theta_(std::move(theta)), domain_(std::move(domain)),
      quad_(quad) {
    log_z_ = log_partition(stat_, theta_, domain_, quad_);
    // CDF table at grid resolution (trapezoid cumulative of the density).
    const std::size_t n = domain_.n;
    cdf_.assign(n, 0.0);
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = density(domain_.nodes[i]);
    const double h = domain_.spacing();
    for (std::size_t i = 1; i < n; ++i) cdf_[i] = cdf_[i - 1] + 0.5 * h * (d[i - 1] + d[i]);
    const double total = cdf_.back();
    if (!(total > 0.0) || !std::isfinite(total))
        throw Error("ExpFamilyModel: density table has no mass");
    for (double& v : cdf_) v /= total;
    cdf_.back() = 1.0;
    for (std::size_t i = 1; i < n; ++i) cdf_[i] = std::max(cdf_[i], cdf_[i - 1]);
}

double ExpFamilyModel::log_density(double x) const {
    std::vector<double> buf(stat_->m());
    return exponent_at(stat_, theta_, x, buf) - log_z_;
}

double ExpFamilyModel::density(double x) const { return std::exp(log_density(x)); }

double ExpFamilyModel::score(double x) const {
    std::vector<double> d(stat_->m());
    stat_->jac(x, d);
    double s = stat_->has_base() ? stat_->base_d(x) : 0.0;
    for (std::size_t k = 0; k < theta_.size(); ++k) s += theta_[k] * d[k];
    return s;
}

double ExpFamilyModel::expectation(const std::function<double(double)>& f) const {
    const auto pts = numerics::quad_points(domain_.lo, domain_.hi, quad_);
    std::vector<double> buf(stat_->m());
    double sum = 0.0;
    for (std::size_t i = 0; i < pts.x.size(); ++i) {
        const double p = std::exp(exponent_at(stat_, theta_, pts.x[i], buf) - log_z_);
        sum += pts.w[i] * p * f(pts.x[i]);
    }
    return sum;
}

std::vector<double> ExpFamilyModel::sample(numerics::RngStream& stream, std::size_t n) const {
    std::vector<double> out;
    out.reserve(n);
    const auto& nodes = domain_.nodes;
    for (std::size_t k = 0; k < n; ++k) {
        const double u = stream.uniform01();
        auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        std::size_t i = std::min<std::size_t>(std::distance(cdf_.begin(), it), cdf_.size() - 1);
        if (i == 0) i = 1;
        const double c0 = cdf_[i - 1], c1 = cdf_[i];
        const double t = (c1 > c0) ? (u - c0) / (c1 - c0) : 0.5;
        out.push_back(nodes[i - 1] + t * (nodes[i] - nodes[i - 1]));
    }
    return out;
}

Moments moments(const ExpFamilyModel& model) {
    const auto& stat = *model.stat();
    const std::size_t m = stat.m();
    const auto pts = numerics::quad_points(model.domain().lo, model.domain().hi, model.quad());
    std::vector<double> F(m), dF(m), ddF(m), drift(m);

    Moments mo;
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
        for (std::size_t k = 0; k < m; ++k) drift[k] = dF[k] * s + ddF[k];

        for (std::size_t k = 0; k < m; ++k) {
            mo.mean_F[k] += p * F[k];
            mo.mean_lapF[k] += p * ddF[k];
            mo.mean_drift[k] += p * drift[k];
            for (std::size_t l = k; l < m; ++l) {
                eFF(k, l) += p * F[k] * F[l];
                eJJ(k, l) += p * dF[k] * dF[l];
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
    return mo;
}

numerics::Grid1D default_domain(const std::string& family, double param, std::size_t n) {
    if (family == "bimodal_quartic" || family == "bimodal_with_cut" ||
        family == "bimodal_nocut" || family == "gaussian_mixture") {
        const double a = std::abs(param);
        return numerics::Grid1D(-(a + 10.0), a + 10.0, n);
    }
    return numerics::Grid1D(-12.0, 12.0, n);
}

ExpFamilyModel make_model(const std::string& family, double param, std::vector<double> theta,
                          std::size_t grid_n, numerics::QuadratureRule quad) {
    return ExpFamilyModel(make_statistic(family, param), std::move(theta),
                          default_domain(family, param, grid_n), quad);
}

} // namespace smlab::expfam
