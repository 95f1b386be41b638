#pragma once

#include <functional>
#include <vector>

#include "smlab/expfam/statistic.hpp"
#include "smlab/numerics/grid.hpp"
#include "smlab/numerics/linalg.hpp"
#include "smlab/numerics/quadrature.hpp"
#include "smlab/numerics/rng.hpp"

namespace smlab::expfam {

// log integral of exp(<theta, F(x)> + g(x)) over the domain, max-shifted.
// Throws DivergentIntegral when the exponent grows toward an endpoint.
double log_partition(const StatPtr& stat, std::span<const double> theta,
                     const numerics::Grid1D& domain, const numerics::QuadratureRule& quad);

// Truncated exponential-family model p(x) = exp(<theta,F(x)> + g(x) - logZ)
// on [domain.lo, domain.hi]. Immutable after construction; the CDF table
// (inverse-CDF sampling) and logZ are built eagerly.
class ExpFamilyModel {
public:
    ExpFamilyModel(StatPtr stat, std::vector<double> theta, numerics::Grid1D domain,
                   numerics::QuadratureRule quad);

    const StatPtr& stat() const { return stat_; }
    const std::vector<double>& theta() const { return theta_; }
    const numerics::Grid1D& domain() const { return domain_; }
    const numerics::QuadratureRule& quad() const { return quad_; }
    double log_z() const { return log_z_; }
    const std::vector<double>& cdf_table() const { return cdf_; }

    double log_density(double x) const;
    double density(double x) const;
    double score(double x) const;   // d/dx log density

    // E_p[f] by quadrature with the model rule.
    double expectation(const std::function<double(double)>& f) const;

    // i.i.d. draws by inverting the tabulated CDF with linear interpolation.
    std::vector<double> sample(numerics::RngStream& stream, std::size_t n) const;

private:
    StatPtr stat_;
    std::vector<double> theta_;
    numerics::Grid1D domain_;
    numerics::QuadratureRule quad_;
    double log_z_;
    std::vector<double> cdf_;
};

struct Moments {
    std::vector<double> mean_F;
    numerics::SymMatrix cov_F;        // Sigma_F (Fisher information)
    numerics::SymMatrix a_matrix;     // E[(JF)(JF)^T]
    std::vector<double> mean_lapF;    // E[Delta F]
    numerics::SymMatrix cov_drift;    // Sigma of (JF)(JF)^T theta + (JF) g' + Delta F
    std::vector<double> mean_drift;   // 0 at the truth (consistency identity)
};

Moments moments(const ExpFamilyModel& model);

// Convenience: default truncated domain for the catalog families. Location-
// scale families get [-(a+10), a+10]; unimodal families [-12, 12].
numerics::Grid1D default_domain(const std::string& family, double param, std::size_t n = 8192);

ExpFamilyModel make_model(const std::string& family, double param, std::vector<double> theta,
                          std::size_t grid_n = 8192,
                          numerics::QuadratureRule quad = {numerics::QuadKind::gauss_legendre_composite,
                                                           256, 8});

} // namespace smlab::expfam
