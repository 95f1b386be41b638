#include "smlab/numerics/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include "smlab/errors.hpp"

namespace smlab::numerics {

void gauss_legendre(std::size_t k, std::vector<double>& nodes, std::vector<double>& weights) {
    if (k == 0) throw std::invalid_argument("gauss_legendre: need at least one point");
    nodes.assign(k, 0.0);
    weights.assign(k, 0.0);
    const double eps = 1e-15;
    const std::size_t half = (k + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) {
        // Chebyshev-angle initial guess for the i-th root of P_k.
        double x = std::cos(M_PI * (double(i) + 0.75) / (double(k) + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * double(j) + 1.0) * x * p1 - double(j) * p2) / (double(j) + 1.0);
            }
            pp = double(k) * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < eps) break;
        }
        nodes[i] = -x;
        nodes[k - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[i] = w;
        weights[k - 1 - i] = w;
    }
    if (k % 2 == 1) nodes[k / 2] = 0.0;
}

QuadPoints quad_points(double lo, double hi, const QuadratureRule& rule) {
    QuadPoints q;
    if (rule.panels == 0 || rule.points_per_panel == 0)
        throw std::invalid_argument("quadrature rule needs positive panels and points");
    const std::size_t total = rule.panels * rule.points_per_panel;
    q.x.reserve(total + 1);
    q.w.reserve(total + 1);
    if (rule.kind == QuadKind::gauss_legendre_composite) {
        std::vector<double> gn, gw;
        gauss_legendre(rule.points_per_panel, gn, gw);
        const double ph = (hi - lo) / double(rule.panels);
        for (std::size_t p = 0; p < rule.panels; ++p) {
            const double a = lo + ph * double(p);
            const double mid = a + 0.5 * ph;
            for (std::size_t j = 0; j < rule.points_per_panel; ++j) {
                q.x.push_back(mid + 0.5 * ph * gn[j]);
                q.w.push_back(0.5 * ph * gw[j]);
            }
        }
    } else {
        const std::size_t n = total;   // n intervals, n+1 nodes
        const double h = (hi - lo) / double(n);
        for (std::size_t i = 0; i <= n; ++i) {
            q.x.push_back(lo + h * double(i));
            q.w.push_back((i == 0 || i == n) ? 0.5 * h : h);
        }
    }
    return q;
}

double integrate(const std::function<double(double)>& f, const Grid1D& grid,
                 const QuadratureRule& rule) {
    const QuadPoints q = quad_points(grid.lo, grid.hi, rule);
    double sum = 0.0;
    for (std::size_t i = 0; i < q.x.size(); ++i) {
        const double v = f(q.x[i]);
        if (!std::isfinite(v)) throw NonFiniteIntegrand(q.x[i]);
        sum += q.w[i] * v;
    }
    return sum;
}

} // namespace smlab::numerics
