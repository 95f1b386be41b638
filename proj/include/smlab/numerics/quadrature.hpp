#pragma once

#include <functional>
#include <vector>

#include "smlab/numerics/grid.hpp"

namespace smlab::numerics {

enum class QuadKind { trapezoid, gauss_legendre_composite };

// Composite rule over [grid.lo, grid.hi]: `panels` equal panels, each carrying
// `points_per_panel` Gauss-Legendre points (exact through degree 2k-1 per
// panel) or a trapezoid stencil of the same point count.
struct QuadratureRule {
    QuadKind kind = QuadKind::gauss_legendre_composite;
    std::size_t panels = 64;
    std::size_t points_per_panel = 8;
};

// Gauss-Legendre nodes/weights on [-1, 1], by Newton iteration on P_k.
void gauss_legendre(std::size_t k, std::vector<double>& nodes, std::vector<double>& weights);

// Flattened quadrature point set for a rule over [lo, hi]. Weights sum to hi - lo.
struct QuadPoints {
    std::vector<double> x;
    std::vector<double> w;
};
QuadPoints quad_points(double lo, double hi, const QuadratureRule& rule);

// Throws NonFiniteIntegrand if f is NaN/inf at any quadrature node.
double integrate(const std::function<double(double)>& f, const Grid1D& grid,
                 const QuadratureRule& rule);

} // namespace smlab::numerics
