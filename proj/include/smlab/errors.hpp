#pragma once

#include <stdexcept>
#include <string>

namespace smlab {

// Base class for every failure condition this library reports.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonFiniteIntegrand : Error {
    double node;
    explicit NonFiniteIntegrand(double x)
        : Error("integrand is not finite at node " + std::to_string(x)), node(x) {}
};

struct NoConvergence : Error {
    double residual;
    NoConvergence(const std::string& what, double r)
        : Error(what + " (residual " + std::to_string(r) + ")"), residual(r) {}
};

struct NotPositiveDefinite : Error {
    double min_pivot;
    explicit NotPositiveDefinite(double p)
        : Error("matrix is not positive definite (pivot " + std::to_string(p) + ")"),
          min_pivot(p) {}
};

struct SingularEmpiricalMatrix : Error {
    double min_eigenvalue;
    explicit SingularEmpiricalMatrix(double ev)
        : Error("empirical Jacobian Gram matrix is numerically singular "
                "(smallest eigenvalue " + std::to_string(ev) + ")"),
          min_eigenvalue(ev) {}
};

struct DivergentIntegral : Error {
    DivergentIntegral() : Error("integrand grows toward a domain endpoint") {}
};

struct ZeroDensityNode : Error {
    std::size_t index;
    explicit ZeroDensityNode(std::size_t i)
        : Error("density vanishes at interior node " + std::to_string(i)), index(i) {}
};

struct DivergentCriterion : Error {
    DivergentCriterion() : Error("tail criterion did not attain its sup inside the grid") {}
};

struct ZeroConditional : Error {
    ZeroConditional() : Error("model assigns probability 0 to an observed conditional") {}
};

struct DegenerateDenominator : Error {
    DegenerateDenominator() : Error("tensorization denominator below 1e-14; ratio is +inf") {}
};

struct DivergedLoss : Error {
    double loss;
    explicit DivergedLoss(double l)
        : Error("training loss diverged (" + std::to_string(l) + ")"), loss(l) {}
};

struct IoError : Error {
    std::string path;
    IoError(const std::string& what, std::string p)
        : Error(what + ": " + p), path(std::move(p)) {}
};

} // namespace smlab
