#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace smlab::numerics {

// Dense symmetric matrix, row-major. Kept symmetric by construction; `symmetrize`
// averages off-diagonal pairs when entries come from quadrature.
struct SymMatrix {
    std::size_t dim = 0;
    std::vector<double> a;

    SymMatrix() = default;
    explicit SymMatrix(std::size_t d) : dim(d), a(d * d, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * dim + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * dim + j]; }

    static SymMatrix identity(std::size_t d);
    void symmetrize();
    double frobenius() const;
    // Largest |off-diagonal| relative asymmetry, for invariant checks.
    double asymmetry() const;
};

SymMatrix operator*(double s, const SymMatrix& m);
SymMatrix operator+(const SymMatrix& x, const SymMatrix& y);
SymMatrix operator-(const SymMatrix& x, const SymMatrix& y);

struct EigenDecomposition {
    std::vector<double> values;    // ascending
    std::vector<double> vectors;   // column j = eigenvector of values[j], row-major dim x dim
};

// Cyclic Jacobi rotations; eigenvalues ascending, orthonormal eigenvectors.
EigenDecomposition sym_eig(const SymMatrix& m);

// Operator (spectral) norm = max |eigenvalue|.
double op_norm(const SymMatrix& m);

struct GenEigMax {
    double lambda_max = 0.0;
    std::vector<double> w;   // maximizer, normalized <w, b w> = 1
};

// max_w <w,a w>/<w,b w> for b positive definite, via the Cholesky reduction
// L^{-1} a L^{-T}. Throws NotPositiveDefinite(b).
GenEigMax gen_eig_max(const SymMatrix& a, const SymMatrix& b);

// SPD solve by Cholesky. Throws NotPositiveDefinite.
std::vector<double> solve_spd(const SymMatrix& a, std::span<const double> rhs);

// Inverse of an SPD matrix by column solves.
SymMatrix inverse_spd(const SymMatrix& a);

// Row-sequential Givens QR of a tall matrix: feed sample rows, read off the
// m x m upper-triangular R factor with nonnegative diagonal. O(m^2) per row,
// O(m^2) storage; used where forming the Gram matrix would square the
// condition number.
class RowQR {
public:
    explicit RowQR(std::size_t m);
    void add_row(std::span<const double> row);
    std::size_t rows() const { return rows_; }
    double r(std::size_t i, std::size_t j) const { return r_[i * m_ + j]; }
    // Solves R^T R x = rhs (the normal equations of the accumulated rows).
    std::vector<double> solve_normal(std::span<const double> rhs) const;
    double min_abs_diag() const;
    double max_abs_diag() const;

private:
    std::size_t m_;
    std::size_t rows_ = 0;
    std::vector<double> r_;
};

// Eigenvalues of a symmetric tridiagonal matrix by Sturm-sequence bisection:
// returns the k smallest. `diag` has n entries, `off` n-1.
std::vector<double> tridiag_smallest_eigs(std::span<const double> diag,
                                          std::span<const double> off, std::size_t k);

// Eigenvector for a computed tridiagonal eigenvalue, by inverse iteration.
std::vector<double> tridiag_eigvec(std::span<const double> diag, std::span<const double> off,
                                   double lambda);

} // namespace smlab::numerics
