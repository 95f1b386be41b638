#include "smlab/numerics/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "smlab/errors.hpp"

namespace smlab::numerics {

SymMatrix SymMatrix::identity(std::size_t d) {
    SymMatrix m(d);
    for (std::size_t i = 0; i < d; ++i) m(i, i) = 1.0;
    return m;
}

void SymMatrix::symmetrize() {
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = i + 1; j < dim; ++j) {
            const double v = 0.5 * ((*this)(i, j) + (*this)(j, i));
            (*this)(i, j) = v;
            (*this)(j, i) = v;
        }
}

double SymMatrix::frobenius() const {
    double s = 0.0;
    for (double v : a) s += v * v;
    return std::sqrt(s);
}

double SymMatrix::asymmetry() const {
    double worst = 0.0;
    const double scale = std::max(frobenius(), 1e-300);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = i + 1; j < dim; ++j)
            worst = std::max(worst, std::abs((*this)(i, j) - (*this)(j, i)) / scale);
    return worst;
}

SymMatrix operator*(double s, const SymMatrix& m) {
    SymMatrix r = m;
    for (double& v : r.a) v *= s;
    return r;
}

SymMatrix operator+(const SymMatrix& x, const SymMatrix& y) {
    SymMatrix r = x;
    for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] += y.a[i];
    return r;
}

SymMatrix operator-(const SymMatrix& x, const SymMatrix& y) {
    SymMatrix r = x;
    for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] -= y.a[i];
    return r;
}

EigenDecomposition sym_eig(const SymMatrix& m) {
    const std::size_t n = m.dim;
    std::vector<double> a = m.a;
    std::vector<double> v(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

    auto off_norm = [&]() {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += a[i * n + j] * a[i * n + j];
        return std::sqrt(2.0 * s);
    };

    const double scale = std::max(m.frobenius(), std::numeric_limits<double>::min());
    const std::size_t max_sweeps = 100;
    std::size_t sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        if (off_norm() <= 1e-14 * scale) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (std::abs(apq) <= 1e-300) continue;
                const double app = a[p * n + p];
                const double aqq = a[q * n + q];
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k * n + p];
                    const double akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p * n + k];
                    const double aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v[k * n + p];
                    const double vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if (sweep == max_sweeps && off_norm() > 1e-10 * scale)
        throw NoConvergence("Jacobi eigensolver hit the sweep cap", off_norm());

    EigenDecomposition e;
    e.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) e.values[i] = a[i * n + i];
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t x, std::size_t y) { return e.values[x] < e.values[y]; });
    EigenDecomposition out;
    out.values.resize(n);
    out.vectors.assign(n * n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = e.values[idx[j]];
        for (std::size_t i = 0; i < n; ++i) out.vectors[i * n + j] = v[i * n + idx[j]];
    }
    return out;
}

double op_norm(const SymMatrix& m) {
    if (m.dim == 0) return 0.0;
    const auto e = sym_eig(m);
    return std::max(std::abs(e.values.front()), std::abs(e.values.back()));
}

namespace {

// Lower Cholesky factor; throws NotPositiveDefinite on a nonpositive pivot
// (relative to the diagonal scale).
std::vector<double> cholesky(const SymMatrix& a) {
    const std::size_t n = a.dim;
    std::vector<double> l(n * n, 0.0);
    double diag_scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) diag_scale = std::max(diag_scale, std::abs(a(i, i)));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
            if (i == j) {
                if (!(s > 1e-14 * diag_scale) || !std::isfinite(s))
                    throw NotPositiveDefinite(s);
                l[i * n + i] = std::sqrt(s);
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    return l;
}

} // namespace

std::vector<double> solve_spd(const SymMatrix& a, std::span<const double> rhs) {
    if (rhs.size() != a.dim) throw std::invalid_argument("solve_spd: rhs size mismatch");
    const std::size_t n = a.dim;
    const auto l = cholesky(a);
    std::vector<double> y(n), x(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = rhs[i];
        for (std::size_t k = 0; k < i; ++k) s -= l[i * n + k] * y[k];
        y[i] = s / l[i * n + i];
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= l[k * n + ii] * x[k];
        x[ii] = s / l[ii * n + ii];
    }
    return x;
}

SymMatrix inverse_spd(const SymMatrix& a) {
    const std::size_t n = a.dim;
    SymMatrix inv(n);
    std::vector<double> e(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        const auto col = solve_spd(a, e);
        for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
        e[j] = 0.0;
    }
    inv.symmetrize();
    return inv;
}

GenEigMax gen_eig_max(const SymMatrix& a, const SymMatrix& b) {
    if (a.dim != b.dim) throw std::invalid_argument("gen_eig_max: dimension mismatch");
    const std::size_t n = a.dim;
    const auto l = cholesky(b);   // throws NotPositiveDefinite

    // C = L^{-1} A L^{-T}: solve L X = A, then L C^T = X^T.
    std::vector<double> x(n * n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < i; ++k) s -= l[i * n + k] * x[k * n + j];
            x[i * n + j] = s / l[i * n + i];
        }
    }
    SymMatrix c(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double s = x[i * n + j];
            for (std::size_t k = 0; k < j; ++k) s -= l[j * n + k] * c(i, k);
            c(i, j) = s / l[j * n + j];
        }
    }
    c.symmetrize();

    const auto e = sym_eig(c);
    GenEigMax r;
    r.lambda_max = e.values.back();
    // w = L^{-T} y for the top eigenvector y; then <w, B w> = <y, y> = 1.
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = e.vectors[i * n + (n - 1)];
    r.w.assign(n, 0.0);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= l[k * n + ii] * r.w[k];
        r.w[ii] = s / l[ii * n + ii];
    }
    return r;
}

RowQR::RowQR(std::size_t m) : m_(m), r_(m * m, 0.0) {}

void RowQR::add_row(std::span<const double> row) {
    if (row.size() != m_) throw std::invalid_argument("RowQR: row size mismatch");
    ++rows_;
    std::vector<double> v(row.begin(), row.end());
    for (std::size_t i = 0; i < m_; ++i) {
        const double rii = r_[i * m_ + i];
        const double vi = v[i];
        const double h = std::hypot(rii, vi);
        if (h == 0.0) continue;
        const double c = rii / h;
        const double s = vi / h;
        r_[i * m_ + i] = h;
        for (std::size_t j = i + 1; j < m_; ++j) {
            const double rij = r_[i * m_ + j];
            const double vj = v[j];
            r_[i * m_ + j] = c * rij + s * vj;
            v[j] = -s * rij + c * vj;
        }
        v[i] = 0.0;
    }
}

std::vector<double> RowQR::solve_normal(std::span<const double> rhs) const {
    if (rhs.size() != m_) throw std::invalid_argument("RowQR: rhs size mismatch");
    std::vector<double> y(m_), x(m_);
    for (std::size_t i = 0; i < m_; ++i) {
        double s = rhs[i];
        for (std::size_t k = 0; k < i; ++k) s -= r_[k * m_ + i] * y[k];
        y[i] = s / r_[i * m_ + i];
    }
    for (std::size_t ii = m_; ii-- > 0;) {
        double s = y[ii];
        for (std::size_t k = ii + 1; k < m_; ++k) s -= r_[ii * m_ + k] * x[k];
        x[ii] = s / r_[ii * m_ + ii];
    }
    return x;
}

double RowQR::min_abs_diag() const {
    double v = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m_; ++i) v = std::min(v, std::abs(r_[i * m_ + i]));
    return v;
}

double RowQR::max_abs_diag() const {
    double v = 0.0;
    for (std::size_t i = 0; i < m_; ++i) v = std::max(v, std::abs(r_[i * m_ + i]));
    return v;
}

namespace {

// Sturm count: number of eigenvalues of the tridiagonal matrix strictly below x.
std::size_t sturm_count(std::span<const double> d, std::span<const double> e, double x) {
    std::size_t count = 0;
    double q = d[0] - x;
    if (q < 0.0) ++count;
    for (std::size_t i = 1; i < d.size(); ++i) {
        const double denom = (q == 0.0) ? 1e-300 : q;
        q = d[i] - x - e[i - 1] * e[i - 1] / denom;
        if (q < 0.0) ++count;
    }
    return count;
}

} // namespace

std::vector<double> tridiag_smallest_eigs(std::span<const double> diag,
                                          std::span<const double> off, std::size_t k) {
    const std::size_t n = diag.size();
    if (off.size() + 1 != n) throw std::invalid_argument("tridiag: size mismatch");
    // Gershgorin bounds
    double lo = diag[0], hi = diag[0];
    for (std::size_t i = 0; i < n; ++i) {
        double r = 0.0;
        if (i > 0) r += std::abs(off[i - 1]);
        if (i + 1 < n) r += std::abs(off[i]);
        lo = std::min(lo, diag[i] - r);
        hi = std::max(hi, diag[i] + r);
    }
    std::vector<double> eigs(k);
    for (std::size_t j = 0; j < k; ++j) {
        double a = lo, b = hi;
        for (int iter = 0; iter < 200; ++iter) {
            const double mid = 0.5 * (a + b);
            if (sturm_count(diag, off, mid) >= j + 1)
                b = mid;
            else
                a = mid;
            if (b - a <= 1e-14 * std::max(1.0, std::abs(b)) + 1e-300) break;
        }
        eigs[j] = 0.5 * (a + b);
    }
    return eigs;
}

std::vector<double> tridiag_eigvec(std::span<const double> diag, std::span<const double> off,
                                   double lambda) {
    const std::size_t n = diag.size();
    // Inverse iteration on (T - lambda I) with partial-pivoting tridiagonal LU
    // (two superdiagonals retained from row swaps).
    std::vector<double> v(n, 1.0 / std::sqrt(double(n)));
    const double shift = lambda;
    for (int pass = 0; pass < 3; ++pass) {
        std::vector<double> d1(n), d2(n - 1 > 0 ? n - 1 : 0), d3(n > 2 ? n - 2 : 0);
        std::vector<double> sub(n - 1 > 0 ? n - 1 : 0);
        for (std::size_t i = 0; i < n; ++i) d1[i] = diag[i] - shift;
        for (std::size_t i = 0; i + 1 < n; ++i) { d2[i] = off[i]; sub[i] = off[i]; }
        std::fill(d3.begin(), d3.end(), 0.0);
        std::vector<double> b = v;
        std::vector<int> swapped(n, 0);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (std::abs(sub[i]) > std::abs(d1[i])) {
                swapped[i] = 1;
                std::swap(d1[i], sub[i]);
                std::swap(d2[i], d1[i + 1]);
                if (i + 2 < n) std::swap(d3[i], d2[i + 1]);
                std::swap(b[i], b[i + 1]);
            }
            const double piv = (d1[i] == 0.0) ? 1e-300 : d1[i];
            const double m = sub[i] / piv;
            d1[i + 1] -= m * d2[i];
            if (i + 2 < n) d2[i + 1] -= m * d3[i];
            b[i + 1] -= m * b[i];
        }
        for (std::size_t ii = n; ii-- > 0;) {
            double s = b[ii];
            if (ii + 1 < n) s -= d2[ii] * b[ii + 1];
            if (ii + 2 < n) s -= d3[ii] * b[ii + 2];
            const double piv = (d1[ii] == 0.0) ? 1e-300 : d1[ii];
            b[ii] = s / piv;
        }
        double norm = 0.0;
        for (double x : b) norm += x * x;
        norm = std::sqrt(norm);
        if (norm == 0.0 || !std::isfinite(norm)) break;
        for (std::size_t i = 0; i < n; ++i) v[i] = b[i] / norm;
    }
    return v;
}

} // namespace smlab::numerics
