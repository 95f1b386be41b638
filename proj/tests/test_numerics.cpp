#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "smlab/errors.hpp"
#include "smlab/numerics/grid.hpp"
#include "smlab/numerics/linalg.hpp"
#include "smlab/numerics/quadrature.hpp"
#include "smlab/numerics/rng.hpp"

using namespace smlab;
using namespace smlab::numerics;

namespace {

SymMatrix random_sym(std::size_t n, RngStream& rng, double scale = 1.0) {
    SymMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            const double v = scale * (rng.uniform01() * 2.0 - 1.0);
            m(i, j) = v;
            m(j, i) = v;
        }
    return m;
}

SymMatrix random_spd(std::size_t n, RngStream& rng) {
    // A^T A + n * I
    std::vector<double> a(n * n);
    for (auto& v : a) v = rng.uniform01() * 2.0 - 1.0;
    SymMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += a[k * n + i] * a[k * n + j];
            m(i, j) = s + (i == j ? 0.25 * double(n) : 0.0);
        }
    return m;
}

} // namespace

TEST_CASE("grid invariants") {
    Grid1D g(-3.0, 5.0, 17);
    CHECK(g.nodes.front() == -3.0);
    CHECK(g.nodes.back() == 5.0);
    for (std::size_t i = 1; i < g.n; ++i) {
        CHECK(g.nodes[i] > g.nodes[i - 1]);
        CHECK(std::abs((g.nodes[i] - g.nodes[i - 1]) - g.spacing()) < 1e-12 * g.spacing());
    }
    CHECK_THROWS_AS(Grid1D(0.0, 1.0, 8), std::invalid_argument);
}

TEST_CASE("integrate: constant and odd integrands") {
    Grid1D g01(0.0, 1.0, 16);
    QuadratureRule trap{QuadKind::trapezoid, 32, 4};
    QuadratureRule gl{QuadKind::gauss_legendre_composite, 16, 4};
    CHECK(integrate([](double) { return 1.0; }, g01, trap) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(integrate([](double) { return 1.0; }, g01, gl) == doctest::Approx(1.0).epsilon(1e-14));

    Grid1D gs(-1.0, 1.0, 16);
    CHECK(std::abs(integrate([](double x) { return x * x * x; }, gs, gl)) < 1e-15);
}

TEST_CASE("integrate: gaussian mass matches 1e6-node trapezoid oracle") {
    // oracle: 1e6-node trapezoid of exp(-x^2/2) on [-8,8] = 2.506628274630996
    Grid1D g(-8.0, 8.0, 16);
    QuadratureRule gl{QuadKind::gauss_legendre_composite, 64, 8};
    const double v = integrate([](double x) { return std::exp(-0.5 * x * x); }, g, gl);
    CHECK(v == doctest::Approx(2.506628274630996).epsilon(1e-10));
}

TEST_CASE("integrate: gauss-legendre is exact on monomials per panel") {
    Grid1D g(0.0, 2.0, 16);
    for (std::size_t pts : {2, 3, 5, 8}) {
        QuadratureRule gl{QuadKind::gauss_legendre_composite, 3, pts};
        const int maxdeg = int(2 * pts - 1);
        for (int deg = 0; deg <= maxdeg; ++deg) {
            const double got =
                integrate([&](double x) { return std::pow(x, deg); }, g, gl);
            const double want = std::pow(2.0, deg + 1) / double(deg + 1);
            CHECK(got == doctest::Approx(want).epsilon(1e-12));
        }
    }
}

TEST_CASE("integrate: refinement differences shrink for smooth integrands") {
    // x^4 term keeps the boundary derivative correction nonzero, so the
    // trapezoid error actually follows its O(h^2) law instead of
    // superconverging to the eps floor.
    Grid1D g(-8.0, 8.0, 16);
    auto f = [](double x) { return std::exp(-0.5 * x * x) + 0.01 * x * x * x * x + std::sin(x); };
    auto at = [&](std::size_t n) {
        return integrate(f, g, {QuadKind::trapezoid, n, 1});
    };
    double prev_diff = std::abs(at(256) - at(512));
    for (std::size_t n : {512u, 1024u, 2048u}) {
        const double diff = std::abs(at(n) - at(2 * n));
        CHECK(diff < prev_diff);
        prev_diff = diff;
    }
}

TEST_CASE("integrate: non-finite integrand raises") {
    Grid1D g(0.0, 1.0, 16);
    QuadratureRule gl{QuadKind::gauss_legendre_composite, 4, 4};
    CHECK_THROWS_AS(integrate([](double x) { return 1.0 / (x - x); }, g, gl),
                    NonFiniteIntegrand);
}

TEST_CASE("sym_eig: fixed small matrices") {
    auto e3 = sym_eig(SymMatrix::identity(3));
    for (double v : e3.values) CHECK(v == doctest::Approx(1.0));

    SymMatrix d(2);
    d(0, 0) = 2.0;
    d(1, 1) = -1.0;
    auto ed = sym_eig(d);
    CHECK(ed.values[0] == doctest::Approx(-1.0));
    CHECK(ed.values[1] == doctest::Approx(2.0));
    CHECK(std::abs(ed.vectors[1 * 2 + 0]) == doctest::Approx(1.0)); // axis vector for -1

    // oracle: characteristic polynomial of [[2,1],[1,2]] gives (1, 3)
    SymMatrix m(2);
    m(0, 0) = 2.0; m(0, 1) = 1.0; m(1, 0) = 1.0; m(1, 1) = 2.0;
    auto em = sym_eig(m);
    CHECK(em.values[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(em.values[1] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("sym_eig: reconstruction and orthonormality on random matrices") {
    RngStream rng(42, 0);
    for (std::size_t n : {2u, 5u, 16u, 64u}) {
        SymMatrix m = random_sym(n, rng);
        auto e = sym_eig(m);
        // V diag(lambda) V^T == m
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < n; ++k)
                    s += e.vectors[i * n + k] * e.values[k] * e.vectors[j * n + k];
                err += (s - m(i, j)) * (s - m(i, j));
            }
        CHECK(std::sqrt(err) <= 1e-7 * std::max(m.frobenius(), 1e-12));
        // orthonormal columns
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a; b < n; ++b) {
                double dot = 0.0;
                for (std::size_t k = 0; k < n; ++k)
                    dot += e.vectors[k * n + a] * e.vectors[k * n + b];
                CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) < 1e-8);
            }
    }
}

TEST_CASE("solve_spd: fixed cases and the 3x3 Hilbert oracle") {
    std::vector<double> rhs{1.0, 2.0};
    auto x = solve_spd(SymMatrix::identity(2), rhs);
    CHECK(x[0] == doctest::Approx(1.0));
    CHECK(x[1] == doctest::Approx(2.0));

    SymMatrix d(2);
    d(0, 0) = 2.0; d(1, 1) = 4.0;
    auto y = solve_spd(d, std::vector<double>{2.0, 4.0});
    CHECK(y[0] == doctest::Approx(1.0));
    CHECK(y[1] == doctest::Approx(1.0));

    // oracle: exact rational elimination of the 3x3 Hilbert system with
    // all-ones rhs gives (3, -24, 30).
    SymMatrix h(3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) h(i, j) = 1.0 / double(i + j + 1);
    auto z = solve_spd(h, std::vector<double>{1.0, 1.0, 1.0});
    CHECK(z[0] == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(z[1] == doctest::Approx(-24.0).epsilon(1e-9));
    CHECK(z[2] == doctest::Approx(30.0).epsilon(1e-9));

    SymMatrix neg(2);
    neg(0, 0) = 1.0; neg(1, 1) = -1.0;
    CHECK_THROWS_AS(solve_spd(neg, std::vector<double>{1.0, 1.0}), NotPositiveDefinite);
}

TEST_CASE("solve_spd residual contract on random SPD systems") {
    RngStream rng(42, 1);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 2 + std::size_t(rng.uniform01() * 10);
        SymMatrix a = random_spd(n, rng);
        std::vector<double> rhs(n);
        for (auto& v : rhs) v = rng.uniform01() * 2.0 - 1.0;
        auto x = solve_spd(a, rhs);
        double rnorm = 0.0, xnorm = 0.0, bnorm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += a(i, j) * x[j];
            rnorm += (s - rhs[i]) * (s - rhs[i]);
            xnorm += x[i] * x[i];
            bnorm += rhs[i] * rhs[i];
        }
        CHECK(std::sqrt(rnorm) <=
              1e-10 * (op_norm(a) * std::sqrt(xnorm) + std::sqrt(bnorm)));
    }
}

TEST_CASE("gen_eig_max: fixed cases incl. the closed-form 2x2 pencil oracle") {
    auto r1 = gen_eig_max(SymMatrix::identity(2), SymMatrix::identity(2));
    CHECK(r1.lambda_max == doctest::Approx(1.0));

    SymMatrix a(2);
    a(0, 0) = 4.0; a(1, 1) = 1.0;
    auto r2 = gen_eig_max(a, SymMatrix::identity(2));
    CHECK(r2.lambda_max == doctest::Approx(4.0));
    CHECK(std::abs(r2.w[0]) == doctest::Approx(1.0));

    // oracle: det(a - lambda b) = 4 lambda^2 - 10 lambda + 3 = 0, so
    // lambda_max = (5 + sqrt(13))/4 = 2.1513878188659974.
    SymMatrix m(2);
    m(0, 0) = 2.0; m(0, 1) = 1.0; m(1, 0) = 1.0; m(1, 1) = 2.0;
    SymMatrix b(2);
    b(0, 0) = 1.0; b(1, 1) = 4.0;
    auto r3 = gen_eig_max(m, b);
    CHECK(r3.lambda_max == doctest::Approx(2.1513878188659974).epsilon(1e-12));
    // normalization <w, b w> = 1 and the Rayleigh quotient attains lambda_max
    double wbw = 0.0, waw = 0.0;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            wbw += r3.w[i] * b(i, j) * r3.w[j];
            waw += r3.w[i] * m(i, j) * r3.w[j];
        }
    CHECK(wbw == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(waw == doctest::Approx(r3.lambda_max).epsilon(1e-10));

    SymMatrix npd(2);
    npd(0, 0) = 1.0; npd(1, 1) = 0.0;
    CHECK_THROWS_AS(gen_eig_max(m, npd), NotPositiveDefinite);
}

TEST_CASE("gen_eig_max agrees with sym_eig of b^{-1/2} a b^{-1/2}") {
    RngStream rng(42, 2);
    for (int rep = 0; rep < 10; ++rep) {
        const std::size_t n = 2 + std::size_t(rng.uniform01() * 6);
        SymMatrix a = random_sym(n, rng);
        SymMatrix b = random_spd(n, rng);
        auto r = gen_eig_max(a, b);
        // independent route: b^{-1/2} via eigendecomposition of b
        auto eb = sym_eig(b);
        SymMatrix c(n);
        // c = b^{-1/2} a b^{-1/2}
        std::vector<double> bs(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < n; ++k)
                    s += eb.vectors[i * n + k] / std::sqrt(eb.values[k]) *
                         eb.vectors[j * n + k];
                bs[i * n + j] = s;
            }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < n; ++k)
                    for (std::size_t l = 0; l < n; ++l)
                        s += bs[i * n + k] * a(k, l) * bs[l * n + j];
                c(i, j) = s;
            }
        c.symmetrize();
        auto ec = sym_eig(c);
        CHECK(r.lambda_max ==
              doctest::Approx(ec.values.back()).epsilon(1e-8));
    }
}

TEST_CASE("RowQR matches the normal equations on well-conditioned data") {
    RngStream rng(42, 3);
    const std::size_t m = 3, n = 200;
    RowQR qr(m);
    SymMatrix gram(m);
    std::vector<double> rhs(m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row(m);
        for (auto& v : row) v = rng.std_normal();
        qr.add_row(row);
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = 0; b < m; ++b) gram(a, b) += row[a] * row[b];
        for (std::size_t a = 0; a < m; ++a) rhs[a] += row[a] * 0.5;
    }
    auto x1 = qr.solve_normal(rhs);
    auto x2 = solve_spd(gram, rhs);
    for (std::size_t k = 0; k < m; ++k)
        CHECK(x1[k] == doctest::Approx(x2[k]).epsilon(1e-9));
}

TEST_CASE("tridiagonal eigensolver matches Jacobi on small matrices") {
    RngStream rng(42, 4);
    const std::size_t n = 24;
    std::vector<double> d(n), e(n - 1);
    for (auto& v : d) v = rng.uniform01() * 4.0 - 2.0;
    for (auto& v : e) v = rng.uniform01() * 2.0 - 1.0;
    SymMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = d[i];
    for (std::size_t i = 0; i + 1 < n; ++i) {
        m(i, i + 1) = e[i];
        m(i + 1, i) = e[i];
    }
    auto ej = sym_eig(m);
    auto es = tridiag_smallest_eigs(d, e, 3);
    for (std::size_t k = 0; k < 3; ++k)
        CHECK(es[k] == doctest::Approx(ej.values[k]).epsilon(1e-10));
    // eigenvector residual
    auto v = tridiag_eigvec(d, e, es[1]);
    double res = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double s = d[i] * v[i] - es[1] * v[i];
        if (i > 0) s += e[i - 1] * v[i - 1];
        if (i + 1 < n) s += e[i] * v[i + 1];
        res += s * s;
    }
    CHECK(std::sqrt(res) < 1e-8);
}

TEST_CASE("rng: determinism and distribution sanity") {
    RngStream s1(123, 7), s2(123, 7);
    for (int i = 0; i < 1000; ++i) CHECK(s1.next_u64() == s2.next_u64());

    RngStream r(99, 0);
    for (int i = 0; i < 1000; ++i) {
        const double v = r.rademacher();
        CHECK((v == 1.0 || v == -1.0));
    }

    // CLT band: mean of 1e6 std normals within +-0.005 (3.3 sigma / sqrt(n) ~ 0.0033)
    RngStream g(2024, 1);
    double sum = 0.0;
    const int n = 1'000'000;
    for (int i = 0; i < n; ++i) sum += g.std_normal();
    CHECK(std::abs(sum / n) < 0.005);
}

TEST_CASE("rng: distinct streams pass a pairwise correlation check") {
    const int n = 100'000;
    RngStream a(5, 0), b(5, 1), c(5, 2);
    std::vector<double> xa(n), xb(n), xc(n);
    for (int i = 0; i < n; ++i) {
        xa[i] = a.uniform01();
        xb[i] = b.uniform01();
        xc[i] = c.uniform01();
    }
    auto corr = [&](const std::vector<double>& u, const std::vector<double>& v) {
        double mu = 0, mv = 0;
        for (int i = 0; i < n; ++i) { mu += u[i]; mv += v[i]; }
        mu /= n; mv /= n;
        double suv = 0, suu = 0, svv = 0;
        for (int i = 0; i < n; ++i) {
            suv += (u[i] - mu) * (v[i] - mv);
            suu += (u[i] - mu) * (u[i] - mu);
            svv += (v[i] - mv) * (v[i] - mv);
        }
        return suv / std::sqrt(suu * svv);
    };
    CHECK(std::abs(corr(xa, xb)) < 0.01);
    CHECK(std::abs(corr(xa, xc)) < 0.01);
    CHECK(std::abs(corr(xb, xc)) < 0.01);
}
