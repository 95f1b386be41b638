#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "smlab/errors.hpp"
#include "smlab/expfam/model.hpp"
#include "smlab/expfam/statistic.hpp"
#include "smlab/numerics/rng.hpp"

using namespace smlab;
using namespace smlab::expfam;
using smlab::numerics::Grid1D;
using smlab::numerics::QuadKind;
using smlab::numerics::QuadratureRule;
using smlab::numerics::RngStream;

namespace {

const QuadratureRule kQuad{QuadKind::gauss_legendre_composite, 256, 8};

struct NamedStat {
    const char* name;
    StatPtr stat;
    double lo, hi;
};

std::vector<NamedStat> catalog_for_derivative_checks() {
    return {
        {"bimodal_quartic(1)", bimodal_quartic(1.0), -8.0, 8.0},
        {"bimodal_quartic(3)", bimodal_quartic(3.0), -10.0, 10.0},
        {"bimodal_with_cut(2)", bimodal_with_cut(2.0), -9.0, 9.0},
        {"bimodal_nocut(2)", bimodal_nocut(2.0), -9.0, 9.0},
        {"gaussian_mean", gaussian_mean(), -6.0, 6.0},
        {"oscillating(8)", oscillating(8.0), -6.0, 6.0},
        {"mollifier_cut(0.5)", mollifier_cut(0.5), -0.8, 0.8},
        {"gaussian_mixture(2)", gaussian_mixture(2.0), -8.0, 8.0},
    };
}

} // namespace

TEST_CASE("erf: reference values and derivative") {
    CHECK(expfam::erf(0.0) == 0.0);
    CHECK(expfam::erf(1.0) == doctest::Approx(0.8427007929497149).epsilon(1e-13));
    CHECK(expfam::erf(-1.0) == doctest::Approx(-0.8427007929497149).epsilon(1e-13));
    CHECK(expfam::erf(2.5) == doctest::Approx(0.999593047982555).epsilon(1e-13));
    CHECK(expfam::erf(7.0) == 1.0);
    // d/dx erf = 2/sqrt(pi) e^{-x^2} against central differences
    for (double x : {-2.0, -0.7, 0.3, 1.1, 2.9}) {
        const double h = 1e-6;
        const double fd = (expfam::erf(x + h) - expfam::erf(x - h)) / (2 * h);
        const double an = 2.0 / std::sqrt(M_PI) * std::exp(-x * x);
        CHECK(fd == doctest::Approx(an).epsilon(1e-6));
    }
}

TEST_CASE("mollifier: normalization, gradient bound, cut statistic") {
    Mollifier m(1.0);
    // oracle (4e6-node trapezoid): I1 = 0.44399381616807987
    CHECK(m.psi_norm() == doctest::Approx(0.44399381616807987).epsilon(1e-10));

    // psi_gamma integrates to 1 (cdf saturates)
    for (double g : {0.3, 1.0, 2.5}) {
        Mollifier mg(g);
        CHECK(mg.cdf(2.0 * g) == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(mg.cdf(-2.0 * g) == 0.0);
        CHECK(mg.cdf(0.0) == doctest::Approx(0.5).epsilon(1e-9));
        // sup |psi'| <= gamma^{-2} / I1
        double sup = 0.0;
        for (int i = -400; i <= 400; ++i) sup = std::max(sup, std::abs(mg.psi_d(g * i / 401.0)));
        CHECK(sup <= (1.0 + 1e-9) / (g * g * mg.psi_norm()));
    }

    // oracle (3e6-node trapezoid): integral of psi over [-1, 1/2] = 0.8770327167226484
    CHECK(m.cdf(0.5) == doctest::Approx(0.8770327167226484).epsilon(1e-9));

    auto cut = mollifier_cut(0.7);
    std::vector<double> v(1), d(1), dd(1);
    cut->eval(-1.4, v);
    CHECK(v[0] == 0.0);
    cut->eval(1.4, v);
    CHECK(v[0] == 1.0);
    double prev = -1.0;
    for (int i = 0; i <= 50; ++i) {
        cut->eval(-0.9 + 1.8 * i / 50.0, v);
        CHECK(v[0] >= prev);
        prev = v[0];
    }
}

TEST_CASE("catalog statistics: jac and lap match finite differences") {
    RngStream rng(11, 0);
    for (const auto& ns : catalog_for_derivative_checks()) {
        CAPTURE(ns.name);
        const std::size_t m = ns.stat->m();
        std::vector<double> fp(m), fm(m), d(m), dd(m), f0(m);
        for (int rep = 0; rep < 100; ++rep) {
            const double x = ns.lo + (ns.hi - ns.lo) * rng.uniform01();
            const double h = 1e-5 * std::max(1.0, std::abs(x));
            ns.stat->eval(x + h, fp);
            ns.stat->eval(x - h, fm);
            ns.stat->eval(x, f0);
            ns.stat->jac(x, d);
            ns.stat->lap(x, dd);
            for (std::size_t k = 0; k < m; ++k) {
                const double fd1 = (fp[k] - fm[k]) / (2 * h);
                const double scale1 = std::max({std::abs(d[k]), std::abs(fd1), 1e-3});
                CHECK(std::abs(fd1 - d[k]) / scale1 < 1e-5);
                const double fd2 = (fp[k] - 2 * f0[k] + fm[k]) / (h * h);
                const double scale2 = std::max({std::abs(dd[k]), std::abs(fd2), 1e-2});
                CHECK(std::abs(fd2 - dd[k]) / scale2 < 1e-4);
            }
        }
    }
}

TEST_CASE("log_partition: known values") {
    // standard normal constant
    Grid1D g12(-12.0, 12.0, 1024);
    const double lz = log_partition(gaussian_mean(), std::vector<double>{0.0}, g12, kQuad);
    CHECK(lz == doctest::Approx(0.9189385332046727).epsilon(1e-10));

    // oracle (1e6-node trapezoid on [-11,11]): 1.2677370334040527
    Grid1D g11(-11.0, 11.0, 1024);
    const double lq = log_partition(bimodal_quartic(1.0), std::vector<double>{1.0}, g11, kQuad);
    CHECK(lq == doctest::Approx(1.2677370334040527).epsilon(1e-9));

    // theta = 0 on a width-1 domain: logZ = log(1) = 0
    Grid1D unit(0.0, 1.0, 16);
    const double lu = log_partition(bimodal_quartic(2.0), std::vector<double>{0.0}, unit, kQuad);
    CHECK(lu == doctest::Approx(0.0).epsilon(1e-12));

    // relative accuracy vs doubled resolution
    QuadratureRule dbl{QuadKind::gauss_legendre_composite, 512, 8};
    const double lq2 = log_partition(bimodal_quartic(1.0), std::vector<double>{1.0}, g11, dbl);
    CHECK(std::abs(lq - lq2) <= 1e-8 * std::max(1.0, std::abs(lq2)));

    // exponent growing toward an endpoint (inverted gaussian) diverges
    CHECK_THROWS_AS(log_partition(oscillating(2.0), std::vector<double>{-1.0, 0.0}, g12, kQuad),
                    DivergentIntegral);
}

TEST_CASE("model: normalization and truncation invariants") {
    for (const char* fam : {"bimodal_quartic", "bimodal_with_cut", "oscillating",
                            "gaussian_mixture"}) {
        CAPTURE(fam);
        const double param = std::string(fam) == "oscillating" ? 8.0 : 3.0;
        std::vector<double> theta(make_statistic(fam, param)->m(), 0.0);
        theta[0] = 1.0;
        auto model = make_model(fam, param, theta, 2048);
        // density integrates to 1 (independent trapezoid over the grid table)
        double mass = 0.0;
        const auto& nodes = model.domain().nodes;
        for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
            mass += 0.5 * (model.density(nodes[i]) + model.density(nodes[i + 1])) *
                    (nodes[i + 1] - nodes[i]);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
        // truncation: endpoint density below 1e-12 x max density
        double dmax = 0.0;
        for (double x : nodes) dmax = std::max(dmax, model.density(x));
        CHECK(model.density(model.domain().lo) < 1e-12 * dmax);
        CHECK(model.density(model.domain().hi) < 1e-12 * dmax);
    }
}

TEST_CASE("model: score identity against log-density differences") {
    auto model = make_model("bimodal_with_cut", 2.0, {1.0, 0.3}, 1024);
    const auto& nodes = model.domain().nodes;
    for (std::size_t i = 40; i < nodes.size() - 40; i += 37) {
        const double x = nodes[i];
        const double h = 1e-5;
        const double fd = (model.log_density(x + h) - model.log_density(x - h)) / (2 * h);
        const double sc = model.score(x);
        CHECK(std::abs(fd - sc) / std::max({1.0, std::abs(sc)}) < 1e-5);
    }
}

TEST_CASE("model: gaussian location density peaks at the mean") {
    for (double mu : {-1.5, 0.0, 2.0}) {
        auto model = make_model("gaussian_mean", 0.0, {mu}, 4096);
        double best = 0.0, bx = -99.0;
        for (double x : model.domain().nodes)
            if (model.density(x) > best) {
                best = model.density(x);
                bx = x;
            }
        CHECK(std::abs(bx - mu) < 0.01);
    }
}

TEST_CASE("moments: gaussian location closed form") {
    auto model = make_model("gaussian_mean", 0.0, {0.0});
    auto mo = moments(model);
    CHECK(mo.mean_F[0] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(mo.cov_F(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(mo.a_matrix(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(mo.mean_lapF[0]) < 1e-12);
    // location family drift = theta - x: variance 1
    CHECK(mo.cov_drift(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("moments: consistency identity E[drift] = 0 on every catalog model") {
    struct Case { const char* fam; double param; std::vector<double> theta; };
    const std::vector<Case> cases = {
        {"bimodal_quartic", 1.0, {1.0}},
        {"bimodal_quartic", 4.0, {1.0}},
        {"bimodal_with_cut", 3.0, {1.0, 0.0}},
        {"bimodal_with_cut", 6.0, {1.0, 0.0}},
        {"bimodal_nocut", 5.0, {1.0}},
        {"gaussian_mean", 0.0, {0.7}},
        {"oscillating", 8.0, {1.0, 1.0}},
        {"gaussian_mixture", 4.0, {1.0}},
    };
    for (const auto& c : cases) {
        CAPTURE(c.fam);
        CAPTURE(c.param);
        auto mo = moments(make_model(c.fam, c.param, c.theta));
        double norm = 0.0;
        for (double v : mo.mean_drift) norm += v * v;
        CHECK(std::sqrt(norm) < 1e-6);
        // PSD of the covariance blocks within 1e-9
        CHECK(mo.cov_F.asymmetry() < 1e-10);
        CHECK(mo.cov_drift.asymmetry() < 1e-10);
    }
}

TEST_CASE("moments: bimodal_quartic(2) variance matches the fine-grid oracle") {
    // oracle (1e6-node trapezoid on [-12,12]): mean -0.3032675152128818,
    // variance 0.17543008703592713
    auto model = make_model("bimodal_quartic", 2.0,
                            {1.0}, 8192);
    auto mo = moments(model);
    CHECK(mo.mean_F[0] == doctest::Approx(-0.3032675152128818).epsilon(1e-7));
    CHECK(mo.cov_F(0, 0) == doctest::Approx(0.17543008703592713).epsilon(1e-7));
}

TEST_CASE("moments: even families have vanishing odd moments") {
    auto model = make_model("bimodal_quartic", 3.0, {1.0});
    const double odd1 = model.expectation([](double x) { return x; });
    const double odd3 = model.expectation([](double x) { return x * x * x; });
    CHECK(std::abs(odd1) < 1e-8);
    CHECK(std::abs(odd3) < 1e-8);
}

TEST_CASE("sample: empty draw, location band, sign balance, KS statistic") {
    auto model = make_model("gaussian_mean", 0.0, {0.0});
    RngStream s(42, 0);
    CHECK(model.sample(s, 0).empty());

    const std::size_t n = 100'000;
    auto xs = model.sample(s, n);
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= double(n);
    CHECK(std::abs(mean) < 0.02);   // 6 sigma / sqrt(n)

    auto modelb = make_model("bimodal_quartic", 4.0, {1.0});
    RngStream s2(42, 1);
    auto ys = modelb.sample(s2, n);
    double frac = 0.0;
    for (double y : ys) frac += (y > 0) ? 1.0 : 0.0;
    frac /= double(n);
    CHECK(frac > 0.48);
    CHECK(frac < 0.52);

    // Kolmogorov-Smirnov against the model CDF table
    std::sort(ys.begin(), ys.end());
    const auto& nodes = modelb.domain().nodes;
    const auto& cdf = modelb.cdf_table();
    double ks = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        auto it = std::upper_bound(nodes.begin(), nodes.end(), ys[i]);
        const std::size_t j = std::min<std::size_t>(std::distance(nodes.begin(), it),
                                                    nodes.size() - 1);
        const double F = cdf[j];
        ks = std::max(ks, std::abs(F - double(i + 1) / double(n)));
    }
    CHECK(ks < 2.0 / std::sqrt(double(n)));
}
