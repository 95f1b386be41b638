#include "smlab/expfam/statistic.hpp"

#include <cmath>
#include <stdexcept>

#include "smlab/numerics/quadrature.hpp"

namespace smlab::expfam {

double erf(double x) {
    const double ax = std::abs(x);
    if (ax >= 6.5) return x > 0 ? 1.0 : -1.0;
    const double x2 = x * x;
    // sum (2x^2)^n / (2n+1)!!, all terms positive
    double term = 1.0;
    double sum = 1.0;
    for (int n = 1; n < 200; ++n) {
        term *= 2.0 * x2 / double(2 * n + 1);
        sum += term;
        if (term < 1e-18 * sum) break;
    }
    return 2.0 * x / std::sqrt(M_PI) * std::exp(-x2) * sum;
}

namespace {

double bump(double y) {
    const double y2 = y * y;
    if (y2 >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - y2));
}

double bump_d(double y) {
    const double y2 = y * y;
    if (y2 >= 1.0) return 0.0;
    const double u = 1.0 - y2;
    return bump(y) * (-2.0 * y / (u * u));
}

// 8-point Gauss-Legendre on [a, b]
double gl8(double (*f)(double), double a, double b) {
    static const auto nw = [] {
        std::pair<std::vector<double>, std::vector<double>> p;
        smlab::numerics::gauss_legendre(8, p.first, p.second);
        return p;
    }();
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t i = 0; i < 8; ++i) s += nw.second[i] * f(mid + half * nw.first[i]);
    return half * s;
}

} // namespace

Mollifier::Mollifier(double gamma) : gamma_(gamma), panels_(2048) {
    if (!(gamma > 0.0)) throw std::invalid_argument("Mollifier: gamma must be positive");
    cum_.assign(panels_ + 1, 0.0);
    const double h = 2.0 / double(panels_);
    for (std::size_t i = 0; i < panels_; ++i)
        cum_[i + 1] = cum_[i] + gl8(&bump, -1.0 + h * double(i), -1.0 + h * double(i + 1));
    norm_ = cum_.back();
}

double Mollifier::psi(double y) const { return bump(y / gamma_) / (norm_ * gamma_); }

double Mollifier::psi_d(double y) const {
    return bump_d(y / gamma_) / (norm_ * gamma_ * gamma_);
}

double Mollifier::cdf(double x) const {
    const double t = x / gamma_;
    if (t <= -1.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double h = 2.0 / double(panels_);
    const std::size_t k = std::min<std::size_t>(panels_ - 1, std::size_t((t + 1.0) / h));
    const double left = -1.0 + h * double(k);
    return (cum_[k] + gl8(&bump, left, t)) / norm_;
}

namespace {

class QuarticStat final : public SufficientStatistic {
public:
    explicit QuarticStat(double a) : a2_(a * a) {}
    std::size_t m() const override { return 1; }
    void eval(double x, std::span<double> F) const override {
        const double x2 = x * x;
        F[0] = -x2 * x2 / (8.0 * a2_) + x2 / 4.0 - a2_ / 8.0;
    }
    void jac(double x, std::span<double> d) const override {
        d[0] = -x * x * x / (2.0 * a2_) + x / 2.0;
    }
    void lap(double x, std::span<double> dd) const override {
        dd[0] = -1.5 * x * x / a2_ + 0.5;
    }

private:
    double a2_;
};

class CutFamilyStat final : public SufficientStatistic {
public:
    CutFamilyStat(double a, bool with_cut) : a2_(a * a), cut_(with_cut) {}
    std::size_t m() const override { return cut_ ? 2 : 1; }
    void eval(double x, std::span<double> F) const override {
        const double x2 = x * x;
        const double f1 = x2 - x2 * x2 / (2.0 * a2_);
        F[0] = f1;
        if (cut_) F[1] = f1 + erf(x);
    }
    void jac(double x, std::span<double> d) const override {
        const double d1 = 2.0 * x - 2.0 * x * x * x / a2_;
        d[0] = d1;
        if (cut_) d[1] = d1 + 2.0 / std::sqrt(M_PI) * std::exp(-x * x);
    }
    void lap(double x, std::span<double> dd) const override {
        const double dd1 = 2.0 - 6.0 * x * x / a2_;
        dd[0] = dd1;
        if (cut_) dd[1] = dd1 - 4.0 * x / std::sqrt(M_PI) * std::exp(-x * x);
    }

private:
    double a2_;
    bool cut_;
};

class GaussianMeanStat final : public SufficientStatistic {
public:
    std::size_t m() const override { return 1; }
    void eval(double x, std::span<double> F) const override { F[0] = x; }
    void jac(double, std::span<double> d) const override { d[0] = 1.0; }
    void lap(double, std::span<double> dd) const override { dd[0] = 0.0; }
    bool has_base() const override { return true; }
    double base(double x) const override { return -0.5 * x * x; }
    double base_d(double x) const override { return -x; }
    double base_dd(double) const override { return -1.0; }
};

class OscillatingStat final : public SufficientStatistic {
public:
    explicit OscillatingStat(double w) : w_(w) {}
    std::size_t m() const override { return 2; }
    void eval(double x, std::span<double> F) const override {
        F[0] = -0.5 * x * x;
        F[1] = -std::sin(w_ * x);
    }
    void jac(double x, std::span<double> d) const override {
        d[0] = -x;
        d[1] = -w_ * std::cos(w_ * x);
    }
    void lap(double x, std::span<double> dd) const override {
        dd[0] = -1.0;
        dd[1] = w_ * w_ * std::sin(w_ * x);
    }

private:
    double w_;
};

class MollifierCutStat final : public SufficientStatistic {
public:
    explicit MollifierCutStat(double gamma) : moll_(gamma) {}
    std::size_t m() const override { return 1; }
    void eval(double x, std::span<double> F) const override { F[0] = moll_.cdf(x); }
    void jac(double x, std::span<double> d) const override { d[0] = moll_.psi(x); }
    void lap(double x, std::span<double> dd) const override { dd[0] = moll_.psi_d(x); }

private:
    Mollifier moll_;
};

class MixtureStat final : public SufficientStatistic {
public:
    explicit MixtureStat(double a) : a_(a) {}
    std::size_t m() const override { return 1; }
    void eval(double x, std::span<double> F) const override {
        // log cosh(ax) = |ax| + log((1 + e^{-2|ax|})/2), overflow-safe
        const double t = std::abs(a_ * x);
        F[0] = -0.5 * x * x + t + std::log1p(std::exp(-2.0 * t)) - std::log(2.0);
    }
    void jac(double x, std::span<double> d) const override {
        d[0] = -x + a_ * std::tanh(a_ * x);
    }
    void lap(double x, std::span<double> dd) const override {
        const double th = std::tanh(a_ * x);
        dd[0] = -1.0 + a_ * a_ * (1.0 - th * th);
    }

private:
    double a_;
};

class ShiftedStat final : public SufficientStatistic {
public:
    ShiftedStat(StatPtr inner, double c) : inner_(std::move(inner)), c_(c) {}
    std::size_t m() const override { return inner_->m(); }
    void eval(double x, std::span<double> F) const override { inner_->eval(x - c_, F); }
    void jac(double x, std::span<double> d) const override { inner_->jac(x - c_, d); }
    void lap(double x, std::span<double> dd) const override { inner_->lap(x - c_, dd); }
    bool has_base() const override { return inner_->has_base(); }
    double base(double x) const override { return inner_->base(x - c_); }
    double base_d(double x) const override { return inner_->base_d(x - c_); }
    double base_dd(double x) const override { return inner_->base_dd(x - c_); }

private:
    StatPtr inner_;
    double c_;
};

} // namespace

StatPtr bimodal_quartic(double a) { return std::make_shared<QuarticStat>(a); }
StatPtr bimodal_with_cut(double a) { return std::make_shared<CutFamilyStat>(a, true); }
StatPtr bimodal_nocut(double a) { return std::make_shared<CutFamilyStat>(a, false); }
StatPtr gaussian_mean() { return std::make_shared<GaussianMeanStat>(); }
StatPtr oscillating(double omega) { return std::make_shared<OscillatingStat>(omega); }
StatPtr mollifier_cut(double gamma) { return std::make_shared<MollifierCutStat>(gamma); }
StatPtr gaussian_mixture(double a) { return std::make_shared<MixtureStat>(a); }

StatPtr make_statistic(const std::string& name, double param) {
    if (name == "bimodal_quartic") return bimodal_quartic(param);
    if (name == "bimodal_with_cut") return bimodal_with_cut(param);
    if (name == "bimodal_nocut") return bimodal_nocut(param);
    if (name == "gaussian_mean") return gaussian_mean();
    if (name == "oscillating") return oscillating(param);
    if (name == "mollifier_cut") return mollifier_cut(param);
    if (name == "gaussian_mixture") return gaussian_mixture(param);
    throw std::invalid_argument("unknown statistic: " + name);
}

StatPtr shifted(StatPtr stat, double c) {
    return std::make_shared<ShiftedStat>(std::move(stat), c);
}

} // namespace smlab::expfam
