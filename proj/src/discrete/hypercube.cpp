#include "smlab/discrete/hypercube.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "smlab/errors.hpp"

namespace smlab::discrete {

using json = nlohmann::json;

HypercubeModel::HypercubeModel(std::size_t d, std::vector<double> log_weights)
    : d_(d), log_w_(std::move(log_weights)) {
    if (d_ == 0 || d_ > 12) throw std::invalid_argument("HypercubeModel: need 1 <= d <= 12");
    if (log_w_.size() != states()) throw std::invalid_argument("HypercubeModel: table size");
    double m = -std::numeric_limits<double>::infinity();
    for (double v : log_w_) m = std::max(m, v);
    if (!std::isfinite(m)) throw std::invalid_argument("HypercubeModel: all weights zero");
    double z = 0.0;
    for (double v : log_w_) z += std::exp(v - m);
    log_z_ = m + std::log(z);
    prob_.resize(states());
    cum_.resize(states());
    double acc = 0.0;
    for (std::size_t x = 0; x < states(); ++x) {
        prob_[x] = std::exp(log_w_[x] - log_z_);
        acc += prob_[x];
        cum_[x] = acc;
    }
    for (auto& c : cum_) c /= acc;
    cum_.back() = 1.0;
}

double HypercubeModel::conditional_plus(std::size_t i, Config x) const {
    const Config up = x | (Config(1) << i);
    const Config dn = up ^ (Config(1) << i);
    const double pu = prob_[up], pd = prob_[dn];
    const double s = pu + pd;
    if (s <= 0.0) throw ZeroConditional();
    return pu / s;
}

Config HypercubeModel::sample_one(numerics::RngStream& stream) const {
    const double u = stream.uniform01();
    const auto it = std::lower_bound(cum_.begin(), cum_.end(), u);
    return Config(std::min<std::size_t>(std::size_t(it - cum_.begin()), states() - 1));
}

std::vector<Config> HypercubeModel::sample(numerics::RngStream& stream, std::size_t n) const {
    std::vector<Config> out(n);
    for (auto& x : out) x = sample_one(stream);
    return out;
}

Config HypercubeModel::glauber_step(Config x, numerics::RngStream& stream) const {
    const std::size_t i =
        std::min<std::size_t>(d_ - 1, std::size_t(stream.uniform01() * double(d_)));
    const double p_plus = conditional_plus(i, x);
    const Config up = x | (Config(1) << i);
    return (stream.uniform01() < p_plus) ? up : up ^ (Config(1) << i);
}

std::string HypercubeModel::to_json() const {
    json j;
    j["d"] = d_;
    j["log_weights"] = log_w_;
    return j.dump();
}

HypercubeModel HypercubeModel::from_json(const std::string& text) {
    const json j = json::parse(text);
    return HypercubeModel(j.at("d").get<std::size_t>(),
                          j.at("log_weights").get<std::vector<double>>());
}

HypercubeModel IsingFamily::model(std::span<const double> h,
                                  std::span<const double> coupling) const {
    if (h.size() != d || coupling.size() != edges.size())
        throw std::invalid_argument("IsingFamily: parameter sizes");
    std::vector<double> lw(std::size_t(1) << d, 0.0);
    for (std::size_t x = 0; x < lw.size(); ++x) {
        double s = 0.0;
        for (std::size_t i = 0; i < d; ++i) s += h[i] * spin(Config(x), i);
        for (std::size_t e = 0; e < edges.size(); ++e)
            s += coupling[e] * spin(Config(x), edges[e].first) * spin(Config(x), edges[e].second);
        lw[x] = s;
    }
    return HypercubeModel(d, std::move(lw));
}

std::string IsingFamily::to_json(std::span<const double> h,
                                 std::span<const double> coupling) const {
    json j;
    j["d"] = d;
    j["edges"] = json::array();
    for (auto [a, b] : edges) j["edges"].push_back({a, b});
    j["h"] = std::vector<double>(h.begin(), h.end());
    j["J"] = std::vector<double>(coupling.begin(), coupling.end());
    return j.dump();
}

std::pair<IsingFamily, std::vector<std::vector<double>>> IsingFamily::from_json(
    const std::string& text) {
    const json j = json::parse(text);
    IsingFamily f;
    f.d = j.at("d").get<std::size_t>();
    for (const auto& e : j.at("edges"))
        f.edges.emplace_back(e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>());
    return {f, {j.at("h").get<std::vector<double>>(), j.at("J").get<std::vector<double>>()}};
}

namespace {

// samples compressed to counts over the 2^d table
std::vector<double> count_table(std::size_t d, std::span<const Config> samples) {
    std::vector<double> c(std::size_t(1) << d, 0.0);
    for (Config x : samples) {
        if (x >= c.size()) throw std::invalid_argument("sample configuration out of range");
        c[x] += 1.0;
    }
    return c;
}

double kl_tables(const std::vector<double>& p, const std::vector<double>& q) {
    double s = 0.0;
    for (std::size_t x = 0; x < p.size(); ++x) {
        if (p[x] <= 0.0) continue;
        s += p[x] * (std::log(p[x]) - std::log(q[x]));
    }
    return s;
}

} // namespace

double pseudolikelihood_objective(const HypercubeModel& q, std::span<const Config> samples) {
    const auto counts = count_table(q.d(), samples);
    double s = 0.0;
    for (std::size_t x = 0; x < counts.size(); ++x) {
        if (counts[x] == 0.0) continue;
        double term = 0.0;
        for (std::size_t i = 0; i < q.d(); ++i) {
            const double cp = q.conditional_plus(i, Config(x));
            const double pr = spin(Config(x), i) > 0 ? cp : 1.0 - cp;
            if (pr <= 0.0) throw ZeroConditional();
            term += std::log(pr);
        }
        s += counts[x] * term;
    }
    return s / double(samples.size());
}

double pseudolikelihood_population(const HypercubeModel& q, const HypercubeModel& p) {
    double s = 0.0;
    for (std::size_t x = 0; x < p.states(); ++x) {
        if (p.prob(Config(x)) <= 0.0) continue;
        double term = 0.0;
        for (std::size_t i = 0; i < q.d(); ++i) {
            const double cp = q.conditional_plus(i, Config(x));
            const double pr = spin(Config(x), i) > 0 ? cp : 1.0 - cp;
            if (pr <= 0.0) throw ZeroConditional();
            term += std::log(pr);
        }
        s += p.prob(Config(x)) * term;
    }
    return s;
}

namespace {

double rm_probability_form(const HypercubeModel& q, const std::vector<double>& weights,
                           double total) {
    double s = 0.0;
    for (std::size_t x = 0; x < weights.size(); ++x) {
        if (weights[x] == 0.0) continue;
        double term = 0.0;
        for (std::size_t i = 0; i < q.d(); ++i) {
            const double cp = q.conditional_plus(i, Config(x));
            const double ind = spin(Config(x), i) > 0 ? 1.0 : 0.0;
            term += (ind - cp) * (ind - cp);
        }
        s += weights[x] * term;
    }
    return s / total;
}

double rm_odds_form(const HypercubeModel& q, const std::vector<double>& weights,
                    double total) {
    double s = 0.0;
    for (std::size_t x = 0; x < weights.size(); ++x) {
        if (weights[x] == 0.0) continue;
        double term = 0.0;
        for (std::size_t i = 0; i < q.d(); ++i) {
            const double ratio = q.prob(Config(x)) / q.prob(flip(Config(x), i));
            const double v = 1.0 / (1.0 + ratio);
            term += v * v;
        }
        s += weights[x] * term;
    }
    return s / total;
}

} // namespace

double ratio_matching_objective(const HypercubeModel& q, std::span<const Config> samples) {
    const auto counts = count_table(q.d(), samples);
    const double total = double(samples.size());
    const double prob_form = rm_probability_form(q, counts, total);
    const double odds_form = rm_odds_form(q, counts, total);
    if (std::abs(prob_form - odds_form) > 1e-12 * std::max(1.0, std::abs(prob_form)))
        throw Error("ratio matching: probability and odds forms disagree");
    return prob_form;
}

double ratio_matching_population(const HypercubeModel& q, const HypercubeModel& p) {
    return rm_probability_form(q, p.probs(), 1.0);
}

namespace {

struct GradientEval {
    double value;
    std::vector<double> grad_h;
    std::vector<double> grad_j;
};

// pseudolikelihood value/gradient on compressed counts; exact per-sample
GradientEval pl_eval(const IsingFamily& fam, const std::vector<double>& counts, double total,
                     std::span<const double> h, std::span<const double> coupling) {
    const std::size_t d = fam.d;
    GradientEval g{0.0, std::vector<double>(d, 0.0),
                   std::vector<double>(fam.edges.size(), 0.0)};
    std::vector<double> m(d);
    for (std::size_t x = 0; x < counts.size(); ++x) {
        if (counts[x] == 0.0) continue;
        const double w = counts[x] / total;
        for (std::size_t i = 0; i < d; ++i) m[i] = h[i];
        for (std::size_t e = 0; e < fam.edges.size(); ++e) {
            const auto [a, b] = fam.edges[e];
            m[a] += coupling[e] * spin(Config(x), b);
            m[b] += coupling[e] * spin(Config(x), a);
        }
        for (std::size_t i = 0; i < d; ++i) {
            const double xi = spin(Config(x), i);
            // log q(x_i | rest) = x_i m_i - log(2 cosh m_i)
            g.value += w * (xi * m[i] - std::log(2.0 * std::cosh(m[i])));
            const double resid = xi - std::tanh(m[i]);
            g.grad_h[i] += w * resid;
            for (std::size_t e = 0; e < fam.edges.size(); ++e) {
                const auto [a, b] = fam.edges[e];
                if (a == i) g.grad_j[e] += w * resid * spin(Config(x), b);
                if (b == i) g.grad_j[e] += w * resid * spin(Config(x), a);
            }
        }
    }
    return g;
}

GradientEval rm_eval(const IsingFamily& fam, const std::vector<double>& counts, double total,
                     std::span<const double> h, std::span<const double> coupling) {
    const std::size_t d = fam.d;
    GradientEval g{0.0, std::vector<double>(d, 0.0),
                   std::vector<double>(fam.edges.size(), 0.0)};
    std::vector<double> m(d);
    for (std::size_t x = 0; x < counts.size(); ++x) {
        if (counts[x] == 0.0) continue;
        const double w = counts[x] / total;
        for (std::size_t i = 0; i < d; ++i) m[i] = h[i];
        for (std::size_t e = 0; e < fam.edges.size(); ++e) {
            const auto [a, b] = fam.edges[e];
            m[a] += coupling[e] * spin(Config(x), b);
            m[b] += coupling[e] * spin(Config(x), a);
        }
        for (std::size_t i = 0; i < d; ++i) {
            const double th = std::tanh(m[i]);
            const double q_plus = 0.5 * (1.0 + th);
            const double ind = spin(Config(x), i) > 0 ? 1.0 : 0.0;
            const double resid = ind - q_plus;
            g.value += w * resid * resid;
            const double dq_dm = 0.5 * (1.0 - th * th);
            const double coef = -2.0 * w * resid * dq_dm;
            g.grad_h[i] += coef;
            for (std::size_t e = 0; e < fam.edges.size(); ++e) {
                const auto [a, b] = fam.edges[e];
                if (a == i) g.grad_j[e] += coef * spin(Config(x), b);
                if (b == i) g.grad_j[e] += coef * spin(Config(x), a);
            }
        }
    }
    return g;
}

IsingParams ascend(const IsingFamily& fam, std::span<const Config> samples, bool maximize,
                   bool use_pl) {
    const auto counts = count_table(fam.d, samples);
    const double total = double(samples.size());
    IsingParams p;
    p.h.assign(fam.d, 0.0);
    p.coupling.assign(fam.edges.size(), 0.0);

    auto eval = [&](std::span<const double> h, std::span<const double> j) {
        return use_pl ? pl_eval(fam, counts, total, h, j)
                      : rm_eval(fam, counts, total, h, j);
    };
    const double sign = maximize ? 1.0 : -1.0;
    GradientEval g = eval(p.h, p.coupling);
    double step = 1.0;
    const std::size_t max_iter = 20000;
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        double gnorm = 0.0;
        for (double v : g.grad_h) gnorm += v * v;
        for (double v : g.grad_j) gnorm += v * v;
        gnorm = std::sqrt(gnorm);
        if (gnorm < 1e-7) {
            // separated samples push the parameters off to infinity; the
            // gradient only flattens once the conditionals saturate
            double pmax = 0.0;
            for (double v : p.h) pmax = std::max(pmax, std::abs(v));
            for (double v : p.coupling) pmax = std::max(pmax, std::abs(v));
            if (pmax > 6.0)
                throw NoConvergence("fit ran to the parameter boundary (degenerate data)",
                                    gnorm);
            p.iterations = iter;
            p.converged = true;
            return p;
        }
        bool moved = false;
        for (int halving = 0; halving < 60; ++halving) {
            std::vector<double> h2(p.h), j2(p.coupling);
            for (std::size_t i = 0; i < h2.size(); ++i) h2[i] += sign * step * g.grad_h[i];
            for (std::size_t e = 0; e < j2.size(); ++e) j2[e] += sign * step * g.grad_j[e];
            const GradientEval g2 = eval(h2, j2);
            if (sign * (g2.value - g.value) > 0.25 * step * gnorm * gnorm) {
                p.h = std::move(h2);
                p.coupling = std::move(j2);
                g = g2;
                step *= 1.6;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) throw NoConvergence("discrete fit stalled", gnorm);
    }
    double gnorm = 0.0;
    for (double v : g.grad_h) gnorm += v * v;
    for (double v : g.grad_j) gnorm += v * v;
    throw NoConvergence("discrete fit hit the iteration cap", std::sqrt(gnorm));
}

} // namespace

IsingParams pseudolikelihood_fit(const IsingFamily& family, std::span<const Config> samples) {
    return ascend(family, samples, /*maximize=*/true, /*use_pl=*/true);
}

IsingParams ratio_matching_fit(const IsingFamily& family, std::span<const Config> samples) {
    return ascend(family, samples, /*maximize=*/false, /*use_pl=*/false);
}

namespace {

// Euclidean projection onto the probability simplex.
void project_simplex(std::vector<double>& v) {
    std::vector<double> u(v);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0, tau = 0.0;
    std::size_t k = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        css += u[i];
        const double t = (css - 1.0) / double(i + 1);
        if (u[i] - t > 0.0) {
            tau = t;
            k = i + 1;
        }
    }
    (void)k;
    for (auto& x : v) x = std::max(0.0, x - tau);
}

struct RatioEval {
    double ratio;
    double kl;
    double denom;
};

RatioEval at_ratio(const HypercubeModel& q, const std::vector<double>& p) {
    RatioEval r{0.0, 0.0, 0.0};
    const std::size_t d = q.d();
    r.kl = 0.0;
    for (std::size_t x = 0; x < p.size(); ++x) {
        if (p[x] <= 0.0) continue;
        r.kl += p[x] * (std::log(p[x]) - std::log(q.prob(Config(x))));
    }
    // denom = L_p(p) - L_p(q) = sum_i E_p log (p(x_i|~)/q(x_i|~))
    double denom = 0.0;
    for (std::size_t x = 0; x < p.size(); ++x) {
        if (p[x] <= 0.0) continue;
        for (std::size_t i = 0; i < d; ++i) {
            const double ps = p[x] + p[flip(Config(x), i)];
            const double cp = p[x] / ps;
            const double cqp = q.conditional_plus(i, Config(x));
            const double cq = spin(Config(x), i) > 0 ? cqp : 1.0 - cqp;
            denom += p[x] * (std::log(cp) - std::log(cq));
        }
    }
    r.denom = denom;
    r.ratio = (denom < 1e-14) ? 0.0 : r.kl / denom;
    return r;
}

} // namespace

AtSearchResult at_constant_search(const HypercubeModel& q, std::size_t restarts,
                                  numerics::RngStream& stream) {
    if (q.d() > 8) throw std::invalid_argument("at_constant_search: d <= 8 only");
    const std::size_t n = q.states();
    const std::size_t d = q.d();
    AtSearchResult best;
    best.witness.assign(n, 1.0 / double(n));

    auto run_from = [&](std::vector<double> p) {
        // keep strictly inside the simplex
        for (auto& v : p) v = std::max(v, 1e-12);
        double mass = 0.0;
        for (double v : p) mass += v;
        for (auto& v : p) v /= mass;

        RatioEval cur = at_ratio(q, p);
        double step = 0.1;
        for (int iter = 0; iter < 400; ++iter) {
            if (cur.denom < 1e-14) break;
            // gradient of the ratio
            std::vector<double> grad(n, 0.0);
            for (std::size_t x = 0; x < n; ++x) {
                const double px = std::max(p[x], 1e-300);
                const double gkl = std::log(px) - std::log(q.prob(Config(x))) + 1.0;
                double gden = 0.0;
                for (std::size_t i = 0; i < d; ++i) {
                    const double ps = px + p[flip(Config(x), i)];
                    const double cp = px / std::max(ps, 1e-300);
                    const double cqp = q.conditional_plus(i, Config(x));
                    const double cq = spin(Config(x), i) > 0 ? cqp : 1.0 - cqp;
                    gden += std::log(std::max(cp, 1e-300)) - std::log(std::max(cq, 1e-300));
                }
                grad[x] = (gkl * cur.denom - cur.kl * gden) / (cur.denom * cur.denom);
            }
            bool moved = false;
            for (int halve = 0; halve < 40; ++halve) {
                std::vector<double> cand(n);
                for (std::size_t x = 0; x < n; ++x) cand[x] = p[x] + step * grad[x];
                project_simplex(cand);
                const RatioEval ce = at_ratio(q, cand);
                if (ce.denom >= 1e-14 && ce.ratio > cur.ratio + 1e-15) {
                    p = std::move(cand);
                    cur = ce;
                    step *= 1.5;
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if (!moved) break;
        }
        if (cur.denom >= 1e-14 && cur.ratio > best.c_at_lower) {
            best.c_at_lower = cur.ratio;
            best.witness = p;
        }
    };

    for (std::size_t r = 0; r < restarts; ++r) {
        std::vector<double> init(n);
        if (r == 0) {
            // product table tilted in the first coordinate's marginal
            for (std::size_t x = 0; x < n; ++x)
                init[x] = (spin(Config(x), 0) > 0 ? 0.65 : 0.35) / double(n / 2);
        } else if (r == 1) {
            // q conditioned on the first coordinate (cut-style witness)
            for (std::size_t x = 0; x < n; ++x)
                init[x] = spin(Config(x), 0) > 0 ? q.prob(Config(x)) : 1e-6;
        } else {
            for (auto& v : init) v = -std::log(std::max(stream.uniform01(), 1e-300));
        }
        run_from(std::move(init));
    }
    return best;
}

TensorizationCheck tensorization_check(const HypercubeModel& p, const HypercubeModel& q,
                                       double c_at) {
    if (p.d() != q.d()) throw std::invalid_argument("tensorization_check: d mismatch");
    if (p.d() > 8) throw std::invalid_argument("tensorization_check: d <= 8 only");
    TensorizationCheck t;
    t.kl = kl_tables(p.probs(), q.probs());
    for (std::size_t x = 0; x < p.states(); ++x) {
        if (p.prob(Config(x)) <= 0.0) continue;
        for (std::size_t i = 0; i < p.d(); ++i) {
            const double cp = p.conditional_plus(i, Config(x));
            const double cq = q.conditional_plus(i, Config(x));
            const double pp = spin(Config(x), i) > 0 ? cp : 1.0 - cp;
            const double qq = spin(Config(x), i) > 0 ? cq : 1.0 - cq;
            if (pp > 0.0)
                t.cond_kl_sum += p.prob(Config(x)) * (std::log(pp) - std::log(qq));
        }
    }
    t.pl_gap = pseudolikelihood_population(p, p) - pseudolikelihood_population(q, p);
    t.identity_holds =
        std::abs(t.pl_gap - t.cond_kl_sum) <= 1e-12 * std::max(1.0, std::abs(t.pl_gap));
    t.bound_holds = t.kl <= c_at * t.cond_kl_sum * (1.0 + 1e-12) + 1e-14;
    return t;
}

Tv2Decomposition tv2_decomposition_check(const HypercubeModel& p, const HypercubeModel& q) {
    if (p.d() != q.d()) throw std::invalid_argument("tv2_decomposition_check: d mismatch");
    if (p.d() > 8) throw std::invalid_argument("tv2_decomposition_check: d <= 8 only");
    Tv2Decomposition t;
    const std::size_t d = p.d();
    t.tv2_terms.assign(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        // E over the marginal of X_{~i}: enumerate x with bit i fixed to 0 and
        // weight by the pair mass
        for (std::size_t x = 0; x < p.states(); ++x) {
            if ((x >> i) & 1u) continue;
            const double w = p.prob(Config(x)) + p.prob(flip(Config(x), i));
            if (w <= 0.0) continue;
            const double diff = p.conditional_plus(i, Config(x)) -
                                q.conditional_plus(i, Config(x));
            t.tv2_terms[i] += w * diff * diff;
        }
    }
    t.rm_gap = ratio_matching_population(q, p) - ratio_matching_population(p, p);
    double sum = 0.0;
    for (double v : t.tv2_terms) sum += v;
    t.identity_gap = std::abs(sum - t.rm_gap);
    return t;
}

} // namespace smlab::discrete
