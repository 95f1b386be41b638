#include "smlab/neuralscore/scorenet.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "smlab/errors.hpp"

namespace smlab::neuralscore {

using json = nlohmann::json;

double ScoreNet1D::eval(double x) const {
    double s = skip * x;
    for (std::size_t j = 0; j < width; ++j) s += a[j] * std::tanh(b[j] * x + c[j]);
    return s;
}

double ScoreNet1D::deriv(double x) const {
    double s = skip;
    for (std::size_t j = 0; j < width; ++j) {
        const double t = std::tanh(b[j] * x + c[j]);
        s += a[j] * b[j] * (1.0 - t * t);
    }
    return s;
}

std::string ScoreNet1D::to_json() const {
    json j;
    j["width"] = width;
    j["a"] = a;
    j["b"] = b;
    j["c"] = c;
    j["skip"] = skip;
    return j.dump();
}

ScoreNet1D ScoreNet1D::from_json(const std::string& text) {
    const json j = json::parse(text);
    ScoreNet1D n;
    n.width = j.at("width").get<std::size_t>();
    n.a = j.at("a").get<std::vector<double>>();
    n.b = j.at("b").get<std::vector<double>>();
    n.c = j.at("c").get<std::vector<double>>();
    n.skip = j.at("skip").get<double>();
    if (n.a.size() != n.width || n.b.size() != n.width || n.c.size() != n.width)
        throw std::invalid_argument("ScoreNet1D: inconsistent parameter sizes");
    return n;
}

ScoreNet1D init_net(std::size_t width, numerics::RngStream& stream) {
    ScoreNet1D n;
    n.width = width;
    n.a.resize(width);
    n.b.resize(width);
    n.c.resize(width);
    const double a_scale = 4.0 / std::sqrt(double(width));
    for (std::size_t j = 0; j < width; ++j) n.b[j] = (2.0 * stream.uniform01() - 1.0) * 2.0;
    for (std::size_t j = 0; j < width; ++j) n.c[j] = (2.0 * stream.uniform01() - 1.0) * 2.0;
    for (std::size_t j = 0; j < width; ++j) n.a[j] = (2.0 * stream.uniform01() - 1.0) * a_scale;
    n.skip = -0.1;
    return n;
}

LossGrad sm_loss_and_grad(const ScoreNet1D& net, std::span<const double> batch) {
    if (batch.empty()) throw std::invalid_argument("sm_loss_and_grad: empty batch");
    const std::size_t w = net.width;
    LossGrad out;
    out.grad.assign(net.n_params(), 0.0);
    double* ga = out.grad.data();
    double* gb = ga + w;
    double* gc = gb + w;
    double& gskip = out.grad[3 * w];

    for (double x : batch) {
        double s = net.skip * x;
        double sp = net.skip;
        // first pass: activations feed s and s'
        for (std::size_t j = 0; j < w; ++j) {
            const double t = std::tanh(net.b[j] * x + net.c[j]);
            const double u = 1.0 - t * t;
            s += net.a[j] * t;
            sp += net.a[j] * net.b[j] * u;
        }
        out.loss += sp + 0.5 * s * s;
        for (std::size_t j = 0; j < w; ++j) {
            const double t = std::tanh(net.b[j] * x + net.c[j]);
            const double u = 1.0 - t * t;
            ga[j] += net.b[j] * u + s * t;
            gb[j] += net.a[j] * u * (1.0 - 2.0 * t * net.b[j] * x) + s * net.a[j] * u * x;
            gc[j] += -2.0 * net.a[j] * net.b[j] * t * u + s * net.a[j] * u;
        }
        gskip += 1.0 + s * x;
    }
    const double inv = 1.0 / double(batch.size());
    out.loss *= inv;
    for (double& g : out.grad) g *= inv;
    return out;
}

TrainResult train(const expfam::ExpFamilyModel& target, const TrainConfig& cfg) {
    numerics::RngStream init_stream(cfg.seed, 0);
    numerics::RngStream data_stream(cfg.seed, 1);
    TrainResult r;
    r.net = init_net(cfg.width, init_stream);

    const std::size_t tail_start = cfg.steps - cfg.steps / 10;
    std::vector<double> tail_losses;
    tail_losses.reserve(cfg.steps / 10 + 1);

    for (std::size_t step = 0; step < cfg.steps; ++step) {
        const auto batch = target.sample(data_stream, cfg.batch);
        const auto lg = sm_loss_and_grad(r.net, batch);
        if (!(lg.loss < 1e6)) throw DivergedLoss(lg.loss);
        const std::size_t w = cfg.width;
        for (std::size_t j = 0; j < w; ++j) {
            r.net.a[j] -= cfg.step_size * lg.grad[j];
            r.net.b[j] -= cfg.step_size * lg.grad[w + j];
            r.net.c[j] -= cfg.step_size * lg.grad[2 * w + j];
        }
        r.net.skip -= cfg.step_size * lg.grad[3 * w];
        r.final_loss = lg.loss;
        if (step >= tail_start) tail_losses.push_back(lg.loss);
    }

    // least-squares slope of the tail losses
    const double n = double(tail_losses.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < tail_losses.size(); ++i) {
        sx += double(i);
        sy += tail_losses[i];
        sxx += double(i) * double(i);
        sxy += double(i) * tail_losses[i];
    }
    r.tail_slope = (n > 1.5) ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : 0.0;
    return r;
}

std::vector<double> reconstruct_density(const ScoreNet1D& net, const numerics::Grid1D& grid) {
    const std::size_t n = grid.n;
    const double h = grid.spacing();
    std::vector<double> s(n), logd(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) s[i] = net.eval(grid.nodes[i]);
    for (std::size_t i = 1; i < n; ++i) logd[i] = logd[i - 1] + 0.5 * h * (s[i - 1] + s[i]);
    // anchor at the midpoint, then normalize
    const double mid = logd[n / 2];
    double lmax = -1e300;
    for (std::size_t i = 0; i < n; ++i) {
        logd[i] -= mid;
        lmax = std::max(lmax, logd[i]);
    }
    std::vector<double> dens(n);
    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        dens[i] = std::exp(logd[i] - lmax);
        mass += dens[i] * ((i == 0 || i == n - 1) ? 0.5 * h : h);
    }
    for (double& v : dens) v /= mass;
    return dens;
}

double total_variation(const numerics::Grid1D& grid, std::span<const double> a,
                       std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < grid.n; ++i)
        s += 0.25 * grid.spacing() *
             (std::abs(a[i] - b[i]) + std::abs(a[i + 1] - b[i + 1]));
    return s;
}

double mode_weight_log_ratio(const numerics::Grid1D& grid, std::span<const double> density) {
    double pos = 0.0, neg = 0.0;
    for (std::size_t i = 0; i + 1 < grid.n; ++i) {
        const double cell = 0.5 * grid.spacing() * (density[i] + density[i + 1]);
        const double mid = 0.5 * (grid.nodes[i] + grid.nodes[i + 1]);
        (mid > 0.0 ? pos : neg) += cell;
    }
    return std::log(pos) - std::log(neg);
}

double mode_score_sup_error(const ScoreNet1D& net, const expfam::ExpFamilyModel& target,
                            double center) {
    double sup = 0.0;
    const int steps = 400;
    for (int k = 0; k <= steps; ++k) {
        const double x = center - 1.0 + 2.0 * double(k) / double(steps);
        sup = std::max(sup, std::abs(target.score(x) - net.eval(x)));
    }
    return sup;
}

std::string reconstruction_csv(const ScoreNet1D& net, const numerics::Grid1D& grid) {
    const auto dens = reconstruct_density(net, grid);
    std::string out = "x,density\n";
    char buf[64];
    for (std::size_t i = 0; i < grid.n; ++i) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", grid.nodes[i], dens[i]);
        out += buf;
    }
    return out;
}

} // namespace smlab::neuralscore
