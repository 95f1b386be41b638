#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "smlab/expfam/model.hpp"
#include "smlab/numerics/grid.hpp"
#include "smlab/numerics/rng.hpp"

namespace smlab::neuralscore {

// One-hidden-layer tanh score model s(x) = skip*x + sum_j a_j tanh(b_j x + c_j).
struct ScoreNet1D {
    std::size_t width = 0;
    std::vector<double> a;   // output weights
    std::vector<double> b;   // input weights
    std::vector<double> c;   // biases
    double skip = 0.0;

    double eval(double x) const;
    double deriv(double x) const;
    std::size_t n_params() const { return 3 * width + 1; }

    std::string to_json() const;
    static ScoreNet1D from_json(const std::string& text);
};

// b, c ~ U[-1,1]*2 (units that saturate inside an inter-mode gap), a ~
// U[-1,1]*4/sqrt(width) (random initial gap profile), skip = -0.1.
ScoreNet1D init_net(std::size_t width, numerics::RngStream& stream);

struct TrainConfig {
    std::size_t width = 256;
    std::size_t steps = 30000;
    std::size_t batch = 64;
    double step_size = 1e-3;
    std::uint64_t seed = 0;
};

// Empirical score matching loss (1/B) sum [s'(x_i) + s(x_i)^2/2] and its exact
// parameter gradient, laid out as (a..., b..., c..., skip).
struct LossGrad {
    double loss = 0.0;
    std::vector<double> grad;
};
LossGrad sm_loss_and_grad(const ScoreNet1D& net, std::span<const double> batch);

// Plain constant-step SGD on fresh batches from the target sampler.
// Throws DivergedLoss past 1e6. tail_slope is the least-squares slope of the
// batch losses over the final 10% of steps (nonpositive up to batch noise
// when training is stable).
struct TrainResult {
    ScoreNet1D net;
    double final_loss = 0.0;
    double tail_slope = 0.0;
};
TrainResult train(const expfam::ExpFamilyModel& target, const TrainConfig& cfg);

// Density from a score field: log density as the cumulative integral of s
// from the grid midpoint, exponentiated and normalized on the grid.
std::vector<double> reconstruct_density(const ScoreNet1D& net, const numerics::Grid1D& grid);

// 0.5 * integral |a - b| over the grid (trapezoid).
double total_variation(const numerics::Grid1D& grid, std::span<const double> a,
                       std::span<const double> b);

// log of (mass on x > 0) / (mass on x < 0) for a density table.
double mode_weight_log_ratio(const numerics::Grid1D& grid, std::span<const double> density);

// sup over [center-1, center+1] of |target score - net score|.
double mode_score_sup_error(const ScoreNet1D& net, const expfam::ExpFamilyModel& target,
                            double center);

// "x,density" CSV of the reconstruction on the grid.
std::string reconstruction_csv(const ScoreNet1D& net, const numerics::Grid1D& grid);

} // namespace smlab::neuralscore
