#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "smlab/numerics/rng.hpp"

namespace smlab::discrete {

// Spin configuration as a bitmask: bit b in {0,1} maps to spin 2b-1,
// little-endian in coordinate order (fixed for file-format stability).
using Config = std::uint32_t;

inline int spin(Config x, std::size_t i) { return ((x >> i) & 1u) ? +1 : -1; }
inline Config flip(Config x, std::size_t i) { return x ^ (Config(1) << i); }

// Explicit probability table on {+-1}^d, d <= 12. log_weights may contain
// -inf (zero-probability states); everything else is finite.
class HypercubeModel {
public:
    HypercubeModel(std::size_t d, std::vector<double> log_weights);

    std::size_t d() const { return d_; }
    std::size_t states() const { return std::size_t(1) << d_; }
    double log_z() const { return log_z_; }
    double prob(Config x) const { return prob_[x]; }
    const std::vector<double>& probs() const { return prob_; }
    const std::vector<double>& log_weights() const { return log_w_; }

    // P(X_i = +1 | X_{~i} = x_{~i}); the i-th bit of x is ignored.
    double conditional_plus(std::size_t i, Config x) const;

    Config sample_one(numerics::RngStream& stream) const;
    std::vector<Config> sample(numerics::RngStream& stream, std::size_t n) const;

    // One Glauber update: uniformly random coordinate resampled from its
    // conditional law.
    Config glauber_step(Config x, numerics::RngStream& stream) const;

    std::string to_json() const;                       // raw {d, log_weights}
    static HypercubeModel from_json(const std::string& text);

private:
    std::size_t d_;
    std::vector<double> log_w_;
    double log_z_;
    std::vector<double> prob_;
    std::vector<double> cum_;
};

// Ising family on a fixed edge set: log_weights[x] = sum h_i x_i + sum J_e x_i x_j.
struct IsingFamily {
    std::size_t d = 0;
    std::vector<std::pair<std::size_t, std::size_t>> edges;   // i < j

    HypercubeModel model(std::span<const double> h, std::span<const double> coupling) const;
    std::string to_json(std::span<const double> h, std::span<const double> coupling) const;
    static std::pair<IsingFamily, std::vector<std::vector<double>>> from_json(
        const std::string& text);   // returns family and {h, J}
};

struct IsingParams {
    std::vector<double> h;
    std::vector<double> coupling;
    std::size_t iterations = 0;
    bool converged = false;
};

// Empirical pseudolikelihood sum_i E_hat log q(x_i | x_{~i}).
// Throws ZeroConditional when q gives an observed conditional probability 0.
double pseudolikelihood_objective(const HypercubeModel& q, std::span<const Config> samples);
// Population version under an explicit p table.
double pseudolikelihood_population(const HypercubeModel& q, const HypercubeModel& p);

// Empirical ratio matching sum_i E_hat |1(x_i=+1) - q(X_i=+1|x_{~i})|^2,
// cross-checked on every call against the flip-odds form
// sum_i E_hat (1/(1 + q(x)/q(x_flip_i)))^2.
double ratio_matching_objective(const HypercubeModel& q, std::span<const Config> samples);
double ratio_matching_population(const HypercubeModel& q, const HypercubeModel& p);

// Gradient ascent (descent for ratio matching) with Armijo backtracking on the
// compressed sample counts; converged at gradient norm < 1e-7, NoConvergence
// otherwise.
IsingParams pseudolikelihood_fit(const IsingFamily& family, std::span<const Config> samples);
IsingParams ratio_matching_fit(const IsingFamily& family, std::span<const Config> samples);

// Projected gradient ascent over witness tables p of the ratio
// KL(p,q) / sum_i E_p KL(p(X_i|X_~i), q(X_i|X_~i)): a certified lower bound
// on the approximate-tensorization constant of q. restart 0 starts from a
// tilted product table and restart 1 from a majority-conditioned table;
// further restarts are random. Consumes the stream restart by restart, so a
// larger restart budget extends (never rewinds) a smaller one.
struct AtSearchResult {
    double c_at_lower = 0.0;
    std::vector<double> witness;
};
AtSearchResult at_constant_search(const HypercubeModel& q, std::size_t restarts,
                                  numerics::RngStream& stream);

// Exact enumeration (d <= 8): KL(p,q), the conditional-KL sum, and the
// pseudolikelihood gap L_p(p) - L_p(q), which the tensorization proof equates
// with the conditional-KL sum.
struct TensorizationCheck {
    double kl = 0.0;
    double cond_kl_sum = 0.0;
    double pl_gap = 0.0;
    bool identity_holds = false;    // |pl_gap - cond_kl_sum| <= 1e-12 scale
    bool bound_holds = false;       // kl <= c_at * cond_kl_sum
};
TensorizationCheck tensorization_check(const HypercubeModel& p, const HypercubeModel& q,
                                       double c_at);

// Exact enumeration of the TV^2 strengthened-tensorization decomposition:
// sum_i E_p TV^2(p(X_i|X_~i), q(X_i|X_~i)) = M_p(q) - M_p(p), per coordinate.
struct Tv2Decomposition {
    std::vector<double> tv2_terms;   // per coordinate
    double rm_gap = 0.0;             // M_p(q) - M_p(p)
    double identity_gap = 0.0;       // |sum tv2 - rm_gap|
};
Tv2Decomposition tv2_decomposition_check(const HypercubeModel& p, const HypercubeModel& q);

} // namespace smlab::discrete
