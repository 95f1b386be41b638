#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>

#include "smlab/cli/experiments.hpp"
#include "smlab/cli/rows.hpp"
#include "smlab/cli/svg.hpp"
#include "smlab/errors.hpp"

using namespace smlab;
using namespace smlab::cli;

namespace {

std::size_t count_substr(const std::string& hay, const std::string& needle) {
    std::size_t count = 0, pos = 0;
    while ((pos = hay.find(needle, pos)) != std::string::npos) {
        ++count;
        pos += needle.size();
    }
    return count;
}

} // namespace

TEST_CASE("config: json round trip, overrides, unknown keys rejected") {
    auto cfg = ExperimentConfig::from_json(
        R"({"experiment":"bimodal_cut","seeds":4,"n":2000,"master_seed":7,
            "params":{"offsets":[1,3]}})");
    CHECK(cfg.experiment == "bimodal_cut");
    CHECK(cfg.seeds == 4);
    CHECK(cfg.n_samples == 2000);
    CHECK(cfg.master_seed == 7);
    CHECK(cfg.params.at("offsets") == std::vector<double>{1.0, 3.0});

    // resolved echo is parseable and stable
    auto cfg2 = ExperimentConfig::from_json(cfg.to_json());
    CHECK(cfg2.to_json() == cfg.to_json());

    CHECK_THROWS_AS(ExperimentConfig::from_json(R"({"experiment":"bimodal_cut","typo":1})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(ExperimentConfig::from_json(
                        R"({"experiment":"bimodal_cut","params":{"omega":[1]}})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(ExperimentConfig::from_json(R"({"experiment":"nope"})"),
                    std::invalid_argument);
}

TEST_CASE("csv: canonical order, formatting, empty refusal") {
    std::vector<ResultRow> rows = {
        {"e", 1, 2.0, "sm", "x", 1.0},
        {"e", 0, 2.0, "mle", "x", 2.0},
        {"e", 0, 1.0, "sm", "x", 0.125},
    };
    const std::string csv = csv_string(rows);
    CHECK(csv == "experiment,seed,param,method,metric,value\n"
                 "e,0,1,sm,x,0.125\n"
                 "e,0,2,mle,x,2\n"
                 "e,1,2,sm,x,1\n");
    CHECK_THROWS_AS(emit_csv({}, "/tmp/never.csv"), IoError);
}

TEST_CASE("small cut sweep: determinism, row shape, partial-failure isolation") {
    ExperimentConfig cfg;
    cfg.experiment = "bimodal_cut";
    cfg.seeds = 3;
    cfg.n_samples = 2000;
    cfg.params["offsets"] = {1, 6};
    const auto rows1 = run_experiment(cfg);
    const auto rows2 = run_experiment(cfg);
    CHECK(csv_string(rows1) == csv_string(rows2));

    // every replicate row is either a measurement or an error tag
    std::size_t n_sm = 0;
    for (const auto& r : rows1)
        if (r.method == "sm" && (r.metric == "log10_param_error" || r.metric == "failed"))
            ++n_sm;
    CHECK(n_sm == 6);   // 2 offsets x 3 seeds

    // asymptotic rows present per offset
    std::size_t n_ratio = 0;
    for (const auto& r : rows1)
        if (r.metric == "worst_ratio") ++n_ratio;
    CHECK(n_ratio == 2);
}

TEST_CASE("svg: two series with one point per offset, byte stability") {
    ExperimentConfig cfg;
    cfg.experiment = "bimodal_cut";
    cfg.seeds = 2;
    cfg.n_samples = 2000;
    cfg.params["offsets"] = {1, 3, 5};
    const auto rows = run_experiment(cfg);
    const auto spec = default_plots("bimodal_cut").at(0);
    const std::string svg = svg_string(rows, spec);
    CHECK(count_substr(svg, "<polyline") == 2);                  // sm + mle
    CHECK(count_substr(svg, "<circle") == 6);                    // 2 series x 3 offsets
    CHECK(svg == svg_string(rows, spec));
    CHECK(svg.find("<svg xmlns") == 0);
}

TEST_CASE("a failing replicate yields an error row, not an aborted sweep") {
    ExperimentConfig cfg;
    cfg.experiment = "bimodal_cut";
    cfg.seeds = 1;
    cfg.n_samples = 1;   // fewer samples than statistics: unidentifiable
    cfg.params["offsets"] = {2};
    const auto rows = run_experiment(cfg);
    bool sm_failed = false, have_ratio = false;
    for (const auto& r : rows) {
        if (r.method == "sm" && r.metric == "failed") sm_failed = true;
        if (r.metric == "worst_ratio") have_ratio = true;
    }
    CHECK(sm_failed);
    CHECK(have_ratio);
}

TEST_CASE("error-covariance direction aligns with the statistic difference") {
    ExperimentConfig cfg;
    cfg.experiment = "bimodal_cut";
    cfg.seeds = 20;
    cfg.n_samples = 20'000;
    cfg.params["offsets"] = {6};
    const auto rows = run_experiment(cfg);
    double angle = -1.0;
    for (const auto& r : rows)
        if (r.metric == "err_dir_angle_deg") angle = r.value;
    CHECK(angle >= 0.0);
    CHECK(angle < 15.0);
}

TEST_CASE("oscillating rows carry the asymptotic sweep") {
    ExperimentConfig cfg;
    cfg.experiment = "oscillating";
    cfg.seeds = 2;
    cfg.n_samples = 2000;
    cfg.params["omegas"] = {2, 32};
    const auto rows = run_experiment(cfg);
    double g2 = 0, g32 = 0, m2 = 0, m32 = 0;
    for (const auto& r : rows) {
        if (r.metric == "gamma_sm_op" && r.param == 2.0) g2 = r.value;
        if (r.metric == "gamma_sm_op" && r.param == 32.0) g32 = r.value;
        if (r.metric == "gamma_mle_op" && r.param == 2.0) m2 = r.value;
        if (r.metric == "gamma_mle_op" && r.param == 32.0) m32 = r.value;
    }
    // oracle values: 4.8344 and 459.11 (ratio 94.97); MLE stays put
    CHECK(g2 == doctest::Approx(4.83436).epsilon(1e-3));
    CHECK(g32 == doctest::Approx(459.106).epsilon(1e-3));
    CHECK(m2 == doctest::Approx(2.82258).epsilon(1e-3));
    CHECK(m32 == doctest::Approx(2.82210).epsilon(1e-3));
}

TEST_CASE("rademacher and kl-equivalence runners emit their contract rows") {
    ExperimentConfig cfg;
    cfg.experiment = "rademacher_gaussian";
    const auto rows = run_experiment(cfg);
    double bound0 = 0, kl0 = 1e9;
    for (const auto& r : rows) {
        if (r.param == 0.0 && r.metric == "bound") bound0 = r.value;
        if (r.param == 0.0 && r.metric == "empirical_kl") kl0 = r.value;
    }
    CHECK(bound0 == doctest::Approx(std::sqrt(0.02)).epsilon(1e-12));
    CHECK(kl0 <= bound0);

    ExperimentConfig cfg2;
    cfg2.experiment = "kl_equivalence";
    const auto rows2 = run_experiment(cfg2);
    int agree = 0;
    for (const auto& r : rows2)
        if (r.metric == "agree" && r.value == 1.0) ++agree;
    CHECK(agree == 2);
}
