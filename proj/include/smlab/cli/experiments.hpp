#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "smlab/cli/rows.hpp"
#include "smlab/cli/svg.hpp"

namespace smlab::cli {

// Experiment configuration. Numeric knobs live in `params` (scalar keys hold
// one value, list keys several). Unknown experiment names and unknown keys
// are rejected; defaults reproduce the acceptance-criteria runs exactly.
struct ExperimentConfig {
    std::string experiment;
    std::uint64_t master_seed = 42;
    std::size_t seeds = 20;
    std::size_t n_samples = 100'000;
    std::string output_dir = "out";
    std::map<std::string, std::vector<double>> params;

    static ExperimentConfig from_json(const std::string& text);
    std::string to_json() const;   // fully resolved, keys sorted
    void validate() const;         // unknown keys / bad values rejected
};

const std::vector<std::string>& experiment_names();

// Pure function of (config, master seed); a failed replicate contributes an
// error-tagged row (metric "failed") instead of aborting the sweep.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

// Default plots for an experiment's rows (CSV stays the contract; plots are
// a courtesy).
std::vector<PlotSpec> default_plots(const std::string& experiment);

// Runs the experiment, writes <out>/<experiment>.csv and the default SVGs;
// returns the written file paths in order.
std::vector<std::string> run_and_emit(const ExperimentConfig& cfg);

// Replicate loop helper used by the runners: calls fn(seed_index) for
// 0..count-1, possibly in parallel (SMLAB_THREADS caps the worker count).
void parallel_replicates(std::size_t count, const std::function<void(std::size_t)>& fn);

} // namespace smlab::cli
