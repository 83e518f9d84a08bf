#pragma once

#include <string>

#include <CLI11.hpp>

#include "drst/drift.hpp"
#include "drst/lstm.hpp"
#include "drst/nn.hpp"

namespace drst {

// Everything the serving loop can be configured with, in one document.
// Defaults here are the pipeline defaults; a config file overrides them and
// command-line flags override the file.
struct RunConfig {
    DriftConfig drift;
    std::string kpi = "throughput_mbps";
    double select_threshold = 0.5;
    int max_features = 0;
    int forecast_every_s = 30;
    NormMethod norm_method = NormMethod::minmax;
    MlpConfig mlp;
    LstmConfig lstm;
    int check_every_samples = 0;

    MlpGrid retrain_grid() const {
        MlpGrid grid;
        grid.base = mlp;
        return grid;
    }

    // keeps the documented cut spacing (delta, 2*delta, 4*delta) when delta
    // was overridden without explicit cuts, then validates
    void finalize();
};

// Registers every RunConfig field as a flag (and therefore as a config-file
// key with the same name).
void register_run_options(CLI::App& app, RunConfig& cfg);

// Attaches --config with strict key=value syntax checking (CLI11's reader is
// lenient on its own).
CLI::Option* add_config_option(CLI::App& app);

// Defaults, then file overrides. Unknown keys are rejected; parse problems
// surface as ParseError with the offending line.
RunConfig load_config(const std::string& path);

}  // namespace drst
