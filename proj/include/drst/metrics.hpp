#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "drst/lstm.hpp"

namespace drst {

// 1 - SS_res / SS_tot; truth must not be constant.
double r2(const std::vector<double>& pred, const std::vector<double>& truth);

double mae(const std::vector<double>& pred, const std::vector<double>& truth);

// Mean absolute percentage error as a fraction. Samples with truth == 0 are
// excluded and counted via `excluded`; all-zero truth raises ZeroTruth.
double mape(const std::vector<double>& pred, const std::vector<double>& truth,
            std::size_t* excluded = nullptr);

// Fraction of samples with |ln(pred) - ln(truth)| <= ln(1 + tol). All values
// must be positive.
double acc5log(const std::vector<double>& pred, const std::vector<double>& truth,
               double tol = 0.05);

// acc5log restricted to horizon step k (1-based) of each forecast, aligned
// against the truth series through the forecasts' base indices.
double acc_at_horizon(const std::vector<ForecastResult>& forecasts,
                      const std::vector<double>& truth, int k, double tol = 0.05);

struct EvalReport {
    double r2 = 0.0;
    double mae = 0.0;
    double mape = 0.0;
    double acc5log = 0.0;
    std::vector<double> acc_at = {};  // per-horizon accuracies, forecasters only
    double latency_ms_per_sample = 0.0;
    std::size_t n = 0;
};

// --- benchmark harness ------------------------------------------------------

struct BenchConfig {
    MlpConfig mlp;
    LstmConfig lstm;
    std::string kpi = "throughput_mbps";
    double select_threshold = 0.5;
    double acc_tol = 0.05;
    // when set, per-sample predictions land here as plot-ready CSVs
    // (preds_<model>_<trace>.csv with index,step,prediction,truth rows)
    std::string dump_dir;
};

struct BenchRow {
    std::string model;       // mlp | lstm | dirrec
    std::string trace;       // seen | unseen:<path>
    EvalReport report;
};

// Trains each requested kind on the 80/20 split of the seen trace, evaluates
// the held-out tail and every unseen trace, and measures per-sample latency.
std::vector<BenchRow> bench(const std::vector<std::string>& kinds,
                            const std::vector<TraceRecord>& seen,
                            const std::vector<std::pair<std::string, std::vector<TraceRecord>>>& unseen,
                            const BenchConfig& config);

std::string bench_csv(const std::vector<BenchRow>& rows, int horizon);

}  // namespace drst
