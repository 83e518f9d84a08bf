#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "drst/lstm.hpp"
#include "drst/nn.hpp"
#include "drst/registry.hpp"
#include "drst/trace.hpp"

namespace drst {

enum class Severity { none, s1, s2, sk };

const char* severity_name(Severity s);

struct DriftConfig {
    int window_size = 100;  // M
    int bins = 32;
    double delta = 0.05;
    std::vector<double> severity_cuts = {0.05, 0.10, 0.20};  // ascending, first == delta
    int check_every_s = 10;

    void validate() const;
};

struct DriftState {
    std::vector<FeatureVector> reference;  // W_ref
    std::vector<FeatureVector> current;    // W_curr snapshot at last check
    double last_score = 0.0;
    Severity severity = Severity::none;
};

// Mean over features of the per-feature Jensen-Shannon divergence (base-2
// logs, value in [0,1]). Histograms are equal-width over the union range of
// both windows, eps-padded against zero width and smoothed by 1e-9 per bin so
// every KL term stays finite.
double js_divergence(const std::vector<FeatureVector>& p_window,
                     const std::vector<FeatureVector>& q_window, int bins);

// None below delta, otherwise the tier of the highest cut <= score. Cut
// index 0 is S1, index 1 is S2, the top of the ladder is SK.
Severity classify_severity(double score, const DriftConfig& config);

GridBudget budget_for(Severity severity);

struct UpdateDecision {
    Severity severity = Severity::none;
    std::string tier;                // grid budget name
    std::vector<std::string> axes;   // lattice axes that were varied
    std::int64_t triggered_at_ms = 0;
    std::uint64_t version = 0;       // resulting model version when status == "ok"
    std::string status;              // ok | failed
    double validation_loss = 0.0;
};

struct DispatchOptions {
    std::string kpi = "throughput_mbps";
    MlpGrid grid;
    std::size_t min_retrain = 0;  // 0: use drift window size M
    std::int64_t triggered_at_ms = 0;
    std::optional<std::uint64_t> parent_version;
};

// Severity-tiered retrain: refits the schema over the retrain records (the
// model keeps the parent's feature names), runs the tier's grid search, and
// publishes the winner. The old model keeps serving until the publish
// completes; if every candidate fails nothing is published and the decision
// reports "failed".
UpdateDecision dispatch_update(Severity severity, const std::vector<TraceRecord>& recent,
                               const std::vector<std::string>& feature_names, Registry& registry,
                               const DriftConfig& drift, const DispatchOptions& options);

// --- orchestration loop ------------------------------------------------------

struct LoopConfig {
    DriftConfig drift;
    std::string kpi = "throughput_mbps";
    MlpGrid grid;

    // replay-fast mode: drift checks every M samples (or check_every_samples
    // when set) instead of the wall clock, retraining runs inline, and event
    // timestamps come from the trace, so runs are bit-reproducible
    bool replay_fast = true;
    int check_every_samples = 0;  // 0: drift.window_size

    int forecast_every_s = 30;
    bool forecast_enabled = false;
};

struct Event {
    std::int64_t ts = 0;
    std::string kind;  // prediction | forecast | drift | update | error | summary
    std::string payload_json;
};

using EventSink = std::function<void(const Event&)>;

struct LoopCounters {
    std::atomic<std::uint64_t> samples_in{0};
    std::atomic<std::uint64_t> predictions_out{0};
    std::atomic<std::uint64_t> forecasts_out{0};
    std::atomic<std::uint64_t> drift_checks{0};
    std::atomic<std::uint64_t> updates{0};
    std::atomic<std::uint64_t> errors{0};
    std::atomic<std::uint64_t> model_version{0};
};

struct LoopSummary {
    std::uint64_t samples_in = 0;
    std::uint64_t predictions_out = 0;
    std::uint64_t forecasts_out = 0;
    std::uint64_t drift_checks = 0;
    std::uint64_t updates = 0;
    std::uint64_t errors = 0;
    std::uint64_t final_model_version = 0;
};

// Online inference plus drift-triggered update loop. Pulls records from
// `next` until it returns nullopt or `stop` becomes true; per-sample errors
// are logged as events and the loop continues.
class Orchestrator {
public:
    Orchestrator(Registry& registry, LoopConfig config, EventSink sink);

    LoopSummary run(const std::function<std::optional<TraceRecord>()>& next,
                    const std::atomic<bool>* stop = nullptr);

    const LoopCounters& counters() const { return counters_; }

private:
    Registry& registry_;
    LoopConfig config_;
    EventSink sink_;
    LoopCounters counters_;
};

}  // namespace drst
