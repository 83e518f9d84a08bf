#include "drst/drift.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <future>

#include <json.hpp>

#include "drst/metrics.hpp"
#include "drst/pipeline.hpp"
#include "drst/sha256.hpp"

namespace drst {

using nlohmann::json;

const char* severity_name(Severity s) {
    switch (s) {
        case Severity::none: return "None";
        case Severity::s1: return "S1";
        case Severity::s2: return "S2";
        case Severity::sk: return "SK";
    }
    return "?";
}

void DriftConfig::validate() const {
    if (window_size < 10) fail(Errc::invalid_spec, "window_size must be >= 10");
    if (bins < 2) fail(Errc::invalid_spec, "bins must be >= 2");
    if (delta <= 0.0 || delta >= 1.0) fail(Errc::invalid_spec, "delta must be in (0,1)");
    if (severity_cuts.empty()) fail(Errc::invalid_spec, "severity_cuts must be non-empty");
    if (severity_cuts.front() != delta)
        fail(Errc::invalid_spec, "first severity cut must equal delta");
    for (std::size_t i = 1; i < severity_cuts.size(); ++i)
        if (severity_cuts[i] <= severity_cuts[i - 1])
            fail(Errc::invalid_spec, "severity_cuts must be strictly ascending");
    if (check_every_s < 1) fail(Errc::invalid_spec, "check_every_s must be >= 1");
}

double js_divergence(const std::vector<FeatureVector>& p_window,
                     const std::vector<FeatureVector>& q_window, int bins) {
    if (p_window.empty() || q_window.empty()) fail(Errc::window_not_full, "window is empty");
    if (p_window.size() != q_window.size())
        fail(Errc::window_not_full, "windows must hold the same sample count");
    const std::size_t arity = p_window.front().values.size();
    for (const auto& v : p_window)
        if (v.values.size() != arity) fail(Errc::arity_mismatch, "window arity inconsistent");
    for (const auto& v : q_window)
        if (v.values.size() != arity) fail(Errc::arity_mismatch, "window arity inconsistent");
    if (bins < 2) fail(Errc::invalid_spec, "bins must be >= 2");

    const double smoothing = 1e-9;
    double total = 0.0;
    std::vector<double> p_hist(bins), q_hist(bins);
    for (std::size_t j = 0; j < arity; ++j) {
        double lo = p_window.front().values[j];
        double hi = lo;
        for (const auto& v : p_window) {
            lo = std::min(lo, v.values[j]);
            hi = std::max(hi, v.values[j]);
        }
        for (const auto& v : q_window) {
            lo = std::min(lo, v.values[j]);
            hi = std::max(hi, v.values[j]);
        }
        if (hi - lo < 1e-12) {  // eps padding keeps the bin width positive
            lo -= 0.5e-12;
            hi += 0.5e-12;
        }

        std::fill(p_hist.begin(), p_hist.end(), smoothing);
        std::fill(q_hist.begin(), q_hist.end(), smoothing);
        const double width = (hi - lo) / bins;
        auto bin_of = [&](double v) {
            const int b = static_cast<int>((v - lo) / width);
            return std::clamp(b, 0, bins - 1);
        };
        for (const auto& v : p_window) p_hist[bin_of(v.values[j])] += 1.0;
        for (const auto& v : q_window) q_hist[bin_of(v.values[j])] += 1.0;

        double p_sum = 0.0, q_sum = 0.0;
        for (int b = 0; b < bins; ++b) {
            p_sum += p_hist[b];
            q_sum += q_hist[b];
        }

        double kl_p = 0.0, kl_q = 0.0;
        for (int b = 0; b < bins; ++b) {
            const double p = p_hist[b] / p_sum;
            const double q = q_hist[b] / q_sum;
            const double m = 0.5 * (p + q);
            kl_p += p * std::log2(p / m);
            kl_q += q * std::log2(q / m);
        }
        total += 0.5 * kl_p + 0.5 * kl_q;
    }
    return std::clamp(total / static_cast<double>(arity), 0.0, 1.0);
}

Severity classify_severity(double score, const DriftConfig& config) {
    if (score < config.delta) return Severity::none;
    std::size_t tier = 0;
    for (std::size_t i = 0; i < config.severity_cuts.size(); ++i)
        if (score >= config.severity_cuts[i]) tier = i;
    if (tier == 0) return Severity::s1;
    if (tier == 1) return Severity::s2;
    return Severity::sk;
}

GridBudget budget_for(Severity severity) {
    switch (severity) {
        case Severity::s1: return GridBudget::s1_light;
        case Severity::s2: return GridBudget::s2_moderate;
        case Severity::sk: return GridBudget::sk_full;
        case Severity::none: break;
    }
    fail(Errc::invalid_spec, "no budget for severity None");
}

UpdateDecision dispatch_update(Severity severity, const std::vector<TraceRecord>& recent,
                               const std::vector<std::string>& feature_names, Registry& registry,
                               const DriftConfig& drift, const DispatchOptions& options) {
    if (severity == Severity::none)
        fail(Errc::invalid_spec, "dispatch_update requires severity != None");
    const std::size_t min_retrain =
        options.min_retrain > 0 ? options.min_retrain
                                : static_cast<std::size_t>(drift.window_size);
    if (recent.size() < min_retrain)
        fail(Errc::insufficient_data, "retrain buffer below minimum (" +
                                          std::to_string(recent.size()) + " < " +
                                          std::to_string(min_retrain) + ")");

    const GridBudget budget = budget_for(severity);
    UpdateDecision decision;
    decision.severity = severity;
    decision.tier = grid_budget_name(budget);
    decision.axes = grid_axes(budget);
    decision.triggered_at_ms = options.triggered_at_ms;

    // refit normalization on the retrain records; the feature set itself is
    // inherited from the serving model for schema stability
    FeatureSchema schema = fit_schema_subset(recent, feature_names, NormMethod::minmax);
    Dataset data = normalized_dataset(recent, schema, options.kpi);
    if (data.size() < min_retrain)
        fail(Errc::insufficient_data, "not enough labeled samples in the retrain buffer");

    try {
        GridResult result = grid_search(data, options.grid, budget, schema.hash());
        result.best_model.schema = schema;
        result.best_model.input_schema_hash = schema.hash();

        PublishMeta meta;
        meta.kind = ModelKind::mlp;
        meta.schema_hash = schema.hash();
        meta.config_digest = sha256_hex(mlp_to_json(result.best_model));
        meta.final_loss = result.best_report.final_loss;
        meta.parent_version = options.parent_version;
        const std::size_t n_train = std::max<std::size_t>(1, data.size() * 4 / 5);
        if (data.size() - n_train >= 2) {
            std::vector<double> pred, truth;
            for (std::size_t i = n_train; i < data.size(); ++i) {
                pred.push_back(mlp_forward(result.best_model, data.inputs[i]));
                truth.push_back(data.targets[i]);
            }
            try {
                meta.validation_r2 = r2(pred, truth);
            } catch (const Error&) {
                meta.validation_r2 = 0.0;
            }
        }

        decision.version = registry.publish(mlp_to_json(result.best_model), meta);
        decision.status = "ok";
        decision.validation_loss = result.best_val_loss;
    } catch (const Error& e) {
        if (e.code() != Errc::training_failed) throw;
        // nothing was published; the serving model stays in place
        decision.status = "failed";
        decision.version = 0;
    }
    return decision;
}

// --- orchestrator -------------------------------------------------------------

Orchestrator::Orchestrator(Registry& registry, LoopConfig config, EventSink sink)
    : registry_(registry), config_(std::move(config)), sink_(std::move(sink)) {
    config_.drift.validate();
}

LoopSummary Orchestrator::run(const std::function<std::optional<TraceRecord>()>& next,
                              const std::atomic<bool>* stop) {
    using clock = std::chrono::steady_clock;

    Registry::Loaded initial = registry_.latest(ModelKind::mlp);
    auto model = std::make_shared<const MlpModel>(mlp_from_json(initial.payload));
    if (!model->schema) fail(Errc::invalid_spec, "registry model carries no schema");
    counters_.model_version.store(initial.manifest.version);
    std::uint64_t version = initial.manifest.version;

    std::optional<LstmModel> forecaster;
    std::uint64_t forecaster_version = 0;
    if (config_.forecast_enabled) {
        Registry::Loaded fc = registry_.latest(ModelKind::lstm);
        forecaster = lstm_from_json(fc.payload);
        forecaster_version = fc.manifest.version;
    }

    // the detector normalizes with the initial model's schema for the whole
    // run; retrained models refit their own stats without moving the
    // detector's reference frame
    const FeatureSchema detector_schema = *model->schema;
    const auto M = static_cast<std::size_t>(config_.drift.window_size);
    const std::size_t check_every = config_.check_every_samples > 0
                                        ? static_cast<std::size_t>(config_.check_every_samples)
                                        : M;

    SlidingWindow w_curr(M);
    std::vector<FeatureVector> w_ref;
    std::deque<TraceRecord> retrain_buffer;  // labeled records, most recent M

    std::optional<RollingForecaster> rolling;
    if (forecaster) rolling.emplace(&*forecaster, config_.forecast_every_s);

    auto emit = [&](std::int64_t ts, const char* kind, const json& payload) {
        if (sink_) sink_({ts, kind, payload.dump()});
    };

    std::size_t index = 0;
    std::int64_t last_ts = 0;
    bool update_in_flight = false;
    std::future<UpdateDecision> pending;
    std::vector<FeatureVector> pending_snapshot;

    auto adopt = [&](const UpdateDecision& decision, const std::vector<FeatureVector>& snapshot,
                     std::int64_t ts) {
        json upd;
        upd["severity"] = severity_name(decision.severity);
        upd["tier"] = decision.tier;
        upd["axes"] = decision.axes;
        upd["status"] = decision.status;
        upd["version"] = decision.version;
        upd["val_loss"] = decision.validation_loss;
        upd["n"] = index;
        emit(ts, "update", upd);
        counters_.updates.fetch_add(1);
        if (decision.status == "ok") {
            Registry::Loaded fresh = registry_.load(decision.version);
            model = std::make_shared<const MlpModel>(mlp_from_json(fresh.payload));
            version = decision.version;
            counters_.model_version.store(version);
            w_ref = snapshot;  // Algorithm-1 contract: W_ref <- W_curr
        }
    };

    auto drift_check = [&](std::int64_t ts) {
        if (!w_curr.full() || w_ref.empty() || update_in_flight) return;
        counters_.drift_checks.fetch_add(1);
        const std::vector<FeatureVector> snapshot = w_curr.snapshot();
        const double score = js_divergence(w_ref, snapshot, config_.drift.bins);
        const Severity severity = classify_severity(score, config_.drift);
        json payload;
        payload["score"] = score;
        payload["severity"] = severity_name(severity);
        payload["n"] = index;
        emit(ts, "drift", payload);
        // Algorithm-1 trigger: strictly above delta
        if (score <= config_.drift.delta || severity == Severity::none) return;

        DispatchOptions options;
        options.kpi = config_.kpi;
        options.grid = config_.grid;
        options.triggered_at_ms = ts;
        options.parent_version = version;

        std::vector<TraceRecord> recent(retrain_buffer.begin(), retrain_buffer.end());
        std::vector<std::string> names = model->schema->names();

        auto report_blocked = [&](const Error& e) {
            // drift confirmed but no usable labels: the update is recorded as
            // blocked and the serving model stays
            json upd;
            upd["severity"] = severity_name(severity);
            upd["status"] = "blocked";
            upd["reason"] = e.what();
            upd["n"] = index;
            emit(ts, "update", upd);
            counters_.updates.fetch_add(1);
        };

        if (config_.replay_fast) {
            try {
                const UpdateDecision decision = dispatch_update(severity, recent, names, registry_,
                                                                config_.drift, options);
                adopt(decision, snapshot, ts);
            } catch (const Error& e) {
                if (e.code() == Errc::insufficient_data) {
                    report_blocked(e);
                    return;
                }
                counters_.errors.fetch_add(1);
                json err;
                err["where"] = "dispatch";
                err["error"] = e.what();
                emit(ts, "error", err);
            }
        } else {
            update_in_flight = true;
            pending_snapshot = snapshot;
            // retraining runs off the hot path; the loop keeps serving with
            // the current model and adopts the result between samples
            pending = std::async(std::launch::async,
                                 [this, severity, recent = std::move(recent),
                                  names = std::move(names), options]() {
                                     return dispatch_update(severity, recent, names, registry_,
                                                            config_.drift, options);
                                 });
        }
    };

    auto last_wall_check = clock::now();
    std::optional<TraceRecord> rec;
    while (!(stop && stop->load()) && (rec = next())) {
        const TraceRecord& record = *rec;
        counters_.samples_in.fetch_add(1);
        const std::int64_t ts = record.timestamp_ms;
        last_ts = ts;

        if (update_in_flight && pending.valid() &&
            pending.wait_for(std::chrono::seconds(0)) == std::future_status::ready) {
            update_in_flight = false;
            try {
                adopt(pending.get(), pending_snapshot, ts);
            } catch (const Error& e) {
                if (e.code() == Errc::insufficient_data) {
                    json upd;
                    upd["status"] = "blocked";
                    upd["reason"] = e.what();
                    upd["n"] = index;
                    emit(ts, "update", upd);
                    counters_.updates.fetch_add(1);
                } else {
                    counters_.errors.fetch_add(1);
                    json err;
                    err["where"] = "dispatch";
                    err["error"] = e.what();
                    emit(ts, "error", err);
                }
            }
        }

        try {
            const double y_hat = predict_record(*model, record);
            counters_.predictions_out.fetch_add(1);
            json payload;
            payload["y_hat"] = y_hat;
            payload["v"] = version;
            payload["n"] = index;
            if (record.has_kpi(config_.kpi)) payload["y"] = record.kpis.at(config_.kpi);
            emit(ts, "prediction", payload);
        } catch (const Error& e) {
            counters_.errors.fetch_add(1);
            json err;
            err["where"] = "predict";
            err["error"] = e.what();
            err["n"] = index;
            emit(ts, "error", err);
            ++index;
            continue;  // per-sample failure, the loop keeps going
        }

        const FeatureVector detector_vec = normalize(record, detector_schema);
        w_curr.push(detector_vec);
        if (w_ref.empty() && w_curr.full()) w_ref = w_curr.snapshot();

        if (record.has_kpi(config_.kpi)) {
            retrain_buffer.push_back(record);
            if (retrain_buffer.size() > M) retrain_buffer.pop_front();
        }

        if (rolling) {
            const FeatureVector fc_vec = forecaster->schema
                                             ? normalize(record, *forecaster->schema)
                                             : detector_vec;
            for (const auto& emission : rolling->push(fc_vec, index)) {
                if (std::holds_alternative<ForecastResult>(emission)) {
                    counters_.forecasts_out.fetch_add(1);
                    const auto& f = std::get<ForecastResult>(emission);
                    json payload;
                    payload["base_ts"] = f.base_timestamp_ms;
                    payload["base_index"] = f.base_index;
                    payload["values"] = f.values;
                    payload["v"] = forecaster_version;
                    emit(ts, "forecast", payload);
                } else {
                    const auto& gap = std::get<GapMarker>(emission);
                    json payload;
                    payload["gap"] = true;
                    payload["base_index"] = gap.base_index;
                    emit(ts, "forecast", payload);
                }
            }
        }

        if (config_.replay_fast) {
            if ((index + 1) % check_every == 0) drift_check(ts);
        } else {
            const auto now = clock::now();
            if (now - last_wall_check >= std::chrono::seconds(config_.drift.check_every_s)) {
                last_wall_check = now;
                drift_check(ts);
            }
        }
        ++index;
    }

    // drain a still-running background retrain so no partial state leaks
    if (update_in_flight && pending.valid()) {
        try {
            adopt(pending.get(), pending_snapshot, last_ts);
        } catch (const Error&) {
            counters_.errors.fetch_add(1);
        }
    }
    if (rolling) {
        if (const auto gap = rolling->finish()) {
            json payload;
            payload["gap"] = true;
            payload["base_index"] = gap->base_index;
            emit(last_ts, "forecast", payload);
        }
    }

    LoopSummary summary;
    summary.samples_in = counters_.samples_in.load();
    summary.predictions_out = counters_.predictions_out.load();
    summary.forecasts_out = counters_.forecasts_out.load();
    summary.drift_checks = counters_.drift_checks.load();
    summary.updates = counters_.updates.load();
    summary.errors = counters_.errors.load();
    summary.final_model_version = counters_.model_version.load();
    json payload;
    payload["samples_in"] = summary.samples_in;
    payload["predictions_out"] = summary.predictions_out;
    payload["forecasts_out"] = summary.forecasts_out;
    payload["drift_checks"] = summary.drift_checks;
    payload["updates"] = summary.updates;
    payload["errors"] = summary.errors;
    payload["final_model_version"] = summary.final_model_version;
    emit(last_ts, "summary", payload);
    return summary;
}

}  // namespace drst
