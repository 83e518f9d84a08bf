#include "drst/metrics.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "drst/pipeline.hpp"

namespace drst {

namespace {

void check_lengths(const std::vector<double>& pred, const std::vector<double>& truth,
                   std::size_t min_n) {
    if (pred.size() != truth.size()) fail(Errc::length_mismatch, "pred/truth sizes differ");
    if (pred.size() < min_n) fail(Errc::length_mismatch, "too few samples");
}

}  // namespace

double r2(const std::vector<double>& pred, const std::vector<double>& truth) {
    check_lengths(pred, truth, 2);
    double mean = 0.0;
    for (double t : truth) mean += t;
    mean /= static_cast<double>(truth.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        ss_res += (truth[i] - pred[i]) * (truth[i] - pred[i]);
        ss_tot += (truth[i] - mean) * (truth[i] - mean);
    }
    if (ss_tot == 0.0) fail(Errc::constant_truth, "truth is constant");
    return 1.0 - ss_res / ss_tot;
}

double mae(const std::vector<double>& pred, const std::vector<double>& truth) {
    check_lengths(pred, truth, 1);
    double acc = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) acc += std::abs(pred[i] - truth[i]);
    return acc / static_cast<double>(truth.size());
}

double mape(const std::vector<double>& pred, const std::vector<double>& truth,
            std::size_t* excluded) {
    check_lengths(pred, truth, 1);
    double acc = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] == 0.0) continue;
        acc += std::abs((pred[i] - truth[i]) / truth[i]);
        ++used;
    }
    if (excluded) *excluded = truth.size() - used;
    if (used == 0) fail(Errc::zero_truth, "every truth value is zero");
    return acc / static_cast<double>(used);
}

double acc5log(const std::vector<double>& pred, const std::vector<double>& truth, double tol) {
    check_lengths(pred, truth, 1);
    const double bound = std::log(1.0 + tol);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (pred[i] <= 0.0 || truth[i] <= 0.0)
            fail(Errc::non_positive_value, "log accuracy needs positive values");
        if (std::abs(std::log(pred[i]) - std::log(truth[i])) <= bound) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

double acc_at_horizon(const std::vector<ForecastResult>& forecasts,
                      const std::vector<double>& truth, int k, double tol) {
    if (forecasts.empty()) fail(Errc::length_mismatch, "no forecasts");
    if (k < 1 || k > static_cast<int>(forecasts.front().values.size()))
        fail(Errc::horizon_out_of_range, "k outside [1, H]");
    std::vector<double> p, t;
    p.reserve(forecasts.size());
    t.reserve(forecasts.size());
    for (const auto& f : forecasts) {
        const std::size_t idx = f.base_index + static_cast<std::size_t>(k);
        if (idx >= truth.size())
            fail(Errc::alignment_gap, "no aligned truth for a forecast step");
        p.push_back(f.values[static_cast<std::size_t>(k - 1)]);
        t.push_back(truth[idx]);
    }
    return acc5log(p, t, tol);
}

namespace {

EvalReport score_predictions(const std::vector<double>& pred, const std::vector<double>& truth,
                             double tol) {
    EvalReport rep;
    rep.n = truth.size();
    rep.r2 = r2(pred, truth);
    rep.mae = mae(pred, truth);
    rep.mape = mape(pred, truth);
    rep.acc5log = acc5log(pred, truth, tol);
    return rep;
}

// long-format prediction dump for external plotting
class PredDump {
public:
    PredDump(const std::string& dir, const std::string& model, const std::string& trace) {
        if (dir.empty()) return;
        std::filesystem::create_directories(dir);
        std::string name = "preds_" + model + "_" + trace + ".csv";
        for (auto& c : name)
            if (c == '/' || c == ':') c = '_';
        out_.open(std::filesystem::path(dir) / name);
        if (out_) out_ << "index,step,prediction,truth\n";
    }

    void row(std::size_t index, int step, double pred, double truth) {
        if (out_) out_ << index << ',' << step << ',' << pred << ',' << truth << '\n';
    }

private:
    std::ofstream out_;
};

}  // namespace

std::vector<BenchRow> bench(
    const std::vector<std::string>& kinds, const std::vector<TraceRecord>& seen,
    const std::vector<std::pair<std::string, std::vector<TraceRecord>>>& unseen,
    const BenchConfig& config) {
    using clock = std::chrono::steady_clock;
    if (seen.empty()) fail(Errc::empty_data, "bench needs a seen trace");

    const Prepared prep = prepare_training(seen, config.kpi, config.select_threshold);
    const std::string schema_hash = prep.schema.hash();
    const std::size_t n_train = seen.size() * 4 / 5;

    std::vector<BenchRow> rows;
    for (const auto& kind : kinds) {
        if (kind == "mlp") {
            Dataset train, test;
            train.inputs.assign(prep.dataset.inputs.begin(), prep.dataset.inputs.begin() + n_train);
            train.targets.assign(prep.dataset.targets.begin(),
                                 prep.dataset.targets.begin() + n_train);
            test.inputs.assign(prep.dataset.inputs.begin() + n_train, prep.dataset.inputs.end());
            test.targets.assign(prep.dataset.targets.begin() + n_train, prep.dataset.targets.end());

            auto [model, report] = mlp_train(train, config.mlp, schema_hash);
            (void)report;

            auto eval_set = [&](const Dataset& d, const std::string& trace_name) {
                std::vector<double> pred;
                pred.reserve(d.size());
                const auto t0 = clock::now();
                for (const auto& x : d.inputs) pred.push_back(mlp_forward(model, x));
                const double ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
                EvalReport rep = score_predictions(pred, d.targets, config.acc_tol);
                rep.latency_ms_per_sample = ms / static_cast<double>(d.size());
                PredDump dump(config.dump_dir, kind, trace_name);
                for (std::size_t i = 0; i < pred.size(); ++i)
                    dump.row(i, 0, pred[i], d.targets[i]);
                return rep;
            };

            rows.push_back({kind, "seen", eval_set(test, "seen")});
            for (const auto& [name, trace] : unseen)
                rows.push_back({kind, "unseen:" + name,
                                eval_set(normalized_dataset(trace, prep.schema, config.kpi),
                                         "unseen_" + name)});
        } else if (kind == "lstm" || kind == "dirrec") {
            const WindowDataset all = windows_from_trace(seen, prep.schema, config.kpi,
                                                         config.lstm.input_window,
                                                         config.lstm.horizon);
            if (all.size() < 10) fail(Errc::empty_data, "trace too short for windows");
            const std::size_t n_wtrain = all.size() * 4 / 5;
            WindowDataset train, test;
            train.samples.assign(all.samples.begin(), all.samples.begin() + n_wtrain);
            test.samples.assign(all.samples.begin() + n_wtrain, all.samples.end());

            std::vector<double> kpi_series;
            for (const auto& rec : seen) kpi_series.push_back(rec.kpis.at(config.kpi));

            auto eval_windows = [&](auto&& eval_one, const WindowDataset& ws,
                                    const std::vector<double>& truth,
                                    const std::string& trace_name) {
                std::vector<ForecastResult> forecasts;
                forecasts.reserve(ws.size());
                const auto t0 = clock::now();
                for (const auto& s : ws.samples) {
                    ForecastResult f;
                    f.base_index = s.base_index;
                    f.values = eval_one(s.window);
                    forecasts.push_back(std::move(f));
                }
                const double ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();

                std::vector<double> p1, t1;
                for (const auto& f : forecasts) {
                    p1.push_back(f.values.front());
                    t1.push_back(truth[f.base_index + 1]);
                }
                EvalReport rep = score_predictions(p1, t1, config.acc_tol);
                for (int k = 1; k <= config.lstm.horizon; ++k)
                    rep.acc_at.push_back(acc_at_horizon(forecasts, truth, k, config.acc_tol));
                rep.latency_ms_per_sample = ms / static_cast<double>(ws.size());
                PredDump dump(config.dump_dir, kind, trace_name);
                for (const auto& f : forecasts)
                    for (int k = 1; k <= config.lstm.horizon; ++k)
                        dump.row(f.base_index, k, f.values[k - 1], truth[f.base_index + k]);
                return rep;
            };

            if (kind == "lstm") {
                auto [model, report] = lstm_train(train, config.lstm, schema_hash);
                (void)report;
                auto eval_one = [&](const std::vector<std::vector<double>>& w) {
                    return lstm_eval(model, w);
                };
                rows.push_back({kind, "seen", eval_windows(eval_one, test, kpi_series, "seen")});
                for (const auto& [name, trace] : unseen) {
                    const WindowDataset ws = windows_from_trace(trace, prep.schema, config.kpi,
                                                                config.lstm.input_window,
                                                                config.lstm.horizon);
                    std::vector<double> truth;
                    for (const auto& rec : trace) truth.push_back(rec.kpis.at(config.kpi));
                    rows.push_back({kind, "unseen:" + name,
                                    eval_windows(eval_one, ws, truth, "unseen_" + name)});
                }
            } else {
                auto [chain, report] = dirrec_train(train, config.lstm, schema_hash);
                (void)report;
                auto eval_one = [&](const std::vector<std::vector<double>>& w) {
                    return dirrec_eval(chain, w);
                };
                rows.push_back({kind, "seen", eval_windows(eval_one, test, kpi_series, "seen")});
                for (const auto& [name, trace] : unseen) {
                    const WindowDataset ws = windows_from_trace(trace, prep.schema, config.kpi,
                                                                config.lstm.input_window,
                                                                config.lstm.horizon);
                    std::vector<double> truth;
                    for (const auto& rec : trace) truth.push_back(rec.kpis.at(config.kpi));
                    rows.push_back({kind, "unseen:" + name,
                                    eval_windows(eval_one, ws, truth, "unseen_" + name)});
                }
            }
        } else {
            fail(Errc::invalid_spec, "unknown model kind '" + kind + "'");
        }
    }
    return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows, int horizon) {
    std::ostringstream out;
    out << "model,trace,n,r2,mae,mape,acc5log,latency_ms_per_sample";
    for (int k = 1; k <= horizon; ++k) out << ",acc_t" << k;
    out << '\n';
    for (const auto& row : rows) {
        out << row.model << ',' << row.trace << ',' << row.report.n << ',' << row.report.r2 << ','
            << row.report.mae << ',' << row.report.mape << ',' << row.report.acc5log << ','
            << row.report.latency_ms_per_sample;
        for (int k = 0; k < horizon; ++k) {
            out << ',';
            if (k < static_cast<int>(row.report.acc_at.size())) out << row.report.acc_at[k];
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace drst
