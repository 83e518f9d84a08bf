#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "drst/drift.hpp"
#include "drst/explain.hpp"
#include "drst/metrics.hpp"
#include "drst/pipeline.hpp"
#include "drst/queue.hpp"
#include "drst/registry.hpp"
#include "drst/sha256.hpp"
#include "drst/synth.hpp"
#include "run_config.hpp"

#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

namespace {

using nlohmann::json;
using namespace drst;

std::atomic<bool> g_stop{false};

void handle_stop(int) { g_stop.store(true); }

std::ostream& open_output(const std::string& path, std::ofstream& file) {
    if (path.empty() || path == "-") return std::cout;
    file.open(path);
    if (!file) fail(Errc::io_error, "cannot write '" + path + "'");
    return file;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::io_error, "cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// --- gen ---------------------------------------------------------------------

struct GenArgs {
    std::string spec_path, drift_path, preset_name, out = "-";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int duration_s = 0;
    int interval_ms = 0;
    bool list_presets = false;
};

int run_gen(const GenArgs& args) {
    if (args.list_presets) {
        for (const auto& name : preset_names()) std::cout << name << '\n';
        return 0;
    }
    ScenarioSpec spec;
    if (!args.preset_name.empty())
        spec = preset(args.preset_name);
    else if (!args.spec_path.empty())
        spec = ScenarioSpec::from_json(read_file(args.spec_path));
    else
        fail(Errc::invalid_spec, "gen needs --spec or --preset");
    if (args.seed_set) spec.seed = args.seed;
    if (args.duration_s > 0) spec.duration_s = args.duration_s;
    if (args.interval_ms > 0) spec.interval_ms = args.interval_ms;

    std::optional<DriftInjection> drift;
    if (!args.drift_path.empty()) drift = DriftInjection::from_json(read_file(args.drift_path));

    const auto records = generate(spec, drift);
    std::ofstream file;
    std::ostream& out = open_output(args.out, file);
    for (const auto& rec : records) out << record_to_json(rec) << '\n';
    std::cerr << "generated " << records.size() << " samples\n";
    return 0;
}

// --- select ------------------------------------------------------------------

int run_select(const std::string& trace, const std::string& kpi, double threshold, int bins,
               const std::string& out_path) {
    const auto records = load_trace(trace);
    const RelevanceReport report = select(records, kpi, threshold, bins);
    std::ofstream file;
    std::ostream& out = open_output(out_path, file);
    out << report.to_json() << '\n';
    std::cerr << report.selected.size() << " features retained\n";
    return 0;
}

// --- train -------------------------------------------------------------------

int run_train(const std::string& trace, const std::string& kind, const std::string& model_dir,
              RunConfig cfg) {
    cfg.finalize();
    const auto records = load_trace(trace);
    Registry registry(model_dir);
    const Prepared prep = prepare_training(records, cfg.kpi, cfg.select_threshold,
                                           static_cast<std::size_t>(cfg.max_features),
                                           cfg.norm_method);
    const std::string schema_hash = prep.schema.hash();

    json summary;
    summary["kind"] = kind;
    summary["features"] = prep.schema.names();

    if (kind == "mlp") {
        const std::size_t n_train = prep.dataset.size() * 4 / 5;
        Dataset train, test;
        train.inputs.assign(prep.dataset.inputs.begin(), prep.dataset.inputs.begin() + n_train);
        train.targets.assign(prep.dataset.targets.begin(), prep.dataset.targets.begin() + n_train);
        test.inputs.assign(prep.dataset.inputs.begin() + n_train, prep.dataset.inputs.end());
        test.targets.assign(prep.dataset.targets.begin() + n_train, prep.dataset.targets.end());

        auto [model, report] = mlp_train(train, cfg.mlp, schema_hash);
        model.schema = prep.schema;

        std::vector<double> pred;
        pred.reserve(test.size());
        for (const auto& x : test.inputs) pred.push_back(mlp_forward(model, x));

        PublishMeta meta;
        meta.kind = ModelKind::mlp;
        meta.schema_hash = schema_hash;
        meta.config_digest = sha256_hex(mlp_to_json(model));
        meta.final_loss = report.final_loss;
        meta.validation_r2 = r2(pred, test.targets);
        const std::uint64_t version = registry.publish(mlp_to_json(model), meta);

        summary["version"] = version;
        summary["r2"] = meta.validation_r2;
        summary["acc5log"] = acc5log(pred, test.targets);
        summary["mae"] = mae(pred, test.targets);
        summary["final_loss"] = report.final_loss;
    } else if (kind == "lstm" || kind == "dirrec") {
        const WindowDataset all = windows_from_trace(records, prep.schema, cfg.kpi,
                                                     cfg.lstm.input_window, cfg.lstm.horizon);
        if (all.size() < 10) fail(Errc::empty_data, "trace too short for windows");
        const std::size_t n_train = all.size() * 4 / 5;
        WindowDataset train, test;
        train.samples.assign(all.samples.begin(), all.samples.begin() + n_train);
        test.samples.assign(all.samples.begin() + n_train, all.samples.end());

        std::vector<double> kpi_series;
        for (const auto& rec : records) kpi_series.push_back(rec.kpis.at(cfg.kpi));

        std::string payload;
        double final_loss = 0.0;
        std::vector<ForecastResult> forecasts;
        if (kind == "lstm") {
            auto [model, report] = lstm_train(train, cfg.lstm, schema_hash);
            model.schema = prep.schema;
            payload = lstm_to_json(model);
            final_loss = report.final_loss;
            for (const auto& s : test.samples)
                forecasts.push_back({0, s.base_index, lstm_eval(model, s.window)});
        } else {
            auto [chain, report] = dirrec_train(train, cfg.lstm, schema_hash);
            for (auto& m : chain.members) m.schema = prep.schema;
            payload = dirrec_to_json(chain);
            final_loss = report.final_loss;
            for (const auto& s : test.samples)
                forecasts.push_back({0, s.base_index, dirrec_eval(chain, s.window)});
        }

        PublishMeta meta;
        meta.kind = kind == "lstm" ? ModelKind::lstm : ModelKind::dirrec;
        meta.schema_hash = schema_hash;
        meta.config_digest = sha256_hex(payload);
        meta.final_loss = final_loss;
        const std::uint64_t version = registry.publish(payload, meta);

        summary["version"] = version;
        summary["final_loss"] = final_loss;
        for (int k = 1; k <= cfg.lstm.horizon; ++k)
            summary["acc_t" + std::to_string(k)] = acc_at_horizon(forecasts, kpi_series, k);
    } else {
        fail(Errc::invalid_spec, "unknown kind '" + kind + "'");
    }

    std::cout << summary.dump(2) << '\n';
    return 0;
}

// --- serve -------------------------------------------------------------------

struct ServeArgs {
    std::string trace, listen, model_dir, events_path;
    double speed = 0.0;
    bool forecast = false;
    int metrics_port = 0;
};

// accepts one connection and feeds NDJSON lines into the queue
void listen_lines(const std::string& spec, BoundedQueue<TraceRecord>& queue) {
    const auto colon = spec.rfind(':');
    if (colon == std::string::npos) fail(Errc::invalid_spec, "--listen wants host:port");
    const int port = std::stoi(spec.substr(colon + 1));

    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) fail(Errc::io_error, "socket() failed");
    int yes = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_ANY);
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
        ::close(fd);
        fail(Errc::io_error, "bind() failed on " + spec);
    }
    if (::listen(fd, 1) != 0) {
        ::close(fd);
        fail(Errc::io_error, "listen() failed");
    }
    std::cerr << "listening on " << spec << '\n';
    const int conn = ::accept(fd, nullptr, nullptr);
    ::close(fd);
    if (conn < 0) fail(Errc::io_error, "accept() failed");

    std::string buffer;
    char chunk[4096];
    ssize_t got = 0;
    while (!g_stop.load() && (got = ::read(conn, chunk, sizeof chunk)) > 0) {
        buffer.append(chunk, static_cast<std::size_t>(got));
        std::size_t pos = 0, nl = 0;
        while ((nl = buffer.find('\n', pos)) != std::string::npos) {
            const std::string line = buffer.substr(pos, nl - pos);
            pos = nl + 1;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            try {
                if (!queue.push(parse_record(line))) {
                    ::close(conn);
                    return;
                }
            } catch (const Error& e) {
                std::cerr << "dropped line: " << e.what() << '\n';
            }
        }
        buffer.erase(0, pos);
    }
    ::close(conn);
}

std::string render_metrics(const LoopCounters& c) {
    std::ostringstream out;
    out << "drst_samples_in_total " << c.samples_in.load() << '\n'
        << "drst_predictions_total " << c.predictions_out.load() << '\n'
        << "drst_forecasts_total " << c.forecasts_out.load() << '\n'
        << "drst_drift_checks_total " << c.drift_checks.load() << '\n'
        << "drst_updates_total " << c.updates.load() << '\n'
        << "drst_errors_total " << c.errors.load() << '\n'
        << "drst_model_version " << c.model_version.load() << '\n';
    return out.str();
}

int run_serve(const ServeArgs& args, RunConfig cfg) {
    cfg.finalize();
    if (args.trace.empty() == args.listen.empty())
        fail(Errc::invalid_spec, "serve needs exactly one of --trace or --listen");

    Registry registry(args.model_dir);
    LoopConfig loop;
    loop.drift = cfg.drift;
    loop.kpi = cfg.kpi;
    loop.grid = cfg.retrain_grid();
    loop.check_every_samples = cfg.check_every_samples;
    loop.forecast_every_s = cfg.forecast_every_s;
    loop.forecast_enabled = args.forecast;
    // wall-clock cadence applies when samples arrive in real time
    loop.replay_fast = args.listen.empty() && args.speed == 0.0;

    std::ofstream events_file;
    std::ostream& events = open_output(args.events_path, events_file);
    EventSink sink = [&](const Event& e) {
        json line;
        line["ts"] = e.ts;
        line["kind"] = e.kind;
        line["payload"] = json::parse(e.payload_json);
        events << line.dump() << '\n';
    };

    Orchestrator orchestrator(registry, loop, sink);

    httplib::Server metrics_server;
    std::thread metrics_thread;
    if (args.metrics_port > 0) {
        metrics_server.Get("/metrics", [&](const httplib::Request&, httplib::Response& res) {
            res.set_content(render_metrics(orchestrator.counters()), "text/plain");
        });
        metrics_thread =
            std::thread([&] { metrics_server.listen("127.0.0.1", args.metrics_port); });
    }

    LoopSummary summary;
    if (loop.replay_fast) {
        const auto records = load_trace(args.trace);
        std::size_t cursor = 0;
        summary = orchestrator.run(
            [&]() -> std::optional<TraceRecord> {
                if (cursor >= records.size()) return std::nullopt;
                return records[cursor++];
            },
            &g_stop);
    } else {
        BoundedQueue<TraceRecord> queue(1024);
        struct StopReplay {};
        std::thread producer([&] {
            try {
                if (!args.trace.empty()) {
                    replay(args.trace, args.speed, [&](const TraceRecord& rec) {
                        if (g_stop.load() || !queue.push(rec)) throw StopReplay{};
                    });
                } else {
                    listen_lines(args.listen, queue);
                }
            } catch (const StopReplay&) {
            } catch (const Error& e) {
                std::cerr << "source error: " << e.what() << '\n';
            }
            queue.close();
        });
        summary = orchestrator.run([&]() { return queue.pop(); }, &g_stop);
        queue.close();
        producer.join();
    }

    if (metrics_thread.joinable()) {
        metrics_server.stop();
        metrics_thread.join();
    }
    std::cerr << "served " << summary.samples_in << " samples, " << summary.updates
              << " updates, model v" << summary.final_model_version << '\n';
    return 0;
}

// --- forecast ----------------------------------------------------------------

LstmModel load_lstm_artifact(const std::string& model_path) {
    if (std::filesystem::is_directory(model_path)) {
        Registry registry(model_path);
        return lstm_from_json(registry.latest(ModelKind::lstm).payload);
    }
    const std::string payload = read_file(model_path);
    const json doc = json::parse(payload, nullptr, false);
    if (!doc.is_discarded() && doc.value("kind", "") == "dirrec")
        fail(Errc::invalid_spec, "dirrec chains are benchmark-only; serve a standard lstm");
    return lstm_from_json(payload);
}

int run_forecast(const std::string& model_path, const std::string& trace, int every_s,
                 int horizon, const std::string& out_path) {
    LstmModel model = load_lstm_artifact(model_path);
    if (!model.schema) fail(Errc::invalid_spec, "model carries no schema");
    if (horizon > model.config.horizon)
        fail(Errc::horizon_out_of_range,
             "model horizon is " + std::to_string(model.config.horizon));
    const std::size_t emit_h = horizon > 0 ? static_cast<std::size_t>(horizon)
                                           : static_cast<std::size_t>(model.config.horizon);

    std::ofstream file;
    std::ostream& out = open_output(out_path, file);
    RollingForecaster rolling(&model, every_s);
    std::size_t index = 0;
    std::size_t emitted = 0;
    const auto records = load_trace(trace);
    for (const auto& rec : records) {
        const FeatureVector v = normalize(rec, *model.schema);
        for (const auto& emission : rolling.push(v, index)) {
            json line;
            if (std::holds_alternative<ForecastResult>(emission)) {
                const auto& f = std::get<ForecastResult>(emission);
                line["base_ts"] = f.base_timestamp_ms;
                line["base_index"] = f.base_index;
                line["values"] =
                    std::vector<double>(f.values.begin(), f.values.begin() + emit_h);
                ++emitted;
            } else {
                line["gap"] = true;
                line["base_index"] = std::get<GapMarker>(emission).base_index;
            }
            out << line.dump() << '\n';
        }
        ++index;
    }
    if (const auto gap = rolling.finish()) {
        json line;
        line["gap"] = true;
        line["base_index"] = gap->base_index;
        out << line.dump() << '\n';
    }
    std::cerr << emitted << " forecasts\n";
    return 0;
}

// --- explain -----------------------------------------------------------------

int run_explain(const std::string& model_path, const std::string& trace, int samples, int topk,
                int permutations, std::uint64_t seed, const std::string& out_path) {
    MlpModel model;
    if (std::filesystem::is_directory(model_path)) {
        Registry registry(model_path);
        model = mlp_from_json(registry.latest(ModelKind::mlp).payload);
    } else {
        model = mlp_from_json(read_file(model_path));
    }
    if (!model.schema) fail(Errc::invalid_spec, "model carries no schema");
    const std::vector<std::string> names = model.schema->names();

    const auto records = load_trace(trace);
    std::vector<std::vector<double>> rows;
    for (const auto& rec : records) {
        rows.push_back(normalize(rec, *model.schema).values);
        if (rows.size() == static_cast<std::size_t>(samples)) break;
    }
    if (rows.empty()) fail(Errc::empty_data, "trace has no usable records");

    const auto k = std::min<std::size_t>(static_cast<std::size_t>(topk), names.size());
    const SensitivityReport sensitivity = gradient_sensitivity(model, rows, k, names);

    json doc;
    doc["schema_hash"] = model.input_schema_hash;
    json sens = json::object();
    for (std::size_t j = 0; j < names.size(); ++j)
        sens[names[j]] = sensitivity.mean_abs_gradient[j];
    doc["sensitivity"] = sens;
    json top = json::array();
    for (const auto j : sensitivity.top_k) top.push_back(names[j]);
    doc["top_k"] = top;

    std::vector<double> mean_phi(sensitivity.top_k.size(), 0.0);
    std::vector<double> mean_abs_phi(sensitivity.top_k.size(), 0.0);
    json per_sample = json::array();
    for (const auto& x : rows) {
        const Attribution a =
            sensitivity.top_k.size() <= 12
                ? shapley_exact(model, x, rows, sensitivity.top_k)
                : shapley_sampled(model, x, rows, sensitivity.top_k, permutations, seed);
        json ja;
        ja["phi0"] = a.phi0;
        ja["prediction"] = a.prediction;
        ja["residual"] = a.residual;
        json phis = json::object();
        for (std::size_t j = 0; j < a.phis.size(); ++j) {
            phis[names[a.active[j]]] = a.phis[j];
            mean_phi[j] += a.phis[j];
            mean_abs_phi[j] += std::abs(a.phis[j]);
        }
        ja["phi"] = phis;
        per_sample.push_back(std::move(ja));
    }
    doc["per_sample"] = per_sample;

    // per-prediction attributions aggregate two ways; report both
    json agg_mean = json::object(), agg_abs = json::object(), agg_norm = json::object();
    double denom = 0.0;
    for (double v : mean_abs_phi) denom += v;
    for (std::size_t j = 0; j < sensitivity.top_k.size(); ++j) {
        const std::string& name = names[sensitivity.top_k[j]];
        agg_mean[name] = mean_phi[j] / static_cast<double>(rows.size());
        agg_abs[name] = mean_abs_phi[j] / static_cast<double>(rows.size());
        agg_norm[name] = denom > 0.0 ? mean_abs_phi[j] / denom : 0.0;
    }
    doc["aggregate"]["mean_phi"] = agg_mean;
    doc["aggregate"]["mean_abs_phi"] = agg_abs;
    doc["aggregate"]["normalized_abs_phi"] = agg_norm;

    std::ofstream file;
    std::ostream& out = open_output(out_path, file);
    out << doc.dump(2) << '\n';
    return 0;
}

// --- bench -------------------------------------------------------------------

int run_bench(const std::string& suite_path, const std::string& out_path) {
    json suite;
    try {
        suite = json::parse(read_file(suite_path));
    } catch (const json::parse_error& e) {
        fail(Errc::parse_error, std::string("suite: ") + e.what());
    }
    const auto seen = load_trace(suite.at("seen").get<std::string>());
    std::vector<std::pair<std::string, std::vector<TraceRecord>>> unseen;
    if (suite.contains("unseen"))
        for (const auto& p : suite["unseen"])
            unseen.emplace_back(p.get<std::string>(), load_trace(p.get<std::string>()));

    BenchConfig config;
    if (suite.contains("kpi")) config.kpi = suite["kpi"].get<std::string>();
    if (suite.contains("threshold")) config.select_threshold = suite["threshold"].get<double>();
    if (suite.contains("mlp_epochs")) config.mlp.epochs = suite["mlp_epochs"].get<int>();
    if (suite.contains("lstm_epochs")) config.lstm.epochs = suite["lstm_epochs"].get<int>();
    if (suite.contains("window")) config.lstm.input_window = suite["window"].get<int>();
    if (suite.contains("horizon")) config.lstm.horizon = suite["horizon"].get<int>();
    if (suite.contains("seed")) {
        config.mlp.seed = suite["seed"].get<std::uint64_t>();
        config.lstm.seed = config.mlp.seed;
    }
    if (suite.contains("dump_dir")) config.dump_dir = suite["dump_dir"].get<std::string>();
    std::vector<std::string> kinds = {"mlp"};
    if (suite.contains("kinds")) kinds = suite["kinds"].get<std::vector<std::string>>();

    const auto rows = bench(kinds, seen, unseen, config);
    std::ofstream file;
    std::ostream& out = open_output(out_path, file);
    out << bench_csv(rows, config.lstm.horizon);
    return 0;
}

// --- registry ----------------------------------------------------------------

int run_registry_ls(const std::string& model_dir) {
    Registry registry(model_dir);
    const auto active = registry.active_alias();
    for (const auto& m : registry.list()) {
        std::cout << m.version << '\t' << model_kind_name(m.kind) << '\t' << m.created_at << '\t'
                  << "loss=" << m.final_loss << '\t' << "r2=" << m.validation_r2
                  << (active && *active == m.version ? "\tACTIVE" : "") << '\n';
    }
    return 0;
}

int run_registry_rollback(const std::string& model_dir, std::uint64_t version) {
    Registry registry(model_dir);
    registry.rollback(version);
    std::cerr << "active version now " << version << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    std::signal(SIGINT, handle_stop);
    std::signal(SIGTERM, handle_stop);

    CLI::App app{"drst: online KPI inference with drift-aware retraining"};
    app.require_subcommand(1);

    GenArgs gen_args;
    auto* gen_cmd = app.add_subcommand("gen", "generate a synthetic trace");
    gen_cmd->add_option("--spec", gen_args.spec_path, "scenario spec JSON");
    gen_cmd->add_option("--preset", gen_args.preset_name, "named preset scenario");
    gen_cmd->add_option("--drift", gen_args.drift_path, "drift injection JSON");
    gen_cmd->add_option("--seed", gen_args.seed, "override scenario seed")
        ->each([&gen_args](const std::string&) { gen_args.seed_set = true; });
    gen_cmd->add_option("--duration", gen_args.duration_s, "override duration (s)");
    gen_cmd->add_option("--interval", gen_args.interval_ms, "override sampling interval (ms)");
    gen_cmd->add_option("-o,--out", gen_args.out, "output trace path (default stdout)");
    gen_cmd->add_flag("--list-presets", gen_args.list_presets, "list preset names");

    std::string sel_trace, sel_kpi = "throughput_mbps", sel_out = "-";
    double sel_threshold = 0.5;
    int sel_bins = 16;
    auto* sel_cmd = app.add_subcommand("select", "rank features against a KPI");
    sel_cmd->add_option("--trace", sel_trace, "trace file")->required();
    sel_cmd->add_option("--kpi", sel_kpi, "KPI name");
    sel_cmd->add_option("--threshold", sel_threshold, "retention threshold on |pearson r|");
    sel_cmd->add_option("--bins", sel_bins, "mutual information bins");
    sel_cmd->add_option("-o,--out", sel_out, "report path (default stdout)");

    RunConfig train_cfg;
    std::string train_trace, train_kind = "mlp", train_dir = "registry";
    auto* train_cmd = app.add_subcommand("train", "train and publish a model");
    train_cmd->add_option("--trace", train_trace, "training trace")->required();
    train_cmd->add_option("--kind", train_kind, "mlp|lstm|dirrec");
    train_cmd->add_option("--model-dir", train_dir, "registry directory");
    register_run_options(*train_cmd, train_cfg);
    add_config_option(*train_cmd);

    RunConfig serve_cfg;
    ServeArgs serve_args;
    auto* serve_cmd = app.add_subcommand("serve", "run the online inference loop");
    serve_cmd->add_option("--trace", serve_args.trace, "trace file to replay");
    serve_cmd->add_option("--listen", serve_args.listen, "host:port NDJSON line stream");
    serve_cmd->add_option("--model-dir", serve_args.model_dir, "registry directory")->required();
    serve_cmd->add_option("--events", serve_args.events_path, "event log path (default stdout)");
    serve_cmd->add_option("--speed", serve_args.speed,
                          "replay speed; 1.0 = original gaps, 0 = replay-fast");
    serve_cmd->add_flag("--forecast", serve_args.forecast, "enable the forecasting engine");
    serve_cmd->add_option("--metrics-port", serve_args.metrics_port,
                          "expose plaintext counters on this port");
    register_run_options(*serve_cmd, serve_cfg);
    add_config_option(*serve_cmd);

    std::string fc_model, fc_trace, fc_out = "-";
    int fc_every = 30, fc_horizon = 0;
    auto* fc_cmd = app.add_subcommand("forecast", "rolling multi-step KPI forecasts");
    fc_cmd->add_option("--model", fc_model, "registry dir or payload file")->required();
    fc_cmd->add_option("--trace", fc_trace, "trace file")->required();
    fc_cmd->add_option("--every", fc_every, "emission period (s)");
    fc_cmd->add_option("--horizon", fc_horizon, "steps to emit (default: model horizon)");
    fc_cmd->add_option("-o,--out", fc_out, "output path (default stdout)");

    std::string ex_model, ex_trace, ex_out = "-";
    int ex_samples = 100, ex_topk = 10, ex_perms = 200;
    std::uint64_t ex_seed = 1;
    auto* ex_cmd = app.add_subcommand("explain", "Shapley attribution of predictions");
    ex_cmd->add_option("--model", ex_model, "registry dir or payload file")->required();
    ex_cmd->add_option("--trace", ex_trace, "trace file")->required();
    ex_cmd->add_option("--samples", ex_samples, "samples to explain");
    ex_cmd->add_option("--topk", ex_topk, "features kept after sensitivity pre-selection");
    ex_cmd->add_option("--permutations", ex_perms, "permutations in sampled mode");
    ex_cmd->add_option("--seed", ex_seed, "sampled-mode seed");
    ex_cmd->add_option("-o,--out", ex_out, "output path (default stdout)");

    std::string bench_suite, bench_out = "-";
    auto* bench_cmd = app.add_subcommand("bench", "train/evaluate model candidates");
    bench_cmd->add_option("--suite", bench_suite, "suite JSON")->required();
    bench_cmd->add_option("-o,--out", bench_out, "CSV output path (default stdout)");

    auto* reg_cmd = app.add_subcommand("registry", "inspect or roll back the registry");
    std::string reg_dir = "registry";
    auto* ls_cmd = reg_cmd->add_subcommand("ls", "list artifacts");
    ls_cmd->add_option("--model-dir", reg_dir, "registry directory");
    std::uint64_t reg_to = 0;
    auto* rb_cmd = reg_cmd->add_subcommand("rollback", "mark a version active");
    rb_cmd->add_option("--model-dir", reg_dir, "registry directory");
    rb_cmd->add_option("--to", reg_to, "version to activate")->required();
    reg_cmd->require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
        std::cerr << e.what() << "\nrun with --help for usage\n";
        return 1;
    }

    try {
        if (*gen_cmd) return run_gen(gen_args);
        if (*sel_cmd) return run_select(sel_trace, sel_kpi, sel_threshold, sel_bins, sel_out);
        if (*train_cmd) return run_train(train_trace, train_kind, train_dir, train_cfg);
        if (*serve_cmd) return run_serve(serve_args, serve_cfg);
        if (*fc_cmd) return run_forecast(fc_model, fc_trace, fc_every, fc_horizon, fc_out);
        if (*ex_cmd)
            return run_explain(ex_model, ex_trace, ex_samples, ex_topk, ex_perms, ex_seed, ex_out);
        if (*bench_cmd) return run_bench(bench_suite, bench_out);
        if (*reg_cmd) {
            if (*ls_cmd) return run_registry_ls(reg_dir);
            if (*rb_cmd) return run_registry_rollback(reg_dir, reg_to);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
