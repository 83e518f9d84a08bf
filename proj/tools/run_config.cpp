#include "run_config.hpp"

#include <fstream>

namespace drst {

namespace {

const std::map<std::string, Activation> kActivationMap = {
    {"relu", Activation::relu},
    {"tanh", Activation::tanh_act},
};

const std::map<std::string, NormMethod> kNormMap = {
    {"minmax", NormMethod::minmax},
    {"zscore", NormMethod::zscore},
};

}  // namespace

void register_run_options(CLI::App& app, RunConfig& cfg) {
    app.add_option("--m", cfg.drift.window_size, "drift window size M")
        ->capture_default_str();
    app.add_option("--bins", cfg.drift.bins, "histogram bins for JS divergence")
        ->capture_default_str();
    app.add_option("--delta", cfg.drift.delta, "drift trigger threshold")
        ->capture_default_str();
    app.add_option("--severity-cuts", cfg.drift.severity_cuts,
                   "ascending severity cuts (first must equal delta)")
        ->expected(-1);
    app.add_option("--check-every-s", cfg.drift.check_every_s,
                   "drift check period, wall seconds")
        ->capture_default_str();
    app.add_option("--check-every-samples", cfg.check_every_samples,
                   "drift check period in samples (replay-fast mode)")
        ->capture_default_str();
    app.add_option("--kpi", cfg.kpi, "KPI to predict")->capture_default_str();
    app.add_option("--threshold", cfg.select_threshold, "feature relevance threshold")
        ->capture_default_str();
    app.add_option("--max-features", cfg.max_features, "cap on retained features (0 = all)")
        ->capture_default_str();
    app.add_option("--forecast-every", cfg.forecast_every_s, "forecast period, seconds")
        ->capture_default_str();
    app.add_option("--norm", cfg.norm_method, "feature normalization: minmax|zscore")
        ->transform(CLI::CheckedTransformer(kNormMap, CLI::ignore_case));

    app.add_option("--hidden-layers", cfg.mlp.hidden_layers, "MLP hidden layers [0,4]")
        ->capture_default_str();
    app.add_option("--hidden-width", cfg.mlp.hidden_width, "MLP hidden width [1,64]")
        ->capture_default_str();
    app.add_option("--activation", cfg.mlp.activation, "relu|tanh")
        ->transform(CLI::CheckedTransformer(kActivationMap, CLI::ignore_case));
    app.add_option("--alpha", cfg.mlp.l2_alpha, "L2 regularization strength")
        ->capture_default_str();
    app.add_option("--lr", cfg.mlp.learning_rate, "MLP learning rate")->capture_default_str();
    app.add_option("--batch", cfg.mlp.batch_size, "MLP batch size")->capture_default_str();
    app.add_option("--epochs", cfg.mlp.epochs, "MLP epochs")->capture_default_str();
    app.add_option("--seed", cfg.mlp.seed, "training seed")->capture_default_str();

    app.add_option("--lstm-layers", cfg.lstm.layers, "stacked LSTM layers [1,3]")
        ->capture_default_str();
    app.add_option("--hidden-dim", cfg.lstm.hidden_dim, "LSTM hidden dim [32,128]")
        ->capture_default_str();
    app.add_option("--window", cfg.lstm.input_window, "forecast input window N")
        ->capture_default_str();
    app.add_option("--horizon", cfg.lstm.horizon, "forecast horizon H")->capture_default_str();
    app.add_option("--lstm-lr", cfg.lstm.learning_rate, "LSTM learning rate")
        ->capture_default_str();
    app.add_option("--lstm-batch", cfg.lstm.batch_size, "LSTM batch size")->capture_default_str();
    app.add_option("--lstm-epochs", cfg.lstm.epochs, "LSTM epochs")->capture_default_str();
    app.add_option("--lstm-seed", cfg.lstm.seed, "LSTM training seed")->capture_default_str();
}

void RunConfig::finalize() {
    const std::vector<double> stock_cuts = {0.05, 0.10, 0.20};
    if (drift.severity_cuts == stock_cuts && drift.delta != 0.05)
        drift.severity_cuts = {drift.delta, 2.0 * drift.delta, 4.0 * drift.delta};
    drift.validate();
}

namespace {

// every effective line must be a section header or key=value with a sane key
std::string check_config_syntax(const std::string& path) {
    std::ifstream in(path);
    if (!in) return "";  // existence is CLI11's job
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto begin = line.find_first_not_of(" \t\r");
        if (begin == std::string::npos) continue;
        const char first = line[begin];
        if (first == '#' || first == ';') continue;
        const auto end = line.find_last_not_of(" \t\r");
        const std::string body = line.substr(begin, end - begin + 1);
        if (first == '[') {
            if (body.back() != ']' || body.size() < 3)
                return "bad section header at line " + std::to_string(line_no);
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos || eq == 0)
            return "expected key=value at line " + std::to_string(line_no);
        const std::string key = body.substr(0, body.find_last_not_of(" \t", eq - 1) + 1);
        if (key.find_first_not_of(
                "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_.-") !=
            std::string::npos)
            return "bad key at line " + std::to_string(line_no);
    }
    return "";
}

}  // namespace

CLI::Option* add_config_option(CLI::App& app) {
    CLI::Option* opt = app.set_config("--config");
    opt->check(CLI::Validator(check_config_syntax, "CONFIG", "config-syntax"));
    app.allow_config_extras(CLI::config_extras_mode::error);
    return opt;
}

RunConfig load_config(const std::string& path) {
    RunConfig cfg;
    CLI::App app{"run config"};
    register_run_options(app, cfg);
    add_config_option(app)->required();
    try {
        app.parse(std::vector<std::string>{path, "--config"});  // CLI11 wants reversed args
    } catch (const CLI::ConfigError& e) {
        fail(Errc::unknown_key, e.what());
    } catch (const CLI::ParseError& e) {
        fail(Errc::parse_error, e.what());
    }
    cfg.finalize();
    return cfg;
}

}  // namespace drst
