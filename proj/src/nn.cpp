#include "drst/nn.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "drst/rng.hpp"

namespace drst {

using nlohmann::json;

const char* activation_name(Activation a) { return a == Activation::relu ? "relu" : "tanh"; }

Activation activation_from_name(const std::string& s) {
    if (s == "relu") return Activation::relu;
    if (s == "tanh") return Activation::tanh_act;
    fail(Errc::parse_error, "unknown activation '" + s + "'");
}

void MlpConfig::validate() const {
    if (hidden_layers < 0 || hidden_layers > 4)
        fail(Errc::invalid_spec, "hidden_layers must be in [0,4]");
    if (hidden_width < 1 || hidden_width > 64)
        fail(Errc::invalid_spec, "hidden_width must be in [1,64]");
    if (l2_alpha < 0.0) fail(Errc::invalid_spec, "l2_alpha must be >= 0");
    if (learning_rate <= 0.0) fail(Errc::invalid_spec, "learning_rate must be > 0");
    if (batch_size < 1) fail(Errc::invalid_spec, "batch_size must be >= 1");
    if (epochs < 1) fail(Errc::invalid_spec, "epochs must be >= 1");
}

void MlpModel::validate() const {
    if (layers.empty()) fail(Errc::invalid_spec, "model has no layers");
    if (layers.back().out != 1) fail(Errc::invalid_spec, "output layer must be scalar");
    int prev = layers.front().in;
    for (const auto& l : layers) {
        if (l.in != prev) fail(Errc::invalid_spec, "layer shapes do not chain");
        if (l.w.size() != static_cast<std::size_t>(l.in) * l.out ||
            l.b.size() != static_cast<std::size_t>(l.out))
            fail(Errc::invalid_spec, "layer buffer sizes inconsistent");
        prev = l.out;
        for (double v : l.w)
            if (!std::isfinite(v)) fail(Errc::non_finite_parameter, "weight not finite");
        for (double v : l.b)
            if (!std::isfinite(v)) fail(Errc::non_finite_parameter, "bias not finite");
    }
    if (!std::isfinite(y_mean) || !std::isfinite(y_std) || y_std <= 0.0)
        fail(Errc::non_finite_parameter, "target scaling not finite");
}

namespace {

double activate(Activation a, double z) {
    return a == Activation::relu ? std::max(0.0, z) : std::tanh(z);
}

double activate_grad(Activation a, double z, double act) {
    if (a == Activation::relu) return z > 0.0 ? 1.0 : 0.0;
    return 1.0 - act * act;  // tanh'
}

// forward pass keeping pre-activations and activations for backprop
struct ForwardCache {
    std::vector<std::vector<double>> acts;  // acts[0] = input, acts[L] = net output
    std::vector<std::vector<double>> zs;    // pre-activation per layer
};

double forward_cached(const MlpModel& m, std::span<const double> x, ForwardCache* cache) {
    if (x.size() != static_cast<std::size_t>(m.input_arity()))
        fail(Errc::arity_mismatch, "input arity does not match model");
    std::vector<double> cur(x.begin(), x.end());
    if (cache) {
        cache->acts.clear();
        cache->zs.clear();
        cache->acts.push_back(cur);
    }
    const std::size_t L = m.layers.size();
    for (std::size_t l = 0; l < L; ++l) {
        const auto& layer = m.layers[l];
        std::vector<double> z(layer.out);
        for (int o = 0; o < layer.out; ++o) {
            double acc = layer.b[o];
            const double* row = layer.w.data() + static_cast<std::size_t>(o) * layer.in;
            for (int i = 0; i < layer.in; ++i) acc += row[i] * cur[i];
            z[o] = acc;
        }
        const bool last = (l + 1 == L);
        std::vector<double> a(layer.out);
        for (int o = 0; o < layer.out; ++o) a[o] = last ? z[o] : activate(m.activation, z[o]);
        if (cache) {
            cache->zs.push_back(std::move(z));
            cache->acts.push_back(a);
        }
        cur = std::move(a);
    }
    return cur[0];
}

}  // namespace

MlpModel mlp_init(int input_arity, const MlpConfig& config) {
    config.validate();
    if (input_arity < 1) fail(Errc::invalid_spec, "input arity must be >= 1");
    MlpModel m;
    m.activation = config.activation;
    m.config = config;
    Rng rng(config.seed);
    int in = input_arity;
    for (int l = 0; l <= config.hidden_layers; ++l) {
        const bool last = (l == config.hidden_layers);
        MlpModel::Layer layer;
        layer.in = in;
        layer.out = last ? 1 : config.hidden_width;
        const double limit = std::sqrt(6.0 / static_cast<double>(layer.in + layer.out));
        layer.w.resize(static_cast<std::size_t>(layer.in) * layer.out);
        for (auto& w : layer.w) w = rng.uniform(-limit, limit);
        layer.b.assign(layer.out, 0.0);
        in = layer.out;
        m.layers.push_back(std::move(layer));
    }
    return m;
}

double mlp_forward(const MlpModel& model, std::span<const double> x) {
    const double net = forward_cached(model, x, nullptr);
    const double y = net * model.y_std + model.y_mean;
    if (!std::isfinite(y)) fail(Errc::non_finite_parameter, "forward produced non-finite value");
    return y;
}

double mlp_data_loss(const MlpModel& model, const Dataset& batch) {
    if (batch.size() == 0) fail(Errc::empty_data, "empty batch");
    double acc = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const double net = forward_cached(model, batch.inputs[i], nullptr);
        const double d = net * model.y_std + model.y_mean - batch.targets[i];
        acc += d * d;
    }
    return acc / static_cast<double>(batch.size());
}

double mlp_objective(const MlpModel& model, const Dataset& batch) {
    double reg = 0.0;
    for (const auto& l : model.layers) {
        for (double w : l.w) reg += w * w;
        for (double b : l.b) reg += b * b;
    }
    return mlp_data_loss(model, batch) + 0.5 * model.config.l2_alpha * reg;
}

std::size_t mlp_param_count(const MlpModel& model) {
    std::size_t n = 0;
    for (const auto& l : model.layers) n += l.w.size() + l.b.size();
    return n;
}

std::vector<double> mlp_get_params(const MlpModel& model) {
    std::vector<double> out;
    out.reserve(mlp_param_count(model));
    for (const auto& l : model.layers) {
        out.insert(out.end(), l.w.begin(), l.w.end());
        out.insert(out.end(), l.b.begin(), l.b.end());
    }
    return out;
}

void mlp_set_params(MlpModel& model, std::span<const double> params) {
    if (params.size() != mlp_param_count(model))
        fail(Errc::arity_mismatch, "parameter count mismatch");
    std::size_t k = 0;
    for (auto& l : model.layers) {
        for (auto& w : l.w) w = params[k++];
        for (auto& b : l.b) b = params[k++];
    }
}

std::vector<double> mlp_gradients(const MlpModel& model, const Dataset& batch) {
    if (batch.size() == 0) fail(Errc::empty_data, "empty batch");
    const std::size_t L = model.layers.size();
    std::vector<std::vector<double>> gw(L), gb(L);
    for (std::size_t l = 0; l < L; ++l) {
        gw[l].assign(model.layers[l].w.size(), 0.0);
        gb[l].assign(model.layers[l].b.size(), 0.0);
    }

    const double inv_n = 1.0 / static_cast<double>(batch.size());
    ForwardCache cache;
    for (std::size_t s = 0; s < batch.size(); ++s) {
        const double net = forward_cached(model, batch.inputs[s], &cache);
        const double pred = net * model.y_std + model.y_mean;
        // d/dnet of (1/n)(pred - y)^2
        double delta_out = 2.0 * inv_n * (pred - batch.targets[s]) * model.y_std;

        std::vector<double> delta = {delta_out};
        for (std::size_t li = L; li-- > 0;) {
            const auto& layer = model.layers[li];
            const auto& a_in = cache.acts[li];
            for (int o = 0; o < layer.out; ++o) {
                const double d = delta[o];
                double* grow = gw[li].data() + static_cast<std::size_t>(o) * layer.in;
                for (int i = 0; i < layer.in; ++i) grow[i] += d * a_in[i];
                gb[li][o] += d;
            }
            if (li == 0) break;
            std::vector<double> prev(layer.in, 0.0);
            for (int o = 0; o < layer.out; ++o) {
                const double d = delta[o];
                const double* row = layer.w.data() + static_cast<std::size_t>(o) * layer.in;
                for (int i = 0; i < layer.in; ++i) prev[i] += d * row[i];
            }
            const auto& z_prev = cache.zs[li - 1];
            const auto& a_prev = cache.acts[li];
            (void)a_prev;
            for (int i = 0; i < model.layers[li - 1].out; ++i) {
                const double act = cache.acts[li][i];
                prev[i] *= activate_grad(model.activation, z_prev[i], act);
            }
            delta = std::move(prev);
        }
    }

    // L2 term: alpha * theta over every parameter
    std::vector<double> flat;
    flat.reserve(mlp_param_count(model));
    const double alpha = model.config.l2_alpha;
    for (std::size_t l = 0; l < L; ++l) {
        const auto& layer = model.layers[l];
        for (std::size_t i = 0; i < layer.w.size(); ++i) flat.push_back(gw[l][i] + alpha * layer.w[i]);
        for (std::size_t i = 0; i < layer.b.size(); ++i) flat.push_back(gb[l][i] + alpha * layer.b[i]);
    }
    return flat;
}

std::vector<double> mlp_input_gradient(const MlpModel& model, std::span<const double> x) {
    ForwardCache cache;
    forward_cached(model, x, &cache);
    const std::size_t L = model.layers.size();
    std::vector<double> delta = {model.y_std};
    for (std::size_t li = L; li-- > 0;) {
        const auto& layer = model.layers[li];
        std::vector<double> prev(layer.in, 0.0);
        for (int o = 0; o < layer.out; ++o) {
            const double d = delta[o];
            const double* row = layer.w.data() + static_cast<std::size_t>(o) * layer.in;
            for (int i = 0; i < layer.in; ++i) prev[i] += d * row[i];
        }
        if (li > 0) {
            const auto& z_prev = cache.zs[li - 1];
            for (int i = 0; i < model.layers[li - 1].out; ++i)
                prev[i] *= activate_grad(model.activation, z_prev[i], cache.acts[li][i]);
        }
        delta = std::move(prev);
    }
    return delta;
}

namespace {

void fisher_yates(std::vector<std::size_t>& idx, Rng& rng) {
    for (std::size_t i = idx.size(); i-- > 1;) {
        const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i)));
        std::swap(idx[i], idx[j]);
    }
}

}  // namespace

std::pair<MlpModel, TrainReport> mlp_train(const Dataset& data, const MlpConfig& config,
                                           const std::string& schema_hash) {
    config.validate();
    if (data.size() == 0) fail(Errc::empty_data, "no training samples");
    if (data.size() < static_cast<std::size_t>(config.batch_size))
        fail(Errc::empty_data, "fewer samples than batch_size");
    if (data.inputs.size() != data.targets.size())
        fail(Errc::length_mismatch, "inputs/targets size mismatch");
    for (double y : data.targets)
        if (!std::isfinite(y)) fail(Errc::non_finite_value, "non-finite target");

    const auto t0 = std::chrono::steady_clock::now();
    MlpModel model = mlp_init(static_cast<int>(data.inputs.front().size()), config);
    model.input_schema_hash = schema_hash;

    // standardize targets; predictions fold the scale back in
    const double n = static_cast<double>(data.size());
    double mean = std::accumulate(data.targets.begin(), data.targets.end(), 0.0) / n;
    double ss = 0.0;
    for (double y : data.targets) ss += (y - mean) * (y - mean);
    const double std_dev = std::sqrt(ss / n);
    model.y_mean = mean;
    model.y_std = std_dev > 0.0 ? std_dev : 1.0;

    const std::size_t param_count = mlp_param_count(model);
    std::vector<double> m_est(param_count, 0.0), v_est(param_count, 0.0);
    std::vector<double> params = mlp_get_params(model);
    const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    std::uint64_t step = 0;

    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng(mix_seed(config.seed, 0x5f1eull));

    TrainReport report;
    Dataset batch;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        fisher_yates(order, shuffle_rng);
        for (std::size_t start = 0; start < data.size(); start += config.batch_size) {
            const std::size_t stop = std::min(data.size(), start + config.batch_size);
            batch.inputs.clear();
            batch.targets.clear();
            for (std::size_t k = start; k < stop; ++k) {
                batch.inputs.push_back(data.inputs[order[k]]);
                batch.targets.push_back(data.targets[order[k]]);
            }
            const std::vector<double> grad = mlp_gradients(model, batch);
            ++step;
            const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
            const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
            for (std::size_t p = 0; p < param_count; ++p) {
                m_est[p] = beta1 * m_est[p] + (1.0 - beta1) * grad[p];
                v_est[p] = beta2 * v_est[p] + (1.0 - beta2) * grad[p] * grad[p];
                params[p] -= config.learning_rate * (m_est[p] / bc1) /
                             (std::sqrt(v_est[p] / bc2) + eps);
            }
            mlp_set_params(model, params);
        }
        const double epoch_loss = mlp_objective(model, data);
        if (!std::isfinite(epoch_loss)) fail(Errc::diverged_training, "loss became non-finite");
        report.loss_curve.push_back(epoch_loss);
    }

    report.final_loss = report.loss_curve.back();
    report.samples_seen = data.size() * static_cast<std::size_t>(config.epochs);
    report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(model), std::move(report)};
}

namespace {

json config_to_json(const MlpConfig& c) {
    json doc;
    doc["hidden_layers"] = c.hidden_layers;
    doc["hidden_width"] = c.hidden_width;
    doc["activation"] = activation_name(c.activation);
    doc["l2_alpha"] = c.l2_alpha;
    doc["learning_rate"] = c.learning_rate;
    doc["batch_size"] = c.batch_size;
    doc["epochs"] = c.epochs;
    doc["seed"] = c.seed;
    return doc;
}

MlpConfig config_from_json(const json& doc) {
    MlpConfig c;
    c.hidden_layers = doc.at("hidden_layers").get<int>();
    c.hidden_width = doc.at("hidden_width").get<int>();
    c.activation = activation_from_name(doc.at("activation").get<std::string>());
    c.l2_alpha = doc.at("l2_alpha").get<double>();
    c.learning_rate = doc.at("learning_rate").get<double>();
    c.batch_size = doc.at("batch_size").get<int>();
    c.epochs = doc.at("epochs").get<int>();
    c.seed = doc.at("seed").get<std::uint64_t>();
    return c;
}

}  // namespace

std::string mlp_to_json(const MlpModel& model) {
    json doc;
    doc["kind"] = "mlp";
    doc["config"] = config_to_json(model.config);
    doc["activation"] = activation_name(model.activation);
    doc["schema_hash"] = model.input_schema_hash;
    if (model.schema) doc["schema"] = json::parse(model.schema->to_json());
    doc["y_mean"] = model.y_mean;
    doc["y_std"] = model.y_std;
    json layers = json::array();
    for (const auto& l : model.layers) {
        json jl;
        jl["in"] = l.in;
        jl["out"] = l.out;
        jl["w"] = l.w;
        jl["b"] = l.b;
        layers.push_back(std::move(jl));
    }
    doc["layers"] = std::move(layers);
    return doc.dump();
}

MlpModel mlp_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(Errc::parse_error, std::string("mlp payload: ") + e.what());
    }
    if (doc.value("kind", "") != "mlp") fail(Errc::parse_error, "payload is not an mlp");
    MlpModel m;
    m.config = config_from_json(doc.at("config"));
    m.activation = activation_from_name(doc.at("activation").get<std::string>());
    m.input_schema_hash = doc.value("schema_hash", "");
    if (doc.contains("schema")) m.schema = FeatureSchema::from_json(doc["schema"].dump());
    m.y_mean = doc.at("y_mean").get<double>();
    m.y_std = doc.at("y_std").get<double>();
    for (const auto& jl : doc.at("layers")) {
        MlpModel::Layer l;
        l.in = jl.at("in").get<int>();
        l.out = jl.at("out").get<int>();
        l.w = jl.at("w").get<std::vector<double>>();
        l.b = jl.at("b").get<std::vector<double>>();
        m.layers.push_back(std::move(l));
    }
    m.validate();
    return m;
}

const char* grid_budget_name(GridBudget b) {
    switch (b) {
        case GridBudget::s1_light: return "s1_light";
        case GridBudget::s2_moderate: return "s2_moderate";
        case GridBudget::sk_full: return "sk_full";
    }
    return "?";
}

std::vector<std::string> grid_axes(GridBudget budget) {
    switch (budget) {
        case GridBudget::s1_light:
            return {"learning_rate", "batch_size"};
        case GridBudget::s2_moderate:
            // the ladder's "optimizer" axis maps to the Adam learning rate,
            // the only optimizer knob exposed here
            return {"depth", "activation", "learning_rate"};
        case GridBudget::sk_full:
            return {"learning_rate", "batch_size", "depth", "width", "activation", "l2_alpha"};
    }
    return {};
}

GridResult grid_search(const Dataset& data, const MlpGrid& grid, GridBudget budget,
                       const std::string& schema_hash) {
    if (data.size() < 5) fail(Errc::empty_data, "grid_search needs >= 5 samples");
    const auto axes = grid_axes(budget);
    auto has_axis = [&](const char* name) {
        return std::find(axes.begin(), axes.end(), name) != axes.end();
    };

    const std::vector<double> lrs =
        has_axis("learning_rate") ? grid.learning_rates : std::vector<double>{grid.base.learning_rate};
    const std::vector<int> batches =
        has_axis("batch_size") ? grid.batch_sizes : std::vector<int>{grid.base.batch_size};
    const std::vector<int> depths =
        has_axis("depth") ? grid.depths : std::vector<int>{grid.base.hidden_layers};
    const std::vector<int> widths =
        has_axis("width") ? grid.widths : std::vector<int>{grid.base.hidden_width};
    const std::vector<Activation> acts =
        has_axis("activation") ? grid.activations : std::vector<Activation>{grid.base.activation};
    const std::vector<double> alphas =
        has_axis("l2_alpha") ? grid.l2_alphas : std::vector<double>{grid.base.l2_alpha};

    if (lrs.empty() || batches.empty() || depths.empty() || widths.empty() || acts.empty() ||
        alphas.empty())
        fail(Errc::empty_grid, "a lattice axis is empty");

    // fixed chronological split: first 80% train, last 20% validation
    const std::size_t n_train = std::max<std::size_t>(1, data.size() * 4 / 5);
    Dataset train, val;
    train.inputs.assign(data.inputs.begin(), data.inputs.begin() + n_train);
    train.targets.assign(data.targets.begin(), data.targets.begin() + n_train);
    val.inputs.assign(data.inputs.begin() + n_train, data.inputs.end());
    val.targets.assign(data.targets.begin() + n_train, data.targets.end());

    GridResult result;
    result.axes = axes;
    bool have_best = false;

    for (double lr : lrs)
        for (int bs : batches)
            for (int depth : depths)
                for (int width : widths)
                    for (Activation act : acts)
                        for (double alpha : alphas) {
                            MlpConfig c = grid.base;
                            c.learning_rate = lr;
                            c.batch_size = bs;
                            c.hidden_layers = depth;
                            c.hidden_width = width;
                            c.activation = act;
                            c.l2_alpha = alpha;

                            GridCandidate cand;
                            cand.config = c;
                            try {
                                auto [model, report] = mlp_train(train, c, schema_hash);
                                cand.val_loss = mlp_data_loss(model, val);
                                if (!std::isfinite(cand.val_loss))
                                    fail(Errc::diverged_training, "validation loss non-finite");
                                if (!have_best || cand.val_loss < result.best_val_loss) {
                                    have_best = true;
                                    result.best_val_loss = cand.val_loss;
                                    result.best_config = c;
                                    result.best_model = std::move(model);
                                    result.best_report = std::move(report);
                                }
                            } catch (const Error& e) {
                                cand.failed = true;
                                cand.error = e.what();
                            }
                            result.candidates.push_back(std::move(cand));
                        }

    if (!have_best) fail(Errc::training_failed, "every grid candidate failed");
    return result;
}

}  // namespace drst
