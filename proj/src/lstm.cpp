#include "drst/lstm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "drst/rng.hpp"

namespace drst {

using nlohmann::json;

namespace {
constexpr int GI = 0;  // input gate
constexpr int GF = 1;  // forget gate
constexpr int GO = 2;  // output gate
constexpr int GG = 3;  // candidate

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }
}  // namespace

void LstmConfig::validate() const {
    if (layers < 1 || layers > 3) fail(Errc::invalid_spec, "layers must be in [1,3]");
    if (hidden_dim < 32 || hidden_dim > 128)
        fail(Errc::invalid_spec, "hidden_dim must be in [32,128]");
    if (input_window < 1) fail(Errc::invalid_spec, "input_window must be >= 1");
    if (horizon < 1) fail(Errc::invalid_spec, "horizon must be >= 1");
    if (learning_rate <= 0.0) fail(Errc::invalid_spec, "learning_rate must be > 0");
    if (batch_size < 1) fail(Errc::invalid_spec, "batch_size must be >= 1");
    if (epochs < 1) fail(Errc::invalid_spec, "epochs must be >= 1");
}

void LstmModel::validate() const {
    if (layers.empty()) fail(Errc::invalid_spec, "lstm has no layers");
    int prev_out = layers.front().in;
    for (const auto& l : layers) {
        if (l.in != prev_out) fail(Errc::invalid_spec, "lstm layer shapes do not chain");
        for (int g = 0; g < 4; ++g) {
            if (l.w[g].size() != static_cast<std::size_t>(l.hidden) * l.in ||
                l.u[g].size() != static_cast<std::size_t>(l.hidden) * l.hidden ||
                l.b[g].size() != static_cast<std::size_t>(l.hidden))
                fail(Errc::invalid_spec, "lstm gate buffer sizes inconsistent");
            for (double v : l.w[g])
                if (!std::isfinite(v)) fail(Errc::non_finite_parameter, "gate weight not finite");
            for (double v : l.u[g])
                if (!std::isfinite(v)) fail(Errc::non_finite_parameter, "gate weight not finite");
            for (double v : l.b[g])
                if (!std::isfinite(v)) fail(Errc::non_finite_parameter, "gate bias not finite");
        }
        prev_out = l.hidden;
    }
    const int hidden_top = layers.back().hidden;
    if (readout_w.size() != static_cast<std::size_t>(config.horizon) * hidden_top ||
        readout_b.size() != static_cast<std::size_t>(config.horizon))
        fail(Errc::invalid_spec, "readout sizes inconsistent");
    if (!std::isfinite(y_mean) || !std::isfinite(y_std) || y_std <= 0.0)
        fail(Errc::non_finite_parameter, "target scaling not finite");
}

WindowDataset make_supervised(const std::vector<std::vector<double>>& features,
                              const std::vector<double>& targets, int input_window, int horizon) {
    if (features.size() != targets.size())
        fail(Errc::length_mismatch, "features/targets size mismatch");
    WindowDataset out;
    const std::size_t n = features.size();
    const auto N = static_cast<std::size_t>(input_window);
    const auto H = static_cast<std::size_t>(horizon);
    if (n < N + H) return out;
    for (std::size_t end = N - 1; end + H < n; ++end) {
        WindowSample s;
        s.window.assign(features.begin() + (end + 1 - N), features.begin() + (end + 1));
        s.targets.assign(targets.begin() + (end + 1), targets.begin() + (end + 1 + H));
        s.base_index = end;
        out.samples.push_back(std::move(s));
    }
    return out;
}

LstmModel lstm_init(int input_arity, const LstmConfig& config) {
    config.validate();
    if (input_arity < 1) fail(Errc::invalid_spec, "input arity must be >= 1");
    LstmModel m;
    m.config = config;
    Rng rng(config.seed);
    int in = input_arity;
    for (int l = 0; l < config.layers; ++l) {
        LstmModel::Layer layer;
        layer.in = in;
        layer.hidden = config.hidden_dim;
        const double wlim = std::sqrt(6.0 / static_cast<double>(layer.in + layer.hidden));
        const double ulim = std::sqrt(6.0 / static_cast<double>(2 * layer.hidden));
        for (int g = 0; g < 4; ++g) {
            layer.w[g].resize(static_cast<std::size_t>(layer.hidden) * layer.in);
            for (auto& v : layer.w[g]) v = rng.uniform(-wlim, wlim);
            layer.u[g].resize(static_cast<std::size_t>(layer.hidden) * layer.hidden);
            for (auto& v : layer.u[g]) v = rng.uniform(-ulim, ulim);
            // forget gate starts open so gradients flow through early epochs
            layer.b[g].assign(layer.hidden, g == GF ? 1.0 : 0.0);
        }
        in = layer.hidden;
        m.layers.push_back(std::move(layer));
    }
    const double rlim = std::sqrt(6.0 / static_cast<double>(config.hidden_dim + config.horizon));
    m.readout_w.resize(static_cast<std::size_t>(config.horizon) * config.hidden_dim);
    for (auto& v : m.readout_w) v = rng.uniform(-rlim, rlim);
    m.readout_b.assign(config.horizon, 0.0);
    return m;
}

namespace {

// per-layer, per-step activations kept for BPTT
struct LstmCache {
    // [layer][t][hidden]
    std::vector<std::vector<std::vector<double>>> gate[4];
    std::vector<std::vector<std::vector<double>>> cell;
    std::vector<std::vector<std::vector<double>>> hidden;
    std::vector<std::vector<std::vector<double>>> input;  // x fed to each layer per step
};

// raw (standardized-space) readout of the window; fills cache when given
std::vector<double> lstm_net_forward(const LstmModel& m,
                                     const std::vector<std::vector<double>>& window,
                                     LstmCache* cache) {
    const auto N = window.size();
    if (N != static_cast<std::size_t>(m.config.input_window))
        fail(Errc::window_length_mismatch, "window length does not match model");
    const std::size_t L = m.layers.size();
    for (const auto& row : window)
        if (row.size() != static_cast<std::size_t>(m.input_arity()))
            fail(Errc::arity_mismatch, "window row arity does not match model");

    if (cache) {
        for (int g = 0; g < 4; ++g)
            cache->gate[g].assign(L, std::vector<std::vector<double>>(N));
        cache->cell.assign(L, std::vector<std::vector<double>>(N));
        cache->hidden.assign(L, std::vector<std::vector<double>>(N));
        cache->input.assign(L, std::vector<std::vector<double>>(N));
    }

    std::vector<std::vector<double>> h(L), c(L);
    for (std::size_t l = 0; l < L; ++l) {
        h[l].assign(m.layers[l].hidden, 0.0);
        c[l].assign(m.layers[l].hidden, 0.0);
    }

    std::vector<double> x;
    for (std::size_t t = 0; t < N; ++t) {
        x = window[t];
        for (std::size_t l = 0; l < L; ++l) {
            const auto& layer = m.layers[l];
            const int hid = layer.hidden;
            std::vector<double> acts[4];
            for (int g = 0; g < 4; ++g) {
                acts[g].resize(hid);
                for (int r = 0; r < hid; ++r) {
                    double acc = layer.b[g][r];
                    const double* wrow = layer.w[g].data() + static_cast<std::size_t>(r) * layer.in;
                    for (int i = 0; i < layer.in; ++i) acc += wrow[i] * x[i];
                    const double* urow = layer.u[g].data() + static_cast<std::size_t>(r) * hid;
                    for (int i = 0; i < hid; ++i) acc += urow[i] * h[l][i];
                    acts[g][r] = (g == GG) ? std::tanh(acc) : sigmoid(acc);
                }
            }
            std::vector<double> c_new(hid), h_new(hid);
            for (int r = 0; r < hid; ++r) {
                c_new[r] = acts[GF][r] * c[l][r] + acts[GI][r] * acts[GG][r];
                if (!std::isfinite(c_new[r]))
                    fail(Errc::non_finite_parameter, "cell state diverged");
                h_new[r] = acts[GO][r] * std::tanh(c_new[r]);
            }
            if (cache) {
                for (int g = 0; g < 4; ++g) cache->gate[g][l][t] = acts[g];
                cache->cell[l][t] = c_new;
                cache->hidden[l][t] = h_new;
                cache->input[l][t] = x;
            }
            c[l] = std::move(c_new);
            h[l] = h_new;
            x = std::move(h_new);
        }
    }

    const auto& h_top = h[L - 1];
    const int H = m.config.horizon;
    std::vector<double> out(H);
    for (int k = 0; k < H; ++k) {
        double acc = m.readout_b[k];
        const double* row = m.readout_w.data() + static_cast<std::size_t>(k) * m.layers.back().hidden;
        for (int i = 0; i < m.layers.back().hidden; ++i) acc += row[i] * h_top[i];
        out[k] = acc;
    }
    return out;
}

}  // namespace

std::vector<double> lstm_eval(const LstmModel& model,
                              const std::vector<std::vector<double>>& window) {
    std::vector<double> out = lstm_net_forward(model, window, nullptr);
    for (auto& v : out) {
        v = v * model.y_std + model.y_mean;
        if (!std::isfinite(v)) fail(Errc::non_finite_parameter, "forecast not finite");
    }
    return out;
}

ForecastResult lstm_forward(const LstmModel& model, std::span<const FeatureVector> window) {
    std::vector<std::vector<double>> rows;
    rows.reserve(window.size());
    for (const auto& v : window) rows.push_back(v.values);
    ForecastResult res;
    res.values = lstm_eval(model, rows);
    if (!window.empty()) res.base_timestamp_ms = window.back().timestamp_ms;
    return res;
}

double lstm_objective(const LstmModel& model, const WindowDataset& batch) {
    if (batch.size() == 0) fail(Errc::empty_data, "empty batch");
    const int H = model.config.horizon;
    double acc = 0.0;
    for (const auto& s : batch.samples) {
        if (s.targets.size() != static_cast<std::size_t>(H))
            fail(Errc::length_mismatch, "target trajectory length != horizon");
        const std::vector<double> net = lstm_net_forward(model, s.window, nullptr);
        for (int k = 0; k < H; ++k) {
            const double d = net[k] * model.y_std + model.y_mean - s.targets[k];
            acc += d * d;
        }
    }
    return acc / (static_cast<double>(batch.size()) * H);
}

std::size_t lstm_param_count(const LstmModel& model) {
    std::size_t n = 0;
    for (const auto& l : model.layers)
        for (int g = 0; g < 4; ++g) n += l.w[g].size() + l.u[g].size() + l.b[g].size();
    return n + model.readout_w.size() + model.readout_b.size();
}

std::vector<double> lstm_get_params(const LstmModel& model) {
    std::vector<double> out;
    out.reserve(lstm_param_count(model));
    for (const auto& l : model.layers)
        for (int g = 0; g < 4; ++g) {
            out.insert(out.end(), l.w[g].begin(), l.w[g].end());
            out.insert(out.end(), l.u[g].begin(), l.u[g].end());
            out.insert(out.end(), l.b[g].begin(), l.b[g].end());
        }
    out.insert(out.end(), model.readout_w.begin(), model.readout_w.end());
    out.insert(out.end(), model.readout_b.begin(), model.readout_b.end());
    return out;
}

void lstm_set_params(LstmModel& model, std::span<const double> params) {
    if (params.size() != lstm_param_count(model))
        fail(Errc::arity_mismatch, "parameter count mismatch");
    std::size_t k = 0;
    for (auto& l : model.layers)
        for (int g = 0; g < 4; ++g) {
            for (auto& v : l.w[g]) v = params[k++];
            for (auto& v : l.u[g]) v = params[k++];
            for (auto& v : l.b[g]) v = params[k++];
        }
    for (auto& v : model.readout_w) v = params[k++];
    for (auto& v : model.readout_b) v = params[k++];
}

std::vector<double> lstm_gradients(const LstmModel& model, const WindowDataset& batch) {
    if (batch.size() == 0) fail(Errc::empty_data, "empty batch");
    const std::size_t L = model.layers.size();
    const auto N = static_cast<std::size_t>(model.config.input_window);
    const int H = model.config.horizon;

    // gradient accumulators mirroring the parameter layout
    std::vector<std::array<std::vector<double>, 4>> gw(L), gu(L), gb(L);
    for (std::size_t l = 0; l < L; ++l)
        for (int g = 0; g < 4; ++g) {
            gw[l][g].assign(model.layers[l].w[g].size(), 0.0);
            gu[l][g].assign(model.layers[l].u[g].size(), 0.0);
            gb[l][g].assign(model.layers[l].b[g].size(), 0.0);
        }
    std::vector<double> grw(model.readout_w.size(), 0.0), grb(model.readout_b.size(), 0.0);

    const double scale = 2.0 / (static_cast<double>(batch.size()) * H);
    LstmCache cache;
    for (const auto& s : batch.samples) {
        const std::vector<double> net = lstm_net_forward(model, s.window, &cache);

        std::vector<double> dy(H);
        for (int k = 0; k < H; ++k) {
            const double pred = net[k] * model.y_std + model.y_mean;
            dy[k] = scale * (pred - s.targets[k]) * model.y_std;
        }

        // head gradients and the seed of dh at the top layer, final step
        const int hid_top = model.layers.back().hidden;
        std::vector<double> dh_seed(hid_top, 0.0);
        const auto& h_final = cache.hidden[L - 1][N - 1];
        for (int k = 0; k < H; ++k) {
            double* row = grw.data() + static_cast<std::size_t>(k) * hid_top;
            for (int i = 0; i < hid_top; ++i) {
                row[i] += dy[k] * h_final[i];
                dh_seed[i] += dy[k] * model.readout_w[static_cast<std::size_t>(k) * hid_top + i];
            }
            grb[k] += dy[k];
        }

        // per-layer running gradients flowing backwards in time
        std::vector<std::vector<double>> dh_next(L), dc_next(L);
        for (std::size_t l = 0; l < L; ++l) {
            dh_next[l].assign(model.layers[l].hidden, 0.0);
            dc_next[l].assign(model.layers[l].hidden, 0.0);
        }
        std::vector<std::vector<double>> dx_above(N);  // dx from layer l+1 at each t

        for (std::size_t li = L; li-- > 0;) {
            const auto& layer = model.layers[li];
            const int hid = layer.hidden;
            std::vector<std::vector<double>> dx_below(N);
            std::vector<double> dh(hid), dc(hid, 0.0);
            std::fill(dh_next[li].begin(), dh_next[li].end(), 0.0);
            std::fill(dc_next[li].begin(), dc_next[li].end(), 0.0);

            for (std::size_t t = N; t-- > 0;) {
                for (int r = 0; r < hid; ++r) dh[r] = dh_next[li][r];
                if (li == L - 1 && t == N - 1)
                    for (int r = 0; r < hid; ++r) dh[r] += dh_seed[r];
                if (li + 1 < L && !dx_above[t].empty())
                    for (int r = 0; r < hid; ++r) dh[r] += dx_above[t][r];
                for (int r = 0; r < hid; ++r) dc[r] = dc_next[li][r];

                const auto& gi = cache.gate[GI][li][t];
                const auto& gf = cache.gate[GF][li][t];
                const auto& go = cache.gate[GO][li][t];
                const auto& gg = cache.gate[GG][li][t];
                const auto& ct = cache.cell[li][t];
                const auto& x_in = cache.input[li][t];
                const std::vector<double>* c_prev = (t > 0) ? &cache.cell[li][t - 1] : nullptr;
                const std::vector<double>* h_prev = (t > 0) ? &cache.hidden[li][t - 1] : nullptr;

                std::vector<double> da[4];
                for (int g = 0; g < 4; ++g) da[g].resize(hid);
                for (int r = 0; r < hid; ++r) {
                    const double tanh_c = std::tanh(ct[r]);
                    const double do_ = dh[r] * tanh_c;
                    const double dct = dc[r] + dh[r] * go[r] * (1.0 - tanh_c * tanh_c);
                    const double di = dct * gg[r];
                    const double dg = dct * gi[r];
                    const double df = dct * (c_prev ? (*c_prev)[r] : 0.0);
                    dc_next[li][r] = dct * gf[r];
                    da[GI][r] = di * gi[r] * (1.0 - gi[r]);
                    da[GF][r] = df * gf[r] * (1.0 - gf[r]);
                    da[GO][r] = do_ * go[r] * (1.0 - go[r]);
                    da[GG][r] = dg * (1.0 - gg[r] * gg[r]);
                }

                std::vector<double>& dx = dx_below[t];
                dx.assign(layer.in, 0.0);
                std::fill(dh_next[li].begin(), dh_next[li].end(), 0.0);
                for (int g = 0; g < 4; ++g) {
                    for (int r = 0; r < hid; ++r) {
                        const double d = da[g][r];
                        if (d == 0.0) continue;
                        double* wg = gw[li][g].data() + static_cast<std::size_t>(r) * layer.in;
                        const double* wrow = layer.w[g].data() + static_cast<std::size_t>(r) * layer.in;
                        for (int i = 0; i < layer.in; ++i) {
                            wg[i] += d * x_in[i];
                            dx[i] += d * wrow[i];
                        }
                        double* ug = gu[li][g].data() + static_cast<std::size_t>(r) * hid;
                        const double* urow = layer.u[g].data() + static_cast<std::size_t>(r) * hid;
                        if (h_prev) {
                            for (int i = 0; i < hid; ++i) {
                                ug[i] += d * (*h_prev)[i];
                                dh_next[li][i] += d * urow[i];
                            }
                        } else {
                            for (int i = 0; i < hid; ++i) dh_next[li][i] += d * urow[i];
                        }
                        gb[li][g][r] += d;
                    }
                }
                // dh_next now holds dh for t-1; dc_next likewise
            }
            dx_above = std::move(dx_below);
        }
    }

    std::vector<double> flat;
    flat.reserve(lstm_param_count(model));
    for (std::size_t l = 0; l < L; ++l)
        for (int g = 0; g < 4; ++g) {
            flat.insert(flat.end(), gw[l][g].begin(), gw[l][g].end());
            flat.insert(flat.end(), gu[l][g].begin(), gu[l][g].end());
            flat.insert(flat.end(), gb[l][g].begin(), gb[l][g].end());
        }
    flat.insert(flat.end(), grw.begin(), grw.end());
    flat.insert(flat.end(), grb.begin(), grb.end());
    return flat;
}

namespace {

void fisher_yates(std::vector<std::size_t>& idx, Rng& rng) {
    for (std::size_t i = idx.size(); i-- > 1;) {
        const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i)));
        std::swap(idx[i], idx[j]);
    }
}

}  // namespace

std::pair<LstmModel, TrainReport> lstm_train(const WindowDataset& data, const LstmConfig& config,
                                             const std::string& schema_hash) {
    config.validate();
    if (data.size() == 0) fail(Errc::empty_data, "no training windows");
    if (data.size() < static_cast<std::size_t>(config.batch_size))
        fail(Errc::empty_data, "fewer windows than batch_size");

    const auto t0 = std::chrono::steady_clock::now();
    LstmModel model = lstm_init(static_cast<int>(data.samples.front().window.front().size()), config);
    model.input_schema_hash = schema_hash;

    double mean = 0.0, count = 0.0;
    for (const auto& s : data.samples)
        for (double y : s.targets) {
            if (!std::isfinite(y)) fail(Errc::non_finite_value, "non-finite target");
            mean += y;
            count += 1.0;
        }
    mean /= count;
    double ss = 0.0;
    for (const auto& s : data.samples)
        for (double y : s.targets) ss += (y - mean) * (y - mean);
    const double std_dev = std::sqrt(ss / count);
    model.y_mean = mean;
    model.y_std = std_dev > 0.0 ? std_dev : 1.0;

    const std::size_t param_count = lstm_param_count(model);
    std::vector<double> m_est(param_count, 0.0), v_est(param_count, 0.0);
    std::vector<double> params = lstm_get_params(model);
    const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    std::uint64_t step = 0;

    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng(mix_seed(config.seed, 0x5f1eull));

    TrainReport report;
    WindowDataset batch;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        fisher_yates(order, shuffle_rng);
        double epoch_loss = 0.0;
        std::size_t n_batches = 0;
        for (std::size_t start = 0; start < data.size(); start += config.batch_size) {
            const std::size_t stop = std::min(data.size(), start + config.batch_size);
            batch.samples.clear();
            for (std::size_t k = start; k < stop; ++k) batch.samples.push_back(data.samples[order[k]]);
            std::vector<double> grad;
            try {
                grad = lstm_gradients(model, batch);
                epoch_loss += lstm_objective(model, batch);
            } catch (const Error& e) {
                if (e.code() == Errc::non_finite_parameter)
                    fail(Errc::diverged_training, "cell state diverged mid-epoch");
                throw;
            }
            ++n_batches;
            ++step;
            const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
            const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
            for (std::size_t p = 0; p < param_count; ++p) {
                m_est[p] = beta1 * m_est[p] + (1.0 - beta1) * grad[p];
                v_est[p] = beta2 * v_est[p] + (1.0 - beta2) * grad[p] * grad[p];
                params[p] -= config.learning_rate * (m_est[p] / bc1) /
                             (std::sqrt(v_est[p] / bc2) + eps);
            }
            lstm_set_params(model, params);
        }
        const double avg = epoch_loss / static_cast<double>(n_batches);
        if (!std::isfinite(avg)) fail(Errc::diverged_training, "loss became non-finite");
        report.loss_curve.push_back(avg);
    }

    report.final_loss = report.loss_curve.back();
    report.samples_seen = data.size() * static_cast<std::size_t>(config.epochs);
    report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(model), std::move(report)};
}

namespace {

json lstm_config_to_json(const LstmConfig& c) {
    json doc;
    doc["layers"] = c.layers;
    doc["hidden_dim"] = c.hidden_dim;
    doc["input_window"] = c.input_window;
    doc["horizon"] = c.horizon;
    doc["learning_rate"] = c.learning_rate;
    doc["batch_size"] = c.batch_size;
    doc["epochs"] = c.epochs;
    doc["seed"] = c.seed;
    return doc;
}

LstmConfig lstm_config_from_json(const json& doc) {
    LstmConfig c;
    c.layers = doc.at("layers").get<int>();
    c.hidden_dim = doc.at("hidden_dim").get<int>();
    c.input_window = doc.at("input_window").get<int>();
    c.horizon = doc.at("horizon").get<int>();
    c.learning_rate = doc.at("learning_rate").get<double>();
    c.batch_size = doc.at("batch_size").get<int>();
    c.epochs = doc.at("epochs").get<int>();
    c.seed = doc.at("seed").get<std::uint64_t>();
    return c;
}

json lstm_to_json_doc(const LstmModel& model) {
    json doc;
    doc["kind"] = "lstm";
    doc["config"] = lstm_config_to_json(model.config);
    doc["schema_hash"] = model.input_schema_hash;
    if (model.schema) doc["schema"] = json::parse(model.schema->to_json());
    doc["y_mean"] = model.y_mean;
    doc["y_std"] = model.y_std;
    json layers = json::array();
    for (const auto& l : model.layers) {
        json jl;
        jl["in"] = l.in;
        jl["hidden"] = l.hidden;
        const char* names[4] = {"wi", "wf", "wo", "wg"};
        const char* unames[4] = {"ui", "uf", "uo", "ug"};
        const char* bnames[4] = {"bi", "bf", "bo", "bg"};
        for (int g = 0; g < 4; ++g) {
            jl[names[g]] = l.w[g];
            jl[unames[g]] = l.u[g];
            jl[bnames[g]] = l.b[g];
        }
        layers.push_back(std::move(jl));
    }
    doc["layers"] = std::move(layers);
    doc["readout_w"] = model.readout_w;
    doc["readout_b"] = model.readout_b;
    return doc;
}

LstmModel lstm_from_json_doc(const json& doc) {
    LstmModel m;
    m.config = lstm_config_from_json(doc.at("config"));
    m.input_schema_hash = doc.value("schema_hash", "");
    if (doc.contains("schema")) m.schema = FeatureSchema::from_json(doc["schema"].dump());
    m.y_mean = doc.at("y_mean").get<double>();
    m.y_std = doc.at("y_std").get<double>();
    const char* names[4] = {"wi", "wf", "wo", "wg"};
    const char* unames[4] = {"ui", "uf", "uo", "ug"};
    const char* bnames[4] = {"bi", "bf", "bo", "bg"};
    for (const auto& jl : doc.at("layers")) {
        LstmModel::Layer l;
        l.in = jl.at("in").get<int>();
        l.hidden = jl.at("hidden").get<int>();
        for (int g = 0; g < 4; ++g) {
            l.w[g] = jl.at(names[g]).get<std::vector<double>>();
            l.u[g] = jl.at(unames[g]).get<std::vector<double>>();
            l.b[g] = jl.at(bnames[g]).get<std::vector<double>>();
        }
        m.layers.push_back(std::move(l));
    }
    m.readout_w = doc.at("readout_w").get<std::vector<double>>();
    m.readout_b = doc.at("readout_b").get<std::vector<double>>();
    m.validate();
    return m;
}

}  // namespace

std::string lstm_to_json(const LstmModel& model) { return lstm_to_json_doc(model).dump(); }

LstmModel lstm_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(Errc::parse_error, std::string("lstm payload: ") + e.what());
    }
    if (doc.value("kind", "") != "lstm") fail(Errc::parse_error, "payload is not an lstm");
    return lstm_from_json_doc(doc);
}

void DirRecChain::validate() const {
    if (members.empty()) fail(Errc::invalid_spec, "empty chain");
    const int base = members.front().input_arity();
    for (std::size_t h = 0; h < members.size(); ++h) {
        members[h].validate();
        if (members[h].config.horizon != 1)
            fail(Errc::invalid_spec, "chain members must be single-step");
        if (members[h].input_arity() != base + static_cast<int>(h))
            fail(Errc::chain_arity_mismatch, "member arity must be base + h - 1");
    }
}

std::vector<double> dirrec_eval(const DirRecChain& chain,
                                const std::vector<std::vector<double>>& window) {
    if (chain.members.empty()) fail(Errc::invalid_spec, "empty chain");
    if (!window.empty() && window.front().size() != static_cast<std::size_t>(chain.base_arity()))
        fail(Errc::chain_arity_mismatch, "window arity does not match chain base");
    const double norm_mean = chain.members.front().y_mean;
    const double norm_std = chain.members.front().y_std;

    std::vector<std::vector<double>> aug = window;
    std::vector<double> out;
    out.reserve(chain.members.size());
    for (std::size_t h = 0; h < chain.members.size(); ++h) {
        const double pred = lstm_eval(chain.members[h], aug)[0];
        out.push_back(pred);
        const double encoded = (pred - norm_mean) / norm_std;
        for (auto& row : aug) row.push_back(encoded);
    }
    return out;
}

ForecastResult dirrec_forecast(const DirRecChain& chain, std::span<const FeatureVector> window) {
    std::vector<std::vector<double>> rows;
    rows.reserve(window.size());
    for (const auto& v : window) rows.push_back(v.values);
    ForecastResult res;
    res.values = dirrec_eval(chain, rows);
    if (!window.empty()) res.base_timestamp_ms = window.back().timestamp_ms;
    return res;
}

std::pair<DirRecChain, TrainReport> dirrec_train(const WindowDataset& data,
                                                 const LstmConfig& config,
                                                 const std::string& schema_hash) {
    config.validate();
    if (data.size() == 0) fail(Errc::empty_data, "no training windows");
    const int H = config.horizon;

    const auto t0 = std::chrono::steady_clock::now();
    DirRecChain chain;
    TrainReport total;

    // running augmented copies of every training window
    std::vector<std::vector<std::vector<double>>> aug;
    aug.reserve(data.size());
    for (const auto& s : data.samples) aug.push_back(s.window);

    double norm_mean = 0.0, norm_std = 1.0;
    for (int h = 0; h < H; ++h) {
        LstmConfig member_cfg = config;
        member_cfg.horizon = 1;
        member_cfg.seed = mix_seed(config.seed, static_cast<std::uint64_t>(h));

        WindowDataset step;
        step.samples.reserve(data.size());
        for (std::size_t s = 0; s < data.size(); ++s) {
            WindowSample ws;
            ws.window = aug[s];
            ws.targets = {data.samples[s].targets[h]};
            ws.base_index = data.samples[s].base_index;
            step.samples.push_back(std::move(ws));
        }

        auto [member, report] = lstm_train(step, member_cfg, schema_hash);
        if (h == 0) {
            norm_mean = member.y_mean;
            norm_std = member.y_std;
        }
        if (h + 1 < H) {
            for (std::size_t s = 0; s < data.size(); ++s) {
                const double pred = lstm_eval(member, aug[s])[0];
                const double encoded = (pred - norm_mean) / norm_std;
                for (auto& row : aug[s]) row.push_back(encoded);
            }
        }
        total.loss_curve.insert(total.loss_curve.end(), report.loss_curve.begin(),
                                report.loss_curve.end());
        total.final_loss = report.final_loss;
        total.samples_seen += report.samples_seen;
        chain.members.push_back(std::move(member));
    }
    total.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(chain), std::move(total)};
}

std::string dirrec_to_json(const DirRecChain& chain) {
    json doc;
    doc["kind"] = "dirrec";
    json members = json::array();
    for (const auto& m : chain.members) members.push_back(lstm_to_json_doc(m));
    doc["members"] = std::move(members);
    return doc.dump();
}

DirRecChain dirrec_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(Errc::parse_error, std::string("dirrec payload: ") + e.what());
    }
    if (doc.value("kind", "") != "dirrec") fail(Errc::parse_error, "payload is not a dirrec chain");
    DirRecChain chain;
    for (const auto& jm : doc.at("members")) chain.members.push_back(lstm_from_json_doc(jm));
    chain.validate();
    return chain;
}

RollingForecaster::RollingForecaster(const LstmModel* model, int every_s) : model_(model) {
    if (!model_) fail(Errc::invalid_spec, "rolling forecaster needs a model");
    if (every_s < 1) fail(Errc::invalid_spec, "every_s must be >= 1");
    period_ms_ = static_cast<std::int64_t>(every_s) * 1000;
}

std::vector<RollingEmission> RollingForecaster::push(const FeatureVector& v, std::size_t index) {
    std::vector<RollingEmission> out;
    if (!started_) {
        started_ = true;
        next_boundary_ms_ = v.timestamp_ms + period_ms_;
    }
    window_.push_back(v);
    const auto N = static_cast<std::size_t>(model_->config.input_window);
    if (window_.size() > N) window_.erase(window_.begin());
    last_ts_ = v.timestamp_ms;
    last_index_ = index;

    while (v.timestamp_ms >= next_boundary_ms_) {
        if (window_.size() == N) {
            ForecastResult res = lstm_forward(*model_, window_);
            res.base_index = index;
            out.emplace_back(std::move(res));
            ++forecasts_;
        } else {
            out.emplace_back(GapMarker{v.timestamp_ms, index});
            ++gaps_;
        }
        next_boundary_ms_ += period_ms_;
    }
    return out;
}

std::optional<GapMarker> RollingForecaster::finish() {
    if (forecasts_ == 0 && gaps_ == 0) {
        ++gaps_;
        return GapMarker{last_ts_, last_index_};
    }
    return std::nullopt;
}

}  // namespace drst
