#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace oracle {

double naive_mlp_forward(const drst::MlpModel& model, const std::vector<double>& x) {
    std::vector<double> cur = x;
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const auto& layer = model.layers[l];
        std::vector<double> next(layer.out, 0.0);
        for (int o = 0; o < layer.out; ++o) {
            double acc = layer.b[o];
            for (int i = 0; i < layer.in; ++i)
                acc += layer.w[static_cast<std::size_t>(o) * layer.in + i] * cur[i];
            if (l + 1 < model.layers.size()) {
                acc = model.activation == drst::Activation::relu ? std::max(0.0, acc)
                                                                 : std::tanh(acc);
            }
            next[o] = acc;
        }
        cur = next;
    }
    return cur[0] * model.y_std + model.y_mean;
}

std::vector<double> finite_diff(const std::function<double()>& objective,
                                const std::function<std::vector<double>()>& get,
                                const std::function<void(const std::vector<double>&)>& set,
                                double step, const std::vector<std::size_t>& coords) {
    std::vector<double> params = get();
    std::vector<double> grads;
    grads.reserve(coords.size());
    for (const auto c : coords) {
        const double saved = params[c];
        params[c] = saved + step;
        set(params);
        const double up = objective();
        params[c] = saved - step;
        set(params);
        const double down = objective();
        params[c] = saved;
        set(params);
        grads.push_back((up - down) / (2.0 * step));
    }
    return grads;
}

double textbook_pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double cov = 0.0, vx = 0.0, vy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        cov += (x[i] - mx) * (y[i] - my);
        vx += (x[i] - mx) * (x[i] - mx);
        vy += (y[i] - my) * (y[i] - my);
    }
    return cov / (std::sqrt(vx) * std::sqrt(vy));
}

LineFit normal_equations(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    const double sx = std::accumulate(x.begin(), x.end(), 0.0);
    const double sy = std::accumulate(y.begin(), y.end(), 0.0);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double w = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return {w, (sy - w * sx) / n};
}

std::vector<double> shapley_all_orderings(
    const std::function<double(const std::vector<bool>&)>& value, std::size_t d) {
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> phi(d, 0.0);
    std::size_t count = 0;
    do {
        std::vector<bool> in(d, false);
        double prev = value(in);
        for (const auto j : order) {
            in[j] = true;
            const double cur = value(in);
            phi[j] += cur - prev;
            prev = cur;
        }
        ++count;
    } while (std::next_permutation(order.begin(), order.end()));
    for (auto& p : phi) p /= static_cast<double>(count);
    return phi;
}

std::vector<double> naive_lstm_forward(const drst::LstmModel& model,
                                       const std::vector<std::vector<double>>& window) {
    auto sigmoid = [](double z) { return 1.0 / (1.0 + std::exp(-z)); };
    const std::size_t L = model.layers.size();
    std::vector<std::vector<double>> h(L), c(L);
    for (std::size_t l = 0; l < L; ++l) {
        h[l].assign(model.layers[l].hidden, 0.0);
        c[l].assign(model.layers[l].hidden, 0.0);
    }
    for (const auto& row : window) {
        std::vector<double> x = row;
        for (std::size_t l = 0; l < L; ++l) {
            const auto& layer = model.layers[l];
            std::vector<double> gates[4];
            for (int g = 0; g < 4; ++g) {
                gates[g].resize(layer.hidden);
                for (int r = 0; r < layer.hidden; ++r) {
                    double acc = layer.b[g][r];
                    for (int i = 0; i < layer.in; ++i)
                        acc += layer.w[g][static_cast<std::size_t>(r) * layer.in + i] * x[i];
                    for (int i = 0; i < layer.hidden; ++i)
                        acc += layer.u[g][static_cast<std::size_t>(r) * layer.hidden + i] * h[l][i];
                    gates[g][r] = (g == 3) ? std::tanh(acc) : sigmoid(acc);
                }
            }
            for (int r = 0; r < layer.hidden; ++r) {
                c[l][r] = gates[1][r] * c[l][r] + gates[0][r] * gates[3][r];
                h[l][r] = gates[2][r] * std::tanh(c[l][r]);
            }
            x = h[l];
        }
    }
    std::vector<double> out(model.config.horizon);
    const int hid = model.layers.back().hidden;
    for (int k = 0; k < model.config.horizon; ++k) {
        double acc = model.readout_b[k];
        for (int i = 0; i < hid; ++i)
            acc += model.readout_w[static_cast<std::size_t>(k) * hid + i] * h[L - 1][i];
        out[k] = acc * model.y_std + model.y_mean;
    }
    return out;
}

double js_discrete(const std::vector<double>& p, const std::vector<double>& q) {
    double kl_p = 0.0, kl_q = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double m = 0.5 * (p[i] + q[i]);
        if (p[i] > 0.0) kl_p += p[i] * std::log2(p[i] / m);
        if (q[i] > 0.0) kl_q += q[i] * std::log2(q[i] / m);
    }
    return 0.5 * kl_p + 0.5 * kl_q;
}

double min_abs_preactivation(const drst::MlpModel& model, const drst::Dataset& batch) {
    double min_abs = 1e300;
    for (const auto& x : batch.inputs) {
        std::vector<double> cur = x;
        for (std::size_t l = 0; l + 1 < model.layers.size(); ++l) {
            const auto& layer = model.layers[l];
            std::vector<double> next(layer.out);
            for (int o = 0; o < layer.out; ++o) {
                double z = layer.b[o];
                for (int i = 0; i < layer.in; ++i)
                    z += layer.w[static_cast<std::size_t>(o) * layer.in + i] * cur[i];
                min_abs = std::min(min_abs, std::abs(z));
                next[o] = model.activation == drst::Activation::relu ? std::max(0.0, z)
                                                                     : std::tanh(z);
            }
            cur = next;
        }
    }
    return min_abs;
}

double linear_fit_r2(const std::vector<std::vector<double>>& features,
                     const std::vector<double>& target) {
    const std::size_t n = features.size();
    const std::size_t d = features.front().size() + 1;  // plus intercept
    // gram matrix solve by gaussian elimination
    std::vector<std::vector<double>> a(d, std::vector<double>(d + 1, 0.0));
    for (std::size_t s = 0; s < n; ++s) {
        std::vector<double> row = features[s];
        row.push_back(1.0);
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) a[i][j] += row[i] * row[j];
            a[i][d] += row[i] * target[s];
        }
    }
    for (std::size_t i = 0; i < d; ++i) {
        std::size_t pivot = i;
        for (std::size_t r = i + 1; r < d; ++r)
            if (std::abs(a[r][i]) > std::abs(a[pivot][i])) pivot = r;
        std::swap(a[i], a[pivot]);
        if (std::abs(a[i][i]) < 1e-12) continue;
        for (std::size_t r = 0; r < d; ++r) {
            if (r == i) continue;
            const double f = a[r][i] / a[i][i];
            for (std::size_t j = i; j <= d; ++j) a[r][j] -= f * a[i][j];
        }
    }
    std::vector<double> beta(d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
        if (std::abs(a[i][i]) > 1e-12) beta[i] = a[i][d] / a[i][i];

    double mean = std::accumulate(target.begin(), target.end(), 0.0) / static_cast<double>(n);
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        double pred = beta[d - 1];
        for (std::size_t j = 0; j + 1 < d; ++j) pred += beta[j] * features[s][j];
        ss_res += (target[s] - pred) * (target[s] - pred);
        ss_tot += (target[s] - mean) * (target[s] - mean);
    }
    return 1.0 - ss_res / ss_tot;
}

}  // namespace oracle
