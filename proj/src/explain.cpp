#include "drst/explain.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "drst/rng.hpp"

namespace drst {

SensitivityReport gradient_sensitivity(const MlpModel& model,
                                       const std::vector<std::vector<double>>& samples,
                                       std::size_t k, const std::vector<std::string>& names) {
    if (samples.empty()) fail(Errc::empty_data, "no samples");
    const auto arity = static_cast<std::size_t>(model.input_arity());
    if (k > arity) fail(Errc::arity_mismatch, "k exceeds feature count");
    if (!names.empty() && names.size() != arity)
        fail(Errc::arity_mismatch, "names size does not match arity");

    SensitivityReport report;
    report.mean_abs_gradient.assign(arity, 0.0);
    for (const auto& x : samples) {
        const std::vector<double> g = mlp_input_gradient(model, x);
        for (std::size_t j = 0; j < arity; ++j) report.mean_abs_gradient[j] += std::abs(g[j]);
    }
    for (auto& v : report.mean_abs_gradient) v /= static_cast<double>(samples.size());

    std::vector<std::size_t> idx(arity);
    for (std::size_t j = 0; j < arity; ++j) idx[j] = j;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (report.mean_abs_gradient[a] != report.mean_abs_gradient[b])
            return report.mean_abs_gradient[a] > report.mean_abs_gradient[b];
        if (!names.empty()) return names[a] < names[b];
        return a < b;
    });
    report.top_k.assign(idx.begin(), idx.begin() + k);
    return report;
}

namespace {

std::vector<double> background_mean(const std::vector<std::vector<double>>& background,
                                    std::size_t arity) {
    if (background.empty()) fail(Errc::empty_background, "background set is empty");
    std::vector<double> mean(arity, 0.0);
    for (const auto& row : background) {
        if (row.size() != arity) fail(Errc::arity_mismatch, "background row arity mismatch");
        for (std::size_t j = 0; j < arity; ++j) mean[j] += row[j];
    }
    for (auto& v : mean) v /= static_cast<double>(background.size());
    return mean;
}

void check_active(const std::vector<std::size_t>& active, std::size_t arity) {
    for (const auto j : active)
        if (j >= arity) fail(Errc::arity_mismatch, "active index out of range");
}

}  // namespace

Attribution shapley_exact(const MlpModel& model, const std::vector<double>& x,
                          const std::vector<std::vector<double>>& background,
                          const std::vector<std::size_t>& active) {
    const auto arity = static_cast<std::size_t>(model.input_arity());
    if (x.size() != arity) fail(Errc::arity_mismatch, "x arity mismatch");
    check_active(active, arity);
    const std::size_t d = active.size();
    if (d == 0) fail(Errc::empty_data, "active set is empty");
    if (d > 12)
        fail(Errc::too_many_features,
             "exact enumeration capped at 12 features; use shapley_sampled");
    const std::vector<double> mean = background_mean(background, arity);

    // v(mask): coalition members take their x values, the rest of the active
    // set sits at the background mean
    const std::size_t n_masks = std::size_t{1} << d;
    std::vector<double> value(n_masks);
    std::vector<double> point = x;
    for (std::size_t mask = 0; mask < n_masks; ++mask) {
        for (std::size_t j = 0; j < d; ++j)
            point[active[j]] = (mask >> j) & 1u ? x[active[j]] : mean[active[j]];
        value[mask] = mlp_forward(model, point);
    }

    // subset weights |D|! (d-|D|-1)! / d!
    std::vector<double> fact(d + 1, 1.0);
    for (std::size_t i = 1; i <= d; ++i) fact[i] = fact[i - 1] * static_cast<double>(i);
    std::vector<double> weight(d);
    for (std::size_t s = 0; s < d; ++s)
        weight[s] = fact[s] * fact[d - s - 1] / fact[d];

    Attribution out;
    out.active = active;
    out.phis.assign(d, 0.0);
    out.phi0 = value[0];
    out.prediction = value[n_masks - 1];
    out.model_evals = n_masks;

    for (std::size_t j = 0; j < d; ++j) {
        const std::size_t bit = std::size_t{1} << j;
        double phi = 0.0;
        for (std::size_t mask = 0; mask < n_masks; ++mask) {
            if (mask & bit) continue;
            const auto size = static_cast<std::size_t>(std::popcount(mask));
            phi += weight[size] * (value[mask | bit] - value[mask]);
        }
        out.phis[j] = phi;
    }

    double total = out.phi0;
    for (double p : out.phis) total += p;
    out.residual = out.prediction - total;
    return out;
}

Attribution shapley_sampled(const MlpModel& model, const std::vector<double>& x,
                            const std::vector<std::vector<double>>& background,
                            const std::vector<std::size_t>& active, int permutations,
                            std::uint64_t seed) {
    const auto arity = static_cast<std::size_t>(model.input_arity());
    if (x.size() != arity) fail(Errc::arity_mismatch, "x arity mismatch");
    check_active(active, arity);
    const std::size_t d = active.size();
    if (d == 0) fail(Errc::empty_data, "active set is empty");
    if (permutations < 1) fail(Errc::invalid_spec, "permutations must be >= 1");
    const std::vector<double> mean = background_mean(background, arity);

    Attribution out;
    out.active = active;
    out.phis.assign(d, 0.0);

    std::vector<double> point = x;
    for (std::size_t j = 0; j < d; ++j) point[active[j]] = mean[active[j]];
    out.phi0 = mlp_forward(model, point);
    out.prediction = mlp_forward(model, x);
    out.model_evals = 2;

    Rng rng(seed);
    std::vector<std::size_t> order(d);
    for (std::size_t j = 0; j < d; ++j) order[j] = j;

    for (int p = 0; p < permutations; ++p) {
        for (std::size_t i = d; i-- > 1;) {
            const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i)));
            std::swap(order[i], order[j]);
        }
        for (std::size_t j = 0; j < d; ++j) point[active[j]] = mean[active[j]];
        double prev = out.phi0;
        for (const auto j : order) {
            point[active[j]] = x[active[j]];
            const double cur = mlp_forward(model, point);
            ++out.model_evals;
            out.phis[j] += cur - prev;
            prev = cur;
        }
    }
    for (auto& p : out.phis) p /= static_cast<double>(permutations);

    double total = out.phi0;
    for (double p : out.phis) total += p;
    out.residual = out.prediction - total;
    return out;
}

std::vector<double> normalized_phis(const Attribution& a) {
    double denom = 0.0;
    for (double p : a.phis) denom += std::abs(p);
    std::vector<double> out(a.phis.size(), 0.0);
    if (denom == 0.0) return out;
    for (std::size_t j = 0; j < a.phis.size(); ++j) out[j] = a.phis[j] / denom;
    return out;
}

}  // namespace drst
