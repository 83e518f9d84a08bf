#pragma once

// Independent reference implementations used as test oracles. Everything here
// is written from the textbook definition, deliberately not sharing code with
// the library paths it checks.

#include <cstdint>
#include <functional>
#include <vector>

#include "drst/lstm.hpp"
#include "drst/nn.hpp"

namespace oracle {

// straightforward affine-chain evaluation, no caching, no shortcuts
double naive_mlp_forward(const drst::MlpModel& model, const std::vector<double>& x);

// central finite differences of `objective` with respect to the flattened
// parameters reached through get/set
std::vector<double> finite_diff(const std::function<double()>& objective,
                                const std::function<std::vector<double>()>& get,
                                const std::function<void(const std::vector<double>&)>& set,
                                double step, const std::vector<std::size_t>& coords);

// two-pass covariance/sigma Pearson, the direct formula
double textbook_pearson(const std::vector<double>& x, const std::vector<double>& y);

// closed-form least squares for y = w x + b on scalar x
struct LineFit {
    double w;
    double b;
};
LineFit normal_equations(const std::vector<double>& x, const std::vector<double>& y);

// Shapley by averaging marginal contributions over every ordering; factorial
// cost, fine for <= 4 features
std::vector<double> shapley_all_orderings(
    const std::function<double(const std::vector<bool>&)>& value, std::size_t d);

// single-sample LSTM evaluation, gate by gate, written independently of the
// library's cached forward
std::vector<double> naive_lstm_forward(const drst::LstmModel& model,
                                       const std::vector<std::vector<double>>& window);

// JS divergence of two explicit discrete distributions, base-2 logs
double js_discrete(const std::vector<double>& p, const std::vector<double>& q);

// plain multiple linear regression R^2 via gram-matrix solve (for the
// feature->KPI learnability check)
double linear_fit_r2(const std::vector<std::vector<double>>& features,
                     const std::vector<double>& target);

// smallest |pre-activation| across a batch; finite-difference checks on relu
// nets are only valid when this clears the FD step (the kink is not
// differentiable)
double min_abs_preactivation(const drst::MlpModel& model, const drst::Dataset& batch);

}  // namespace oracle
