#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "drst/nn.hpp"

namespace drst {

struct Attribution {
    double phi0 = 0.0;                 // value of the empty coalition
    std::vector<double> phis;          // one per active feature
    std::vector<std::size_t> active;   // feature indices the phis refer to
    double prediction = 0.0;           // f(x)
    double residual = 0.0;             // f(x) - phi0 - sum(phis); ~0 in exact mode
    std::size_t model_evals = 0;
};

struct SensitivityReport {
    std::vector<double> mean_abs_gradient;  // per input feature
    std::vector<std::size_t> top_k;         // indices, ranked
};

// Ranks features by mean |df/dx_j| over the samples; ties break on the
// feature name (index order when names are omitted).
SensitivityReport gradient_sensitivity(const MlpModel& model,
                                       const std::vector<std::vector<double>>& samples,
                                       std::size_t k,
                                       const std::vector<std::string>& names = {});

// Exact Shapley attribution over the `active` subset by full subset
// enumeration (capped at 12 features, 2^12 model evaluations). The value
// function evaluates the model with out-of-coalition active features replaced
// by the background mean; features outside `active` stay at their observed
// values, so phi0 + sum(phis) always reproduces f(x).
Attribution shapley_exact(const MlpModel& model, const std::vector<double>& x,
                          const std::vector<std::vector<double>>& background,
                          const std::vector<std::size_t>& active);

// Seeded Monte-Carlo permutation estimator of the same quantity; efficiency
// holds in expectation and the realized residual is reported.
Attribution shapley_sampled(const MlpModel& model, const std::vector<double>& x,
                            const std::vector<std::vector<double>>& background,
                            const std::vector<std::size_t>& active, int permutations,
                            std::uint64_t seed);

// phi scaled by sum |phi|, for display; raw values stay in the Attribution.
std::vector<double> normalized_phis(const Attribution& a);

}  // namespace drst
