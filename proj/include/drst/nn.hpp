#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "drst/error.hpp"
#include "drst/trace.hpp"

namespace drst {

enum class Activation { relu, tanh_act };

const char* activation_name(Activation a);
Activation activation_from_name(const std::string& s);

struct MlpConfig {
    int hidden_layers = 2;   // [0, 4]
    int hidden_width = 32;   // [1, 64]
    Activation activation = Activation::relu;
    double l2_alpha = 1e-4;
    double learning_rate = 1e-3;
    int batch_size = 32;
    int epochs = 40;
    std::uint64_t seed = 1;

    void validate() const;
};

struct TrainReport {
    double final_loss = 0.0;
    std::vector<double> loss_curve;  // one full-objective value per epoch
    double wall_time_s = 0.0;
    std::size_t samples_seen = 0;
};

// Dense scalar-output regressor. Trained with targets standardized
// internally; y_mean/y_std fold the standardization back into forward(), so
// predictions are always on the raw KPI scale.
struct MlpModel {
    struct Layer {
        int in = 0;
        int out = 0;
        std::vector<double> w;  // row-major, out x in
        std::vector<double> b;
    };
    std::vector<Layer> layers;  // hidden layers then the linear scalar head
    Activation activation = Activation::relu;
    MlpConfig config;
    std::string input_schema_hash;
    std::optional<FeatureSchema> schema;  // embedded so serving can normalize
    double y_mean = 0.0;
    double y_std = 1.0;

    int input_arity() const { return layers.empty() ? 0 : layers.front().in; }
    // shape-chain and finiteness invariants; throws on violation
    void validate() const;
};

struct Dataset {
    std::vector<std::vector<double>> inputs;
    std::vector<double> targets;

    std::size_t size() const { return inputs.size(); }
};

// Fresh model with seeded Glorot-style uniform init.
MlpModel mlp_init(int input_arity, const MlpConfig& config);

double mlp_forward(const MlpModel& model, std::span<const double> x);

// Regularized objective on a batch: (1/n) sum (f(x)-y)^2 + (alpha/2)|theta|^2.
double mlp_objective(const MlpModel& model, const Dataset& batch);
double mlp_data_loss(const MlpModel& model, const Dataset& batch);

// Flat parameter access in a fixed order (per layer: weights then biases).
// Shared by the optimizer, serialization, and finite-difference checks.
std::size_t mlp_param_count(const MlpModel& model);
std::vector<double> mlp_get_params(const MlpModel& model);
void mlp_set_params(MlpModel& model, std::span<const double> params);

// Exact backpropagation gradient of mlp_objective, flattened in
// mlp_get_params order.
std::vector<double> mlp_gradients(const MlpModel& model, const Dataset& batch);

// d f / d x at one point; used by the explainer's sensitivity pass.
std::vector<double> mlp_input_gradient(const MlpModel& model, std::span<const double> x);

// Adam minimization of the regularized objective; bit-reproducible for a
// fixed seed on one platform.
std::pair<MlpModel, TrainReport> mlp_train(const Dataset& data, const MlpConfig& config,
                                           const std::string& schema_hash = {});

std::string mlp_to_json(const MlpModel& model);
MlpModel mlp_from_json(const std::string& text);

// --- grid search -----------------------------------------------------------

// Severity ladder tiers: S1 re-optimizes the optimizer knobs, S2 additionally
// touches the architecture, SK sweeps every axis.
enum class GridBudget { s1_light, s2_moderate, sk_full };

const char* grid_budget_name(GridBudget b);

struct MlpGrid {
    MlpConfig base;
    std::vector<double> learning_rates = {1e-3, 3e-3};
    std::vector<int> batch_sizes = {16, 32};
    std::vector<int> depths = {1, 2};
    std::vector<int> widths = {16, 32};
    std::vector<Activation> activations = {Activation::relu, Activation::tanh_act};
    std::vector<double> l2_alphas = {0.0, 1e-4};
};

// Axis names varied by a budget tier, in lattice nesting order.
std::vector<std::string> grid_axes(GridBudget budget);

struct GridCandidate {
    MlpConfig config;
    double val_loss = 0.0;
    bool failed = false;
    std::string error;
};

struct GridResult {
    MlpConfig best_config;
    MlpModel best_model;
    TrainReport best_report;
    double best_val_loss = 0.0;
    std::vector<GridCandidate> candidates;
    std::vector<std::string> axes;
};

// Trains every lattice point on a fixed 80/20 split of `data` and returns the
// candidate with the lowest validation MSE (first in lattice order on ties).
// Candidates that diverge are recorded and skipped; if all fail the search
// throws TrainingFailed.
GridResult grid_search(const Dataset& data, const MlpGrid& grid, GridBudget budget,
                       const std::string& schema_hash = {});

}  // namespace drst
