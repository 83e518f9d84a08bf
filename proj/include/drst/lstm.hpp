#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "drst/nn.hpp"
#include "drst/trace.hpp"

namespace drst {

struct LstmConfig {
    int layers = 1;       // [1, 3]
    int hidden_dim = 32;  // [32, 128]
    int input_window = 10;
    int horizon = 5;
    double learning_rate = 3e-3;
    int batch_size = 32;
    int epochs = 15;
    std::uint64_t seed = 1;

    void validate() const;
};

// Standard LSTM (sigmoid input/forget/output gates, tanh candidate and cell
// readout) with a linear head that emits all H steps from the final hidden
// state. Targets are standardized internally like the MLP.
struct LstmModel {
    // gate order: input, forget, output, candidate
    struct Layer {
        int in = 0;
        int hidden = 0;
        std::vector<double> w[4];  // hidden x in, row-major
        std::vector<double> u[4];  // hidden x hidden
        std::vector<double> b[4];
    };
    std::vector<Layer> layers;
    std::vector<double> readout_w;  // H x hidden
    std::vector<double> readout_b;  // H
    LstmConfig config;
    std::string input_schema_hash;
    std::optional<FeatureSchema> schema;
    double y_mean = 0.0;
    double y_std = 1.0;

    int input_arity() const { return layers.empty() ? 0 : layers.front().in; }
    int horizon() const { return config.horizon; }
    void validate() const;
};

struct ForecastResult {
    std::int64_t base_timestamp_ms = 0;
    std::size_t base_index = 0;  // position of the window's last sample in its stream
    std::vector<double> values;  // exactly H entries
};

// One training sample: an N-step window and its H-step target trajectory.
struct WindowSample {
    std::vector<std::vector<double>> window;
    std::vector<double> targets;
    std::size_t base_index = 0;
};

struct WindowDataset {
    std::vector<WindowSample> samples;

    std::size_t size() const { return samples.size(); }
};

// Slices aligned (features, target) series into supervised windows with
// stride 1: window ends at t, targets are t+1 .. t+H.
WindowDataset make_supervised(const std::vector<std::vector<double>>& features,
                              const std::vector<double>& targets, int input_window, int horizon);

LstmModel lstm_init(int input_arity, const LstmConfig& config);

// Raw multi-step evaluation on a window of plain rows (length must equal N).
std::vector<double> lstm_eval(const LstmModel& model,
                              const std::vector<std::vector<double>>& window);

ForecastResult lstm_forward(const LstmModel& model, std::span<const FeatureVector> window);

// Mean per-head MSE over the batch (no regularization term).
double lstm_objective(const LstmModel& model, const WindowDataset& batch);

std::size_t lstm_param_count(const LstmModel& model);
std::vector<double> lstm_get_params(const LstmModel& model);
void lstm_set_params(LstmModel& model, std::span<const double> params);

// Exact BPTT gradient of lstm_objective, flattened in lstm_get_params order.
std::vector<double> lstm_gradients(const LstmModel& model, const WindowDataset& batch);

std::pair<LstmModel, TrainReport> lstm_train(const WindowDataset& data, const LstmConfig& config,
                                             const std::string& schema_hash = {});

std::string lstm_to_json(const LstmModel& model);
LstmModel lstm_from_json(const std::string& text);

// --- DirREC chain -----------------------------------------------------------

// H single-step models where member h consumes the base window plus the h-1
// earlier predictions, appended to every timestep as constant features
// (standardized with the first member's target statistics).
struct DirRecChain {
    std::vector<LstmModel> members;

    int horizon() const { return static_cast<int>(members.size()); }
    int base_arity() const { return members.empty() ? 0 : members.front().input_arity(); }
    void validate() const;
};

ForecastResult dirrec_forecast(const DirRecChain& chain, std::span<const FeatureVector> window);
std::vector<double> dirrec_eval(const DirRecChain& chain,
                                const std::vector<std::vector<double>>& window);

// Trains the chain front to back; each later member sees the earlier members'
// own predictions on the training windows, matching how it is used at
// forecast time.
std::pair<DirRecChain, TrainReport> dirrec_train(const WindowDataset& data,
                                                 const LstmConfig& config,
                                                 const std::string& schema_hash = {});

std::string dirrec_to_json(const DirRecChain& chain);
DirRecChain dirrec_from_json(const std::string& text);

// --- rolling forecast -------------------------------------------------------

struct GapMarker {
    std::int64_t timestamp_ms = 0;
    std::size_t base_index = 0;
};

using RollingEmission = std::variant<ForecastResult, GapMarker>;

// Emits one forecast per `every_s` period of stream time once the input
// window has filled; period boundaries reached before that produce gap
// markers. Gaps are data, not errors.
class RollingForecaster {
public:
    RollingForecaster(const LstmModel* model, int every_s);

    std::vector<RollingEmission> push(const FeatureVector& v, std::size_t index);
    // end-of-stream: if nothing was ever emitted, one trailing gap marker
    std::optional<GapMarker> finish();

    std::size_t forecasts_emitted() const { return forecasts_; }

private:
    const LstmModel* model_;
    std::int64_t period_ms_;
    std::vector<FeatureVector> window_;
    bool started_ = false;
    std::int64_t next_boundary_ms_ = 0;
    std::size_t forecasts_ = 0;
    std::size_t gaps_ = 0;
    std::int64_t last_ts_ = 0;
    std::size_t last_index_ = 0;
};

}  // namespace drst
