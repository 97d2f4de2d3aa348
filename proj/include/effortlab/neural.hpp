#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "effortlab/dataset.hpp"

namespace effortlab::nn {

enum class NetworkKind { Feedforward, Cascade, Elman, LayerRecurrent };

std::string_view kind_name(NetworkKind kind);
std::optional<NetworkKind> kind_from_name(std::string_view name);

struct NetworkSpec {
    NetworkKind kind = NetworkKind::Feedforward;
    int input_width = 4;         // one per selected feature
    std::vector<int> hidden{5};  // >= 1 layer, all widths >= 1
    // output width is 1; hidden activation logistic sigmoid, output identity

    bool operator==(const NetworkSpec&) const = default;
};

void validate(const NetworkSpec& spec);

/// Dense row-major matrix, just big enough for these tiny networks.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    static Matrix zeros(int rows, int cols) {
        return {rows, cols, std::vector<double>(static_cast<std::size_t>(rows) * cols, 0.0)};
    }
    double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
    bool operator==(const Matrix&) const = default;
};

/// Weights plus everything needed to reproduce a prediction: layer
/// matrices/biases, cascade skip matrices (raw input into every layer past
/// the first), context matrices for the recurrent kinds, the normalization
/// fitted on the training split, and the seed that initialised it all.
struct TrainedNetwork {
    NetworkSpec spec;
    std::vector<Matrix> weights;              // per layer, hidden... then output
    std::vector<std::vector<double>> biases;  // per layer
    std::vector<Matrix> skips;                // cascade: layers 1..L
    std::vector<Matrix> contexts;             // elman: layer 0; layer_recurrent: all hidden
    NormalizationParams norm;
    std::uint64_t seed = 0;

    int layer_count() const { return static_cast<int>(spec.hidden.size()) + 1; }
    int layer_width(int layer) const;
    int layer_input_width(int layer) const;
    bool operator==(const TrainedNetwork&) const = default;
};

/// Weights drawn uniform [-0.5, 0.5) from SplitMix64 in a fixed order:
/// layer matrices in layer order (row-major within each), then biases in
/// layer order, then skip matrices, then context matrices. Identical seeds
/// give bitwise identical networks. Normalization params are left empty;
/// the training pipeline attaches them.
TrainedNetwork init_network(const NetworkSpec& spec, std::uint64_t seed);

/// Previous hidden activations, one vector per hidden layer.
struct ContextState {
    std::vector<std::vector<double>> hidden;
};
ContextState zero_context(const NetworkSpec& spec);

struct ForwardResult {
    double output = 0;
    std::vector<std::vector<double>> activations; // per layer, output last
    ContextState next_context;                    // this step's hidden activations
};

ForwardResult forward(const TrainedNetwork& net, std::span<const double> input,
                      const ContextState& context);

struct Sample {
    std::vector<double> input; // normalized features
    double target = 0;         // normalized rde
};

/// Gradients of the squared error (y_hat - y)^2, matching the weight layout.
/// Context inputs are treated as constants (one-step truncation).
struct Gradients {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;
    std::vector<Matrix> skips;
    std::vector<Matrix> contexts;
};

Gradients gradient(const TrainedNetwork& net, const Sample& sample,
                   const ContextState& context);

double sample_loss(const TrainedNetwork& net, const Sample& sample,
                   const ContextState& context);

/// Max over all weights of |analytic - numeric| / max(1e-12, |analytic| +
/// |numeric|), numeric being the central difference at +-epsilon.
double gradient_check(const TrainedNetwork& net, const Sample& sample,
                      const ContextState& context, double epsilon);

struct TrainConfig {
    double learning_rate = 0.01;
    int epochs = 2000;
    std::uint64_t seed = 0; // seeds init_network in the training pipeline
};

struct TrainOutcome {
    TrainedNetwork network;
    std::vector<double> loss_trace; // epochs + 1 entries, initial MSE first
};

/// Online gradient descent, records presented in dataset order each epoch,
/// context threaded across records and reset at epoch boundaries. The
/// network must already carry normalization params. Deterministic.
TrainOutcome train(TrainedNetwork network, const Dataset& train_set,
                   const TrainConfig& config);

/// Convenience pipeline: fit normalization on train_set, init with
/// config.seed, then train.
TrainOutcome build_and_train(const NetworkSpec& spec, const Dataset& train_set,
                             const TrainConfig& config,
                             std::span<const Feature> features = kAllFeatures);

/// Single-record prediction in weeks (fresh zero context).
double predict(const TrainedNetwork& net, const ProjectRecord& record);

/// Prediction pass: context reset at the start, then threaded across the
/// records in their given order.
std::vector<double> predict_all(const TrainedNetwork& net, const Dataset& data);

// --- model file ----------------------------------------------------------

/// Self-describing text document; shortest-round-trip decimals make
/// save/load bit-exact.
std::string serialize_model(const TrainedNetwork& net);
TrainedNetwork parse_model(std::string_view text);
void save_model(const TrainedNetwork& net, const std::string& path);
TrainedNetwork load_model(const std::string& path);

} // namespace effortlab::nn
