#include "effortlab/neural.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "effortlab/errors.hpp"
#include "effortlab/format.hpp"
#include "effortlab/rng.hpp"

namespace effortlab::nn {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

bool layer_has_context(const NetworkSpec& spec, int layer) {
    const int hidden_layers = static_cast<int>(spec.hidden.size());
    if (layer >= hidden_layers) {
        return false;
    }
    switch (spec.kind) {
    case NetworkKind::Elman: return layer == 0;
    case NetworkKind::LayerRecurrent: return true;
    default: return false;
    }
}

template <typename Net, typename F>
void for_each_param(Net& net, F&& visit) {
    for (auto& m : net.weights) for (auto& v : m.data) visit(v);
    for (auto& b : net.biases) for (auto& v : b) visit(v);
    for (auto& m : net.skips) for (auto& v : m.data) visit(v);
    for (auto& m : net.contexts) for (auto& v : m.data) visit(v);
}

template <typename F>
void for_each_grad(Gradients& grads, F&& visit) {
    for (auto& m : grads.weights) for (auto& v : m.data) visit(v);
    for (auto& b : grads.biases) for (auto& v : b) visit(v);
    for (auto& m : grads.skips) for (auto& v : m.data) visit(v);
    for (auto& m : grads.contexts) for (auto& v : m.data) visit(v);
}

} // namespace

std::string_view kind_name(NetworkKind kind) {
    switch (kind) {
    case NetworkKind::Feedforward: return "ffbp";
    case NetworkKind::Cascade: return "cascade";
    case NetworkKind::Elman: return "elman";
    case NetworkKind::LayerRecurrent: return "layerrec";
    }
    return "?";
}

std::optional<NetworkKind> kind_from_name(std::string_view name) {
    if (name == "ffbp") return NetworkKind::Feedforward;
    if (name == "cascade") return NetworkKind::Cascade;
    if (name == "elman") return NetworkKind::Elman;
    if (name == "layerrec") return NetworkKind::LayerRecurrent;
    return std::nullopt;
}

void validate(const NetworkSpec& spec) {
    if (spec.input_width < 1) {
        throw ValidationError("network input width must be >= 1, got " +
                              std::to_string(spec.input_width));
    }
    if (spec.hidden.empty()) {
        throw ValidationError("network needs at least one hidden layer");
    }
    for (int width : spec.hidden) {
        if (width < 1) {
            throw ValidationError("hidden layer width must be >= 1, got " +
                                  std::to_string(width));
        }
    }
}

int TrainedNetwork::layer_width(int layer) const {
    const int hidden_layers = static_cast<int>(spec.hidden.size());
    return layer < hidden_layers ? spec.hidden[layer] : 1;
}

int TrainedNetwork::layer_input_width(int layer) const {
    return layer == 0 ? spec.input_width : layer_width(layer - 1);
}

TrainedNetwork init_network(const NetworkSpec& spec, std::uint64_t seed) {
    validate(spec);
    TrainedNetwork net;
    net.spec = spec;
    net.seed = seed;

    const int layers = net.layer_count();
    for (int l = 0; l < layers; ++l) {
        net.weights.push_back(Matrix::zeros(net.layer_width(l), net.layer_input_width(l)));
        net.biases.emplace_back(net.layer_width(l), 0.0);
    }
    if (spec.kind == NetworkKind::Cascade) {
        for (int l = 1; l < layers; ++l) {
            net.skips.push_back(Matrix::zeros(net.layer_width(l), spec.input_width));
        }
    }
    for (int l = 0; l < layers; ++l) {
        if (layer_has_context(spec, l)) {
            net.contexts.push_back(Matrix::zeros(net.layer_width(l), net.layer_width(l)));
        }
    }

    SplitMix64 rng(seed);
    for_each_param(net, [&](double& w) { w = rng.next_weight(); });
    return net;
}

ContextState zero_context(const NetworkSpec& spec) {
    ContextState state;
    for (int width : spec.hidden) {
        state.hidden.emplace_back(width, 0.0);
    }
    return state;
}

ForwardResult forward(const TrainedNetwork& net, std::span<const double> input,
                      const ContextState& context) {
    if (static_cast<int>(input.size()) != net.spec.input_width) {
        throw ValidationError("input width " + std::to_string(input.size()) +
                              " does not match network input width " +
                              std::to_string(net.spec.input_width));
    }
    const int hidden_layers = static_cast<int>(net.spec.hidden.size());
    if (static_cast<int>(context.hidden.size()) != hidden_layers) {
        throw ValidationError("context state has wrong layer count");
    }

    ForwardResult result;
    result.activations.reserve(net.layer_count());
    std::vector<double> current(input.begin(), input.end());

    int context_index = 0;
    for (int l = 0; l < net.layer_count(); ++l) {
        const Matrix& w = net.weights[l];
        std::vector<double> z(net.layer_width(l));
        for (int r = 0; r < w.rows; ++r) {
            double acc = net.biases[l][r];
            for (int c = 0; c < w.cols; ++c) {
                acc += w.at(r, c) * current[c];
            }
            z[r] = acc;
        }
        if (net.spec.kind == NetworkKind::Cascade && l >= 1) {
            const Matrix& s = net.skips[l - 1];
            for (int r = 0; r < s.rows; ++r) {
                for (int c = 0; c < s.cols; ++c) {
                    z[r] += s.at(r, c) * input[c];
                }
            }
        }
        if (layer_has_context(net.spec, l)) {
            const Matrix& ctx_w = net.contexts[context_index++];
            const std::vector<double>& prev = context.hidden[l];
            if (static_cast<int>(prev.size()) != ctx_w.cols) {
                throw ValidationError("context state width mismatch at layer " +
                                      std::to_string(l));
            }
            for (int r = 0; r < ctx_w.rows; ++r) {
                for (int c = 0; c < ctx_w.cols; ++c) {
                    z[r] += ctx_w.at(r, c) * prev[c];
                }
            }
        }
        if (l < hidden_layers) {
            for (double& v : z) {
                v = sigmoid(v);
            }
        }
        result.activations.push_back(std::move(z));
        current = result.activations.back();
    }

    result.output = result.activations.back()[0];
    result.next_context.hidden.assign(result.activations.begin(),
                                      result.activations.begin() + hidden_layers);
    return result;
}

namespace {

Gradients zero_gradients(const TrainedNetwork& net) {
    Gradients g;
    for (const Matrix& m : net.weights) g.weights.push_back(Matrix::zeros(m.rows, m.cols));
    for (const auto& b : net.biases) g.biases.emplace_back(b.size(), 0.0);
    for (const Matrix& m : net.skips) g.skips.push_back(Matrix::zeros(m.rows, m.cols));
    for (const Matrix& m : net.contexts) g.contexts.push_back(Matrix::zeros(m.rows, m.cols));
    return g;
}

// Backprop over an already-computed forward pass. Context activations are
// constants here: recurrent gradients truncate after one step.
Gradients backprop(const TrainedNetwork& net, const ForwardResult& fw,
                   const Sample& sample, const ContextState& context) {
    const int layers = net.layer_count();
    const int hidden_layers = static_cast<int>(net.spec.hidden.size());
    Gradients grads = zero_gradients(net);

    std::vector<std::vector<double>> deltas(layers);
    deltas[layers - 1] = {2.0 * (fw.output - sample.target)};
    for (int l = layers - 2; l >= 0; --l) {
        const Matrix& w_next = net.weights[l + 1];
        std::vector<double> delta(net.layer_width(l), 0.0);
        for (int i = 0; i < w_next.cols; ++i) {
            double acc = 0.0;
            for (int j = 0; j < w_next.rows; ++j) {
                acc += w_next.at(j, i) * deltas[l + 1][j];
            }
            const double a = fw.activations[l][i];
            delta[i] = acc * a * (1.0 - a);
        }
        deltas[l] = std::move(delta);
    }

    int context_index = 0;
    for (int l = 0; l < layers; ++l) {
        const std::vector<double>& delta = deltas[l];
        const std::vector<double>& prev =
            (l == 0) ? sample.input : fw.activations[l - 1];
        Matrix& gw = grads.weights[l];
        for (int r = 0; r < gw.rows; ++r) {
            for (int c = 0; c < gw.cols; ++c) {
                gw.at(r, c) = delta[r] * prev[c];
            }
            grads.biases[l][r] = delta[r];
        }
        if (net.spec.kind == NetworkKind::Cascade && l >= 1) {
            Matrix& gs = grads.skips[l - 1];
            for (int r = 0; r < gs.rows; ++r) {
                for (int c = 0; c < gs.cols; ++c) {
                    gs.at(r, c) = delta[r] * sample.input[c];
                }
            }
        }
        if (layer_has_context(net.spec, l)) {
            Matrix& gc = grads.contexts[context_index++];
            for (int r = 0; r < gc.rows; ++r) {
                for (int c = 0; c < gc.cols; ++c) {
                    gc.at(r, c) = delta[r] * context.hidden[l][c];
                }
            }
        }
        (void)hidden_layers;
    }
    return grads;
}

} // namespace

Gradients gradient(const TrainedNetwork& net, const Sample& sample,
                   const ContextState& context) {
    const ForwardResult fw = forward(net, sample.input, context);
    return backprop(net, fw, sample, context);
}

double sample_loss(const TrainedNetwork& net, const Sample& sample,
                   const ContextState& context) {
    const double diff = forward(net, sample.input, context).output - sample.target;
    return diff * diff;
}

double gradient_check(const TrainedNetwork& net, const Sample& sample,
                      const ContextState& context, double epsilon) {
    if (!(epsilon > 0.0)) {
        throw NumericError("gradient_check epsilon must be > 0, got " +
                           format_double(epsilon));
    }
    Gradients analytic = gradient(net, sample, context);
    std::vector<double> flat_analytic;
    for_each_grad(analytic, [&](double& g) { flat_analytic.push_back(g); });

    TrainedNetwork probe = net;
    std::vector<double*> params;
    for_each_param(probe, [&](double& w) { params.push_back(&w); });
    if (params.size() != flat_analytic.size()) {
        throw NumericError("gradient/parameter layout mismatch");
    }

    double worst = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double saved = *params[i];
        *params[i] = saved + epsilon;
        const double loss_plus = sample_loss(probe, sample, context);
        *params[i] = saved - epsilon;
        const double loss_minus = sample_loss(probe, sample, context);
        *params[i] = saved;
        const double numeric = (loss_plus - loss_minus) / (2.0 * epsilon);
        const double a = flat_analytic[i];
        const double deviation = std::abs(a - numeric) /
                                 std::max(1e-12, std::abs(a) + std::abs(numeric));
        worst = std::max(worst, deviation);
    }
    return worst;
}

namespace {

std::vector<Sample> make_samples(const TrainedNetwork& net, const Dataset& data) {
    if (net.norm.features.empty()) {
        throw ValidationError("network is missing normalization parameters");
    }
    if (static_cast<int>(net.norm.features.size()) != net.spec.input_width) {
        throw ValidationError("normalization feature count does not match input width");
    }
    std::vector<Sample> samples;
    samples.reserve(data.records.size());
    for (const ProjectRecord& record : data.records) {
        samples.push_back({net.norm.normalize(record), net.norm.normalize_target(record.rde)});
    }
    return samples;
}

double dataset_mse(const TrainedNetwork& net, std::span<const Sample> samples) {
    ContextState ctx = zero_context(net.spec);
    double total = 0.0;
    for (const Sample& sample : samples) {
        ForwardResult fw = forward(net, sample.input, ctx);
        const double diff = fw.output - sample.target;
        total += diff * diff;
        ctx = std::move(fw.next_context);
    }
    return total / static_cast<double>(samples.size());
}

} // namespace

TrainOutcome train(TrainedNetwork network, const Dataset& train_set,
                   const TrainConfig& config) {
    if (train_set.records.empty()) {
        throw ValidationError("training set is empty");
    }
    if (!(config.learning_rate > 0.0)) {
        throw ValidationError("learning rate must be > 0, got " +
                              format_double(config.learning_rate));
    }
    if (config.epochs < 0) {
        throw ValidationError("epochs must be >= 0");
    }
    const std::vector<Sample> samples = make_samples(network, train_set);

    TrainOutcome outcome;
    outcome.loss_trace.reserve(config.epochs + 1);
    outcome.loss_trace.push_back(dataset_mse(network, samples));

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        ContextState ctx = zero_context(network.spec);
        for (const Sample& sample : samples) {
            ForwardResult fw = forward(network, sample.input, ctx);
            Gradients grads = backprop(network, fw, sample, ctx);
            const double lr = config.learning_rate;
            std::size_t cursor = 0;
            std::vector<double> flat;
            for_each_grad(grads, [&](double& g) { flat.push_back(g); });
            for_each_param(network, [&](double& w) { w -= lr * flat[cursor++]; });
            ctx = std::move(fw.next_context);
        }
        outcome.loss_trace.push_back(dataset_mse(network, samples));
    }
    outcome.network = std::move(network);
    return outcome;
}

TrainOutcome build_and_train(const NetworkSpec& spec, const Dataset& train_set,
                             const TrainConfig& config,
                             std::span<const Feature> features) {
    NetworkSpec sized = spec;
    sized.input_width = static_cast<int>(features.size());
    TrainedNetwork net = init_network(sized, config.seed);
    net.norm = min_max_normalize(train_set, features);
    return train(std::move(net), train_set, config);
}

double predict(const TrainedNetwork& net, const ProjectRecord& record) {
    if (net.norm.features.empty()) {
        throw ValidationError("network is missing normalization parameters");
    }
    const std::vector<double> input = net.norm.normalize(record);
    const ForwardResult fw = forward(net, input, zero_context(net.spec));
    return net.norm.denormalize_target(fw.output);
}

std::vector<double> predict_all(const TrainedNetwork& net, const Dataset& data) {
    if (net.norm.features.empty()) {
        throw ValidationError("network is missing normalization parameters");
    }
    std::vector<double> out;
    out.reserve(data.records.size());
    ContextState ctx = zero_context(net.spec);
    for (const ProjectRecord& record : data.records) {
        ForwardResult fw = forward(net, net.norm.normalize(record), ctx);
        out.push_back(net.norm.denormalize_target(fw.output));
        ctx = std::move(fw.next_context);
    }
    return out;
}

} // namespace effortlab::nn
