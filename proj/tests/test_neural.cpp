#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "effortlab/dataset.hpp"
#include "effortlab/errors.hpp"
#include "effortlab/neural.hpp"
#include "effortlab/rng.hpp"

using namespace effortlab;
using namespace effortlab::nn;

namespace {

const std::vector<NetworkKind> kAllKinds = {
    NetworkKind::Feedforward, NetworkKind::Cascade, NetworkKind::Elman,
    NetworkKind::LayerRecurrent};

void zero_all(TrainedNetwork& net) {
    for (Matrix& m : net.weights) std::fill(m.data.begin(), m.data.end(), 0.0);
    for (auto& b : net.biases) std::fill(b.begin(), b.end(), 0.0);
    for (Matrix& m : net.skips) std::fill(m.data.begin(), m.data.end(), 0.0);
    for (Matrix& m : net.contexts) std::fill(m.data.begin(), m.data.end(), 0.0);
}

std::string replace_first(std::string text, const std::string& from,
                          const std::string& to) {
    const std::size_t pos = text.find(from);
    REQUIRE(pos != std::string::npos);
    return text.replace(pos, from.size(), to);
}

} // namespace

TEST_CASE("kind names round trip") {
    CHECK(kind_name(NetworkKind::Feedforward) == "ffbp");
    CHECK(kind_name(NetworkKind::Cascade) == "cascade");
    CHECK(kind_name(NetworkKind::Elman) == "elman");
    CHECK(kind_name(NetworkKind::LayerRecurrent) == "layerrec");
    for (NetworkKind kind : kAllKinds) {
        CHECK(kind_from_name(kind_name(kind)) == kind);
    }
    CHECK_FALSE(kind_from_name("mlp").has_value());
    CHECK_FALSE(kind_from_name("").has_value());
}

TEST_CASE("spec validation") {
    CHECK_NOTHROW(validate(NetworkSpec{}));
    CHECK_THROWS_WITH_AS(validate(NetworkSpec{NetworkKind::Feedforward, 0, {5}}),
                         doctest::Contains("input width"), ValidationError);
    CHECK_THROWS_WITH_AS(validate(NetworkSpec{NetworkKind::Feedforward, 4, {}}),
                         doctest::Contains("hidden layer"), ValidationError);
    CHECK_THROWS_WITH_AS(validate(NetworkSpec{NetworkKind::Feedforward, 4, {3, 0}}),
                         doctest::Contains("width"), ValidationError);
}

TEST_CASE("initialisation builds the right shapes per kind") {
    const std::vector<int> hidden{3, 2};
    for (NetworkKind kind : kAllKinds) {
        const TrainedNetwork net = init_network({kind, 4, hidden}, 7);
        REQUIRE(net.weights.size() == 3);
        CHECK(net.weights[0].rows == 3); CHECK(net.weights[0].cols == 4);
        CHECK(net.weights[1].rows == 2); CHECK(net.weights[1].cols == 3);
        CHECK(net.weights[2].rows == 1); CHECK(net.weights[2].cols == 2);
        REQUIRE(net.biases.size() == 3);
        CHECK(net.biases[0].size() == 3);
        CHECK(net.biases[2].size() == 1);

        if (kind == NetworkKind::Cascade) {
            REQUIRE(net.skips.size() == 2); // layers past the first see raw input
            CHECK(net.skips[0].rows == 2); CHECK(net.skips[0].cols == 4);
            CHECK(net.skips[1].rows == 1); CHECK(net.skips[1].cols == 4);
        } else {
            CHECK(net.skips.empty());
        }
        if (kind == NetworkKind::Elman) {
            REQUIRE(net.contexts.size() == 1); // first hidden layer only
            CHECK(net.contexts[0].rows == 3); CHECK(net.contexts[0].cols == 3);
        } else if (kind == NetworkKind::LayerRecurrent) {
            REQUIRE(net.contexts.size() == 2); // every hidden layer
            CHECK(net.contexts[1].rows == 2); CHECK(net.contexts[1].cols == 2);
        } else {
            CHECK(net.contexts.empty());
        }

        for (const Matrix& m : net.weights) {
            for (double w : m.data) {
                CHECK(w >= -0.5);
                CHECK(w < 0.5);
            }
        }
    }
}

TEST_CASE("same seed gives bitwise-identical networks, different seeds differ") {
    const NetworkSpec spec{NetworkKind::Cascade, 4, {5}};
    const TrainedNetwork a = init_network(spec, 42);
    const TrainedNetwork b = init_network(spec, 42);
    CHECK(a == b);

    const TrainedNetwork c = init_network(spec, 43);
    CHECK(a.weights[0].data != c.weights[0].data);
}

TEST_CASE("weights are drawn in the documented order") {
    const TrainedNetwork net = init_network({NetworkKind::Elman, 2, {2}}, 123);
    SplitMix64 rng(123);
    // Layer matrices first (row-major), then biases, then context matrices.
    for (double w : net.weights[0].data) CHECK(w == rng.next_weight());
    for (double w : net.weights[1].data) CHECK(w == rng.next_weight());
    for (double b : net.biases[0]) CHECK(b == rng.next_weight());
    for (double b : net.biases[1]) CHECK(b == rng.next_weight());
    for (double w : net.contexts[0].data) CHECK(w == rng.next_weight());
}

TEST_CASE("an all-zero network outputs exactly zero") {
    for (NetworkKind kind : kAllKinds) {
        TrainedNetwork net = init_network({kind, 4, {3}}, 9);
        zero_all(net);
        const std::vector<double> input{0.2, 0.4, 0.6, 0.8};
        const ForwardResult fw = forward(net, input, zero_context(net.spec));
        CHECK(fw.output == 0.0);
        // Hidden activations are sigmoid(0) = 0.5 and feed a zero output layer.
        CHECK(fw.activations[0] == std::vector<double>{0.5, 0.5, 0.5});
        CHECK(fw.next_context.hidden[0] == fw.activations[0]);
    }
}

TEST_CASE("recurrent kinds with zero context match the feedforward core") {
    const std::vector<double> input{0.1, 0.9, 0.3, 0.5};
    for (NetworkKind kind : {NetworkKind::Elman, NetworkKind::LayerRecurrent}) {
        const TrainedNetwork net = init_network({kind, 4, {3, 2}}, 11);
        TrainedNetwork twin = net;
        twin.spec.kind = NetworkKind::Feedforward;
        twin.contexts.clear();

        const double recurrent = forward(net, input, zero_context(net.spec)).output;
        const double plain = forward(twin, input, zero_context(twin.spec)).output;
        CHECK(recurrent == plain);
    }
}

TEST_CASE("a cascade with zeroed skips matches the feedforward core") {
    const std::vector<double> input{0.1, 0.9, 0.3, 0.5};
    TrainedNetwork net = init_network({NetworkKind::Cascade, 4, {3, 2}}, 11);
    for (Matrix& m : net.skips) std::fill(m.data.begin(), m.data.end(), 0.0);
    TrainedNetwork twin = net;
    twin.spec.kind = NetworkKind::Feedforward;
    twin.skips.clear();
    CHECK(forward(net, input, zero_context(net.spec)).output ==
          forward(twin, input, zero_context(twin.spec)).output);
}

TEST_CASE("cascade skip matrices feed the raw input forward") {
    TrainedNetwork net = init_network({NetworkKind::Cascade, 1, {1}}, 3);
    zero_all(net);
    net.skips[0].at(0, 0) = 1.0;
    // Core path contributes nothing; the output is the skip times the input.
    const std::vector<double> input{0.75};
    CHECK(forward(net, input, zero_context(net.spec)).output == 0.75);
}

TEST_CASE("forward validates input and context shapes") {
    const TrainedNetwork net = init_network({NetworkKind::Feedforward, 4, {5}}, 1);
    const std::vector<double> short_input{0.1, 0.2, 0.3};
    CHECK_THROWS_WITH_AS(forward(net, short_input, zero_context(net.spec)),
                         doctest::Contains("input width"), ValidationError);
    CHECK_THROWS_WITH_AS(forward(net, std::vector<double>(4, 0.0), ContextState{}),
                         doctest::Contains("context"), ValidationError);
}

TEST_CASE("output-layer gradients have their closed form") {
    const Sample sample{{0.3, 0.7, 0.1, 0.9}, 0.6};
    for (NetworkKind kind : kAllKinds) {
        const TrainedNetwork net = init_network({kind, 4, {4, 3}}, 21);
        const ContextState ctx = zero_context(net.spec);
        const ForwardResult fw = forward(net, sample.input, ctx);
        const Gradients grads = gradient(net, sample, ctx);

        const double residual = 2.0 * (fw.output - sample.target);
        const std::vector<double>& last_hidden = fw.activations[1];
        const Matrix& gw = grads.weights.back();
        REQUIRE(gw.rows == 1);
        for (int c = 0; c < gw.cols; ++c) {
            CHECK(gw.at(0, c) == residual * last_hidden[c]);
        }
        CHECK(grads.biases.back()[0] == residual);
    }
}

TEST_CASE("a perfectly predicted sample has zero gradients") {
    const TrainedNetwork net = init_network({NetworkKind::Feedforward, 4, {3}}, 5);
    const ContextState ctx = zero_context(net.spec);
    Sample sample{{0.2, 0.8, 0.4, 0.6}, 0.0};
    sample.target = forward(net, sample.input, ctx).output;

    const Gradients grads = gradient(net, sample, ctx);
    for (const Matrix& m : grads.weights) {
        for (double g : m.data) CHECK(g == 0.0);
    }
    for (const auto& b : grads.biases) {
        for (double g : b) CHECK(g == 0.0);
    }
}

TEST_CASE("analytic gradients agree with central differences for every kind") {
    const Sample sample{{0.3, 0.7, 0.1, 0.9}, 0.6};
    for (NetworkKind kind : kAllKinds) {
        for (std::uint64_t seed : {1, 2, 3}) {
            const TrainedNetwork net = init_network({kind, 4, {4, 3}}, seed);

            const ContextState zero = zero_context(net.spec);
            CHECK(gradient_check(net, sample, zero, 1e-5) <= 1e-4);

            // Recurrent kinds should also pass with a live context carried
            // over from a previous step.
            const Sample warmup{{0.5, 0.2, 0.9, 0.4}, 0.3};
            const ContextState threaded =
                forward(net, warmup.input, zero).next_context;
            CHECK(gradient_check(net, sample, threaded, 1e-5) <= 1e-4);
        }
    }
}

TEST_CASE("gradient check rejects a non-positive step") {
    const TrainedNetwork net = init_network({NetworkKind::Feedforward, 4, {3}}, 1);
    const Sample sample{{0.1, 0.2, 0.3, 0.4}, 0.5};
    CHECK_THROWS_AS(gradient_check(net, sample, zero_context(net.spec), 0.0),
                    NumericError);
    CHECK_THROWS_AS(gradient_check(net, sample, zero_context(net.spec), -1e-5),
                    NumericError);
}

TEST_CASE("zero epochs is an identity apart from the attached normalization") {
    const Dataset train = recorded_split(builtin_dataset()).train;
    const NetworkSpec spec{NetworkKind::Elman, 4, {5}};
    const TrainOutcome outcome = build_and_train(spec, train, {0.01, 0, 77});

    REQUIRE(outcome.loss_trace.size() == 1);
    const TrainedNetwork fresh = init_network(spec, 77);
    CHECK(outcome.network.weights == fresh.weights);
    CHECK(outcome.network.biases == fresh.biases);
    CHECK(outcome.network.contexts == fresh.contexts);
    CHECK(outcome.network.norm == min_max_normalize(train));
}

TEST_CASE("training rejects degenerate configurations") {
    const Dataset half = recorded_split(builtin_dataset()).train;
    const NetworkSpec spec{NetworkKind::Feedforward, 4, {5}};
    CHECK_THROWS_WITH_AS(build_and_train(spec, half, {0.0, 10, 1}),
                         doctest::Contains("learning rate"), ValidationError);
    CHECK_THROWS_WITH_AS(build_and_train(spec, half, {-0.1, 10, 1}),
                         doctest::Contains("learning rate"), ValidationError);
    CHECK_THROWS_WITH_AS(build_and_train(spec, half, {0.01, -1, 1}),
                         doctest::Contains("epochs"), ValidationError);
    CHECK_THROWS_WITH_AS(build_and_train(spec, Dataset{}, {0.01, 10, 1}),
                         doctest::Contains("empty"), ValidationError);

    TrainedNetwork no_norm = init_network(spec, 1);
    CHECK_THROWS_WITH_AS(train(std::move(no_norm), half, {0.01, 1, 1}),
                         doctest::Contains("normalization"), ValidationError);
}

TEST_CASE("training is bitwise deterministic in the seed") {
    const Dataset train = recorded_split(builtin_dataset()).train;
    const NetworkSpec spec{NetworkKind::LayerRecurrent, 4, {4}};
    const TrainConfig config{0.05, 40, 13};

    const TrainOutcome a = build_and_train(spec, train, config);
    const TrainOutcome b = build_and_train(spec, train, config);
    CHECK(a.network == b.network);
    CHECK(a.loss_trace == b.loss_trace);

    TrainConfig other = config;
    other.seed = 14;
    const TrainOutcome c = build_and_train(spec, train, other);
    CHECK(a.network.weights != c.network.weights);
}

TEST_CASE("the default run drives the loss down") {
    const Dataset train = recorded_split(builtin_dataset()).train;
    const TrainConfig config{}; // lr 0.01, 2000 epochs, seed 0
    const TrainOutcome outcome =
        build_and_train({NetworkKind::Feedforward, 4, {5}}, train, config);

    REQUIRE(outcome.loss_trace.size() == 2001);
    CHECK(outcome.loss_trace.back() < outcome.loss_trace.front());
    for (double loss : outcome.loss_trace) {
        CHECK(std::isfinite(loss));
        CHECK(loss >= 0.0);
    }
}

TEST_CASE("every kind trains to a lower loss on the recorded split") {
    const Dataset train = recorded_split(builtin_dataset()).train;
    for (NetworkKind kind : kAllKinds) {
        const TrainOutcome outcome =
            build_and_train({kind, 4, {5}}, train, {0.01, 300, 2});
        REQUIRE(outcome.loss_trace.size() == 301);
        CHECK(outcome.loss_trace.back() < outcome.loss_trace.front());
    }
}

TEST_CASE("predictions are finite weeks for every record") {
    const Split split = recorded_split(builtin_dataset());
    for (NetworkKind kind : kAllKinds) {
        const TrainOutcome outcome =
            build_and_train({kind, 4, {5}}, split.train, {0.01, 50, 3});
        const std::vector<double> preds =
            predict_all(outcome.network, builtin_dataset());
        REQUIRE(preds.size() == 41);
        for (double p : preds) {
            CHECK(std::isfinite(p));
        }
    }
}

TEST_CASE("feedforward prediction ignores presentation order, recurrent does not") {
    const Split split = recorded_split(builtin_dataset());

    const TrainOutcome ffbp = build_and_train({NetworkKind::Feedforward, 4, {5}},
                                              split.train, {0.01, 50, 4});
    const std::vector<double> batch = predict_all(ffbp.network, split.test);
    for (std::size_t i = 0; i < split.test.records.size(); ++i) {
        CHECK(batch[i] == predict(ffbp.network, split.test.records[i]));
    }

    const TrainOutcome elman = build_and_train({NetworkKind::Elman, 4, {5}},
                                               split.train, {0.01, 50, 4});
    const std::vector<double> threaded = predict_all(elman.network, split.test);
    // First record starts from a zero context either way; later ones carry
    // the threaded state and drift from the isolated per-record call.
    CHECK(threaded[0] == predict(elman.network, split.test.records[0]));
    CHECK(threaded[1] != predict(elman.network, split.test.records[1]));
}

TEST_CASE("prediction requires normalization parameters") {
    const TrainedNetwork net = init_network({NetworkKind::Feedforward, 4, {5}}, 1);
    CHECK_THROWS_WITH_AS(predict(net, builtin_dataset().records[0]),
                         doctest::Contains("normalization"), ValidationError);
    CHECK_THROWS_WITH_AS(predict_all(net, builtin_dataset()),
                         doctest::Contains("normalization"), ValidationError);
}

TEST_CASE("model files round-trip every kind bit-exactly") {
    const Dataset train = recorded_split(builtin_dataset()).train;
    for (NetworkKind kind : kAllKinds) {
        const TrainOutcome outcome =
            build_and_train({kind, 4, {3, 2}}, train, {0.01, 3, 8});
        const TrainedNetwork& net = outcome.network;

        const std::string text = serialize_model(net);
        CHECK(text.rfind("effortlab-model 1\n", 0) == 0);
        CHECK(text.find("kind " + std::string(kind_name(kind)) + "\n") !=
              std::string::npos);
        CHECK(text.find("\nend\n") != std::string::npos);

        const TrainedNetwork reparsed = parse_model(text);
        CHECK(reparsed == net);
        CHECK(serialize_model(reparsed) == text);
    }
}

TEST_CASE("model files survive a disk round trip") {
    const Dataset train = recorded_split(builtin_dataset()).train;
    const TrainOutcome outcome = build_and_train({NetworkKind::Cascade, 4, {5}},
                                                 train, {0.01, 5, 6});
    const std::string path =
        (std::filesystem::temp_directory_path() / "effortlab-model-roundtrip.txt")
            .string();
    save_model(outcome.network, path);
    const TrainedNetwork loaded = load_model(path);
    std::remove(path.c_str());
    CHECK(loaded == outcome.network);

    CHECK_THROWS_AS(load_model("/nonexistent/effortlab/model.txt"), Error);
}

TEST_CASE("model parser reports tampered documents") {
    const Dataset train = recorded_split(builtin_dataset()).train;
    const std::string text = serialize_model(
        build_and_train({NetworkKind::Feedforward, 4, {5}}, train, {0.01, 1, 2})
            .network);

    CHECK_THROWS_WITH_AS(parse_model(""), doctest::Contains("unexpected end"),
                         ParseError);
    CHECK_THROWS_WITH_AS(parse_model(replace_first(text, "effortlab-model 1",
                                                   "effortlab-model 2")),
                         doctest::Contains("effortlab-model 1"), ParseError);
    CHECK_THROWS_WITH_AS(parse_model(replace_first(text, "kind ffbp", "kind mlp")),
                         doctest::Contains("unknown network kind"), ParseError);
    CHECK_THROWS_WITH_AS(parse_model(replace_first(text, "weights 0 5 4",
                                                   "weights 0 5 3")),
                         doctest::Contains("declared"), ParseError);
    CHECK_THROWS_AS(parse_model(text.substr(0, text.size() / 2)), ParseError);
    CHECK_THROWS_WITH_AS(parse_model(text + "extra\n"),
                         doctest::Contains("after"), ParseError);
}
