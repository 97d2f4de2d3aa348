#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "effortlab/dataset.hpp"
#include "effortlab/errors.hpp"
#include "effortlab/format.hpp"
#include "effortlab/fuzzy.hpp"
#include "effortlab/grnn.hpp"
#include "effortlab/metrics.hpp"
#include "effortlab/neural.hpp"
#include "effortlab/replay.hpp"

namespace {

using namespace effortlab;

std::string slurp(const std::string& path, const char* what) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(std::string("cannot open ") + what + " \"" + path + "\"");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void spill(const std::string& path, const std::string& content, const char* what) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(std::string("cannot open ") + what + " \"" + path +
                    "\" for writing");
    }
    out << content;
    if (!out.flush()) {
        throw Error(std::string("failed writing ") + what + " \"" + path + "\"");
    }
}

Dataset dataset_from(const std::string& file) {
    if (file.empty()) {
        return builtin_dataset();
    }
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        throw Error("cannot open dataset file \"" + file + "\"");
    }
    return load_dataset(in, file);
}

nlohmann::json dataset_json(const Dataset& dataset) {
    nlohmann::json j;
    j["source"] = dataset.source;
    j["records"] = nlohmann::json::array();
    for (const ProjectRecord& r : dataset.records) {
        j["records"].push_back({{"serial", r.serial},
                                {"tcoe", r.tcoe},
                                {"tcoa", r.tcoa},
                                {"tcor", r.tcor},
                                {"cgpa", r.cgpa},
                                {"rde", r.rde}});
    }
    return j;
}

std::string dataset_text(const Dataset& dataset) {
    std::string out;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%6s  %4s  %4s  %4s  %6s  %5s\n", "serial",
                  "tcoe", "tcoa", "tcor", "cgpa", "rde");
    out += buf;
    for (const ProjectRecord& r : dataset.records) {
        std::snprintf(buf, sizeof(buf), "%6d  %4d  %4d  %4d  %6.3f  %5.1f\n",
                      r.serial, r.tcoe, r.tcoa, r.tcor, r.cgpa, r.rde);
        out += buf;
    }
    return out;
}

int run_data(const std::string& action, const std::string& file,
             const std::string& format) {
    const Dataset dataset = dataset_from(file);
    if (action == "validate") {
        // Loading already validated every record; report the tally.
        if (format == "json") {
            nlohmann::json j = {{"status", "ok"},
                                {"records", dataset.records.size()},
                                {"source", dataset.source}};
            std::cout << j.dump(2) << "\n";
        } else if (format == "csv") {
            std::cout << "status,records,source\nok,"
                      << dataset.records.size() << ',' << dataset.source << "\n";
        } else {
            std::cout << "ok: " << dataset.records.size() << " records from "
                      << dataset.source << "\n";
        }
        return 0;
    }
    // show and export differ only in their default format (text vs csv),
    // resolved by the caller.
    if (format == "json") {
        std::cout << dataset_json(dataset).dump(2) << "\n";
    } else if (format == "csv") {
        std::cout << serialize_dataset(dataset);
    } else {
        std::cout << dataset_text(dataset);
    }
    return 0;
}

replay::RenderFormat parse_render_format(const std::string& name) {
    const auto format = replay::render_format_from_name(name);
    if (!format) {
        throw ValidationError("unknown format \"" + name + "\"");
    }
    return *format;
}

int run_replay(const std::string& table, const std::string& format, bool strict) {
    const replay::RenderFormat fmt = parse_render_format(format);
    bool irreconcilable = false;
    const auto scan = [&](std::span<const replay::AuditNote> notes) {
        for (const replay::AuditNote& note : notes) {
            if (note.verdict == replay::Verdict::Irreconcilable) {
                irreconcilable = true;
            }
        }
    };
    if (table == "table2") {
        const replay::Table2Replay t2 = replay::replay_table2();
        std::cout << replay::render_table2(t2, fmt);
        scan(t2.notes);
    } else if (table == "table4") {
        const replay::Table4Replay t4 = replay::replay_table4();
        std::cout << replay::render_table4(t4, fmt);
        scan(t4.notes);
    } else { // table1: the comparison and every audit feeding it
        std::cout << replay::render_comparison(replay::recorded_comparison(), fmt);
        scan(replay::replay_table2().notes);
        scan(replay::replay_table4().notes);
    }
    if (strict && irreconcilable) {
        std::cerr << "error: audit found irreconcilable figures\n";
        return 2;
    }
    return 0;
}

fuzzy::FisConfig config_from(const std::string& path) {
    try {
        return fuzzy::parse_fis(slurp(path, "fis config"));
    } catch (const ParseError& e) {
        throw Error(path + ": " + e.what()); // keep the file name in front
    }
}

int run_fis_infer(const std::string& config_path, int tcoe, double cgpa) {
    const fuzzy::FisConfig config = config_from(config_path);
    const fuzzy::InputBinding binding = fuzzy::bind_inputs_by_name(config);
    fuzzy::CrispInputs inputs;
    for (const auto& [variable, feature] : binding) {
        switch (feature) {
        case Feature::Tcoe: inputs[variable] = tcoe; break;
        case Feature::Cgpa: inputs[variable] = cgpa; break;
        default:
            throw ValidationError("config input \"" + variable +
                                  "\" has no flag here; fis infer feeds tcoe "
                                  "and cgpa only");
        }
    }
    const fuzzy::InferResult result = fuzzy::infer(config, inputs);
    for (const std::string& name : result.clamped) {
        std::cerr << "warning: " << name << " clamped to its universe\n";
    }
    if (result.no_rule_fired) {
        std::cerr << "warning: no rule fired; universe midpoint returned\n";
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f\n", result.output);
    std::cout << buf;
    return 0;
}

EvaluationReport fis_report(const fuzzy::FisConfig& config, const Dataset& data) {
    const fuzzy::InputBinding binding = fuzzy::bind_inputs_by_name(config);
    std::vector<PredictionPair> pairs;
    int fallbacks = 0;
    for (const ProjectRecord& record : data.records) {
        const fuzzy::InferResult result =
            fuzzy::infer(config, fuzzy::crisp_inputs_for(binding, record));
        if (result.no_rule_fired || result.empty_aggregate) {
            ++fallbacks;
        }
        pairs.push_back({record.serial, record.rde, result.output});
    }
    EvaluationReport report = evaluate(config.name, std::move(pairs));
    if (fallbacks > 0) {
        report.notes.push_back(std::to_string(fallbacks) +
                               " record(s) hit the midpoint fallback");
    }
    return report;
}

void print_report(const EvaluationReport& report, const std::string& format) {
    if (format == "csv") {
        std::cout << report_to_csv(report);
    } else if (format == "json") {
        std::cout << report_to_json(report);
    } else {
        std::cout << report_to_text(report);
    }
}

int run_fis_eval(const std::string& config_path, const std::string& subset,
                 const std::string& format) {
    const fuzzy::FisConfig config = config_from(config_path);
    Dataset data = builtin_dataset();
    EvaluationReport report;
    if (subset == "test") {
        report = fis_report(config, recorded_split(data).test);
        report.notes.push_back(recorded_split_note());
    } else {
        report = fis_report(config, data);
    }
    print_report(report, format);
    return 0;
}

int run_fis_tune(const std::string& config_path, const std::string& grid_path,
                 const std::string& out_path) {
    const fuzzy::FisConfig base = config_from(config_path);
    const fuzzy::Grid grid = fuzzy::parse_grid(slurp(grid_path, "grid file"));
    const Dataset data = builtin_dataset();
    const fuzzy::InputBinding binding = fuzzy::bind_inputs_by_name(base);
    const fuzzy::TuneResult result = fuzzy::tune_fis(base, grid, data, binding);
    spill(out_path, fuzzy::serialize_fis(result.best), "tuned config");
    std::cout << "grid points: " << fuzzy::grid_size(grid) << "\n"
              << "best index:  " << result.best_index << "\n"
              << "best MMRE:   " << format_fixed(result.best_mmre * 100.0, 4)
              << "%\n"
              << "wrote: " << out_path << "\n";
    return 0;
}

std::vector<Feature> parse_features(const std::vector<std::string>& names) {
    std::vector<Feature> features;
    for (const std::string& name : names) {
        const auto f = feature_from_name(name);
        if (!f) {
            throw ValidationError("unknown feature \"" + name + "\"");
        }
        features.push_back(*f);
    }
    return features;
}

int run_nn_train(const std::string& model, std::uint64_t seed, int epochs,
                 double lr, const std::vector<int>& hidden,
                 const std::vector<std::string>& feature_names,
                 const std::string& out_path) {
    const auto kind = nn::kind_from_name(model);
    if (!kind) {
        throw ValidationError("unknown model \"" + model + "\"");
    }
    nn::NetworkSpec spec;
    spec.kind = *kind;
    spec.hidden = hidden;
    const std::vector<Feature> features = parse_features(feature_names);

    nn::TrainConfig config;
    config.learning_rate = lr;
    config.epochs = epochs;
    config.seed = seed;

    const Dataset train_set = recorded_split(builtin_dataset()).train;
    const nn::TrainOutcome outcome =
        nn::build_and_train(spec, train_set, config, features);
    nn::save_model(outcome.network, out_path);
    std::cout << "model: " << model << "  hidden:";
    for (int w : outcome.network.spec.hidden) std::cout << ' ' << w;
    std::cout << "\nepochs: " << epochs << "  lr: " << format_double(lr)
              << "  seed: " << seed << "\n"
              << "mse: " << format_double(outcome.loss_trace.front()) << " -> "
              << format_double(outcome.loss_trace.back()) << "\n"
              << "wrote: " << out_path << "\n";
    return 0;
}

int run_nn_eval(const std::string& model_path, const std::string& subset,
                const std::string& format) {
    const nn::TrainedNetwork net = nn::load_model(model_path);
    const Dataset data = builtin_dataset();
    const Dataset scored = subset == "test" ? recorded_split(data).test : data;
    const std::vector<double> predictions = nn::predict_all(net, scored);
    std::vector<PredictionPair> pairs;
    for (std::size_t i = 0; i < scored.records.size(); ++i) {
        pairs.push_back({scored.records[i].serial, scored.records[i].rde,
                         predictions[i]});
    }
    EvaluationReport report =
        evaluate(std::string(nn::kind_name(net.spec.kind)), std::move(pairs));
    if (subset == "test") {
        report.notes.push_back(recorded_split_note());
    }
    print_report(report, format);
    return 0;
}

int run_grnn_eval(double sigma, const std::string& subset,
                  const std::string& format) {
    const Dataset data = builtin_dataset();
    const Split split = recorded_split(data);
    const GrnnModel model = build_grnn(split.train, sigma);
    const Dataset& scored = subset == "test" ? split.test : data;
    std::vector<PredictionPair> pairs;
    for (const ProjectRecord& record : scored.records) {
        pairs.push_back({record.serial, record.rde, grnn_predict(model, record)});
    }
    EvaluationReport report =
        evaluate("GRNN sigma=" + format_double(sigma), std::move(pairs));
    if (subset == "test") {
        report.notes.push_back(recorded_split_note());
    }
    print_report(report, format);
    return 0;
}

EvaluationReport report_from_file(const std::string& path) {
    const std::string text = slurp(path, "report file");
    const std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        return report_from_json(text);
    }
    EvaluationReport report = report_from_csv(text);
    report.label = path; // csv carries no label of its own
    return report;
}

int run_report_compare(const std::vector<std::string>& from,
                       const std::string& svg_path, const std::string& format) {
    std::vector<EvaluationReport> reports;
    for (const std::string& path : from) {
        reports.push_back(report_from_file(path));
    }
    const replay::Comparison comparison = replay::comparison_report(reports);
    std::cout << replay::render_comparison(comparison, parse_render_format(format));
    if (!svg_path.empty()) {
        spill(svg_path, replay::comparison_svg(comparison), "svg chart");
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ERD-based software effort estimation toolkit"};
    app.require_subcommand(1);
    int rc = 0;

    // data show|validate|export
    std::string data_file;
    std::string data_format;
    CLI::App* data = app.add_subcommand("data", "inspect or export the dataset");
    data->require_subcommand(1);
    for (const char* action : {"show", "validate", "export"}) {
        CLI::App* sub = data->add_subcommand(
            action, std::string(action) == "validate"
                        ? "load the dataset and check every invariant"
                        : "print the dataset");
        sub->add_option("--file", data_file,
                        "dataset csv (defaults to the embedded dataset)");
        sub->add_option("--format", data_format, "text, csv or json")
            ->check(CLI::IsMember({"text", "csv", "json"}));
        sub->callback([&rc, sub, action]() {
            std::string format = sub->count("--format")
                                     ? sub->get_option("--format")->as<std::string>()
                                     : std::string(std::string(action) == "export"
                                                       ? "csv"
                                                       : "text");
            rc = run_data(action, sub->get_option("--file")->as<std::string>(),
                          format);
        });
    }

    // replay table1|table2|table4
    CLI::App* replay_cmd =
        app.add_subcommand("replay", "re-audit the recorded result tables");
    replay_cmd->require_subcommand(1);
    for (const char* table : {"table1", "table2", "table4"}) {
        CLI::App* sub = replay_cmd->add_subcommand(
            table, std::string("recompute and audit ") + table);
        auto format = std::make_shared<std::string>("text");
        auto strict = std::make_shared<bool>(false);
        sub->add_option("--format", *format,
                        std::string(table) == "table1"
                            ? "text, csv, json or svg"
                            : "text, csv or json");
        sub->add_flag("--strict", *strict,
                      "exit 2 when any audited figure is irreconcilable");
        sub->callback([&rc, table, format, strict]() {
            rc = run_replay(table, *format, *strict);
        });
    }

    // fis infer|eval|tune
    CLI::App* fis = app.add_subcommand("fis", "fuzzy inference commands");
    fis->require_subcommand(1);
    {
        CLI::App* sub = fis->add_subcommand("infer", "one estimate in weeks");
        auto config = std::make_shared<std::string>();
        auto tcoe = std::make_shared<int>(0);
        auto cgpa = std::make_shared<double>(0);
        sub->add_option("--config", *config, "fis text config")->required();
        sub->add_option("--tcoe", *tcoe, "entity count")->required();
        sub->add_option("--cgpa", *cgpa, "grade point")->required();
        sub->callback([&rc, config, tcoe, cgpa]() {
            rc = run_fis_infer(*config, *tcoe, *cgpa);
        });
    }
    {
        CLI::App* sub = fis->add_subcommand("eval", "score a config on the dataset");
        auto config = std::make_shared<std::string>();
        auto subset = std::make_shared<std::string>("all");
        auto format = std::make_shared<std::string>("text");
        sub->add_option("--config", *config, "fis text config")->required();
        sub->add_option("--subset", *subset, "all records or the test half")
            ->check(CLI::IsMember({"all", "test"}));
        sub->add_option("--format", *format, "text, csv or json");
        sub->callback([&rc, config, subset, format]() {
            rc = run_fis_eval(*config, *subset, *format);
        });
    }
    {
        CLI::App* sub = fis->add_subcommand("tune", "exhaustive grid search");
        auto config = std::make_shared<std::string>();
        auto grid = std::make_shared<std::string>();
        auto out = std::make_shared<std::string>();
        sub->add_option("--config", *config, "fis text config")->required();
        sub->add_option("--grid", *grid, "grid file")->required();
        sub->add_option("--out", *out, "where the tuned config goes")->required();
        sub->callback([&rc, config, grid, out]() {
            rc = run_fis_tune(*config, *grid, *out);
        });
    }

    // nn train|eval
    CLI::App* nn_cmd = app.add_subcommand("nn", "neural network commands");
    nn_cmd->require_subcommand(1);
    {
        CLI::App* sub = nn_cmd->add_subcommand("train", "train on serials 1-31");
        auto model = std::make_shared<std::string>();
        auto seed = std::make_shared<std::uint64_t>(0);
        auto epochs = std::make_shared<int>(2000);
        auto lr = std::make_shared<double>(0.01);
        auto hidden = std::make_shared<std::vector<int>>(std::vector<int>{5});
        auto features = std::make_shared<std::vector<std::string>>(
            std::vector<std::string>{"tcoe", "tcoa", "tcor", "cgpa"});
        auto out = std::make_shared<std::string>();
        sub->add_option("--model", *model, "ffbp, cascade, elman or layerrec")
            ->required()
            ->check(CLI::IsMember({"ffbp", "cascade", "elman", "layerrec"}));
        sub->add_option("--seed", *seed, "weight init seed");
        sub->add_option("--epochs", *epochs, "training epochs");
        sub->add_option("--lr", *lr, "learning rate");
        sub->add_option("--hidden", *hidden, "hidden widths, e.g. 5 or 8,4")
            ->delimiter(',');
        sub->add_option("--features", *features, "input fields")->delimiter(',');
        sub->add_option("--out", *out, "model file to write")->required();
        sub->callback([&rc, model, seed, epochs, lr, hidden, features, out]() {
            rc = run_nn_train(*model, *seed, *epochs, *lr, *hidden, *features,
                              *out);
        });
    }
    {
        CLI::App* sub = nn_cmd->add_subcommand("eval", "score a saved model");
        auto model_file = std::make_shared<std::string>();
        auto subset = std::make_shared<std::string>("all");
        auto format = std::make_shared<std::string>("text");
        sub->add_option("--model-file", *model_file, "model file")->required();
        sub->add_option("--subset", *subset, "all records or the test half")
            ->check(CLI::IsMember({"all", "test"}));
        sub->add_option("--format", *format, "text, csv or json");
        sub->callback([&rc, model_file, subset, format]() {
            rc = run_nn_eval(*model_file, *subset, *format);
        });
    }

    // grnn eval
    CLI::App* grnn_cmd = app.add_subcommand("grnn", "kernel regression commands");
    grnn_cmd->require_subcommand(1);
    {
        CLI::App* sub = grnn_cmd->add_subcommand(
            "eval", "score a kernel regressor built on serials 1-31");
        auto sigma = std::make_shared<double>(0);
        auto subset = std::make_shared<std::string>("all");
        auto format = std::make_shared<std::string>("text");
        sub->add_option("--sigma", *sigma, "kernel width")->required();
        sub->add_option("--subset", *subset, "all records or the test half")
            ->check(CLI::IsMember({"all", "test"}));
        sub->add_option("--format", *format, "text, csv or json");
        sub->callback([&rc, sigma, subset, format]() {
            rc = run_grnn_eval(*sigma, *subset, *format);
        });
    }

    // report compare
    CLI::App* report_cmd = app.add_subcommand("report", "combine saved reports");
    report_cmd->require_subcommand(1);
    {
        CLI::App* sub =
            report_cmd->add_subcommand("compare", "rank reports by MMRE");
        auto from = std::make_shared<std::vector<std::string>>();
        auto svg = std::make_shared<std::string>();
        auto format = std::make_shared<std::string>("text");
        sub->add_option("--from", *from, "report files (csv or json)")
            ->required()
            ->delimiter(',');
        sub->add_option("--svg", *svg, "also write a bar chart here");
        sub->add_option("--format", *format, "text, csv or json");
        sub->callback([&rc, from, svg, format]() {
            rc = run_report_compare(*from, *svg, *format);
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e); // --help and friends
        }
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return rc;
}
