#include "effortlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "effortlab/errors.hpp"
#include "effortlab/format.hpp"

namespace effortlab {

double mre(double actual, double predicted) {
    if (!(actual > 0.0)) {
        throw NumericError("mre requires actual > 0, got " + format_double(actual));
    }
    return std::abs(actual - predicted) / actual;
}

double mmre(std::span<const PredictionPair> pairs) {
    if (pairs.empty()) {
        throw NumericError("mmre of an empty pair list is undefined");
    }
    double sum = 0.0;
    for (const PredictionPair& p : pairs) {
        sum += mre(p.actual, p.predicted);
    }
    return sum / static_cast<double>(pairs.size());
}

double pred_at(std::span<const PredictionPair> pairs, double threshold) {
    if (pairs.empty()) {
        throw NumericError("pred_at of an empty pair list is undefined");
    }
    if (threshold < 0.0) {
        throw NumericError("pred_at threshold must be >= 0, got " +
                           format_double(threshold));
    }
    std::size_t hits = 0;
    for (const PredictionPair& p : pairs) {
        if (mre(p.actual, p.predicted) <= threshold) {
            ++hits;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(pairs.size());
}

double bre(double actual, double predicted) {
    if (!(actual > 0.0) || !(predicted > 0.0)) {
        throw NumericError("bre requires positive operands, got actual=" +
                           format_double(actual) + " predicted=" +
                           format_double(predicted));
    }
    return std::abs(actual - predicted) / std::min(actual, predicted);
}

EvaluationReport evaluate(std::string label, std::vector<PredictionPair> pairs) {
    if (pairs.empty()) {
        throw NumericError("evaluate needs at least one prediction pair");
    }
    EvaluationReport report;
    report.label = std::move(label);
    report.pairs = std::move(pairs);
    report.n = report.pairs.size();
    report.mres.reserve(report.n);
    double bre_sum = 0.0;
    for (const PredictionPair& p : report.pairs) {
        report.mres.push_back(mre(p.actual, p.predicted));
        bre_sum += bre(p.actual, p.predicted);
    }
    report.mmre = mmre(report.pairs);
    report.mmre_percent = report.mmre * 100.0;
    report.pred25 = pred_at(report.pairs, 0.25);
    report.mean_bre_percent = bre_sum / static_cast<double>(report.n) * 100.0;
    return report;
}

std::string report_to_csv(const EvaluationReport& report) {
    std::string out = "serial,actual,predicted,mre\n";
    for (std::size_t i = 0; i < report.pairs.size(); ++i) {
        const PredictionPair& p = report.pairs[i];
        out += std::to_string(p.serial);
        out += ',' + format_double(p.actual);
        out += ',' + format_double(p.predicted);
        out += ',' + format_double(report.mres[i]);
        out += '\n';
    }
    out += "mmre_percent," + format_double(report.mmre_percent) + '\n';
    out += "pred25," + format_double(report.pred25) + '\n';
    out += "mean_bre_percent," + format_double(report.mean_bre_percent) + '\n';
    out += "n," + std::to_string(report.n) + '\n';
    return out;
}

EvaluationReport report_from_csv(std::string_view csv) {
    std::vector<PredictionPair> pairs;
    std::istringstream in{std::string(csv)};
    std::string line;
    int line_no = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (!saw_header) {
            if (line != "serial,actual,predicted,mre") {
                throw ParseError("expected report header 'serial,actual,predicted,mre'",
                                 line_no);
            }
            saw_header = true;
            continue;
        }
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            std::size_t comma = line.find(',', start);
            if (comma == std::string::npos) {
                fields.push_back(line.substr(start));
                break;
            }
            fields.push_back(line.substr(start, comma - start));
            start = comma + 1;
        }
        if (fields.size() == 2) {
            break; // footer rows start here
        }
        if (fields.size() != 4) {
            throw ParseError("expected 4 fields in pair row", line_no);
        }
        PredictionPair p;
        p.serial = static_cast<int>(parse_double(fields[0], "serial"));
        p.actual = parse_double(fields[1], "actual");
        p.predicted = parse_double(fields[2], "predicted");
        pairs.push_back(p);
    }
    if (!saw_header) {
        throw ParseError("empty report CSV", 1);
    }
    return evaluate("csv", std::move(pairs));
}

std::string report_to_json(const EvaluationReport& report) {
    nlohmann::json j;
    j["label"] = report.label;
    j["pairs"] = nlohmann::json::array();
    for (std::size_t i = 0; i < report.pairs.size(); ++i) {
        const PredictionPair& p = report.pairs[i];
        j["pairs"].push_back({{"serial", p.serial},
                              {"actual", p.actual},
                              {"predicted", p.predicted},
                              {"mre", report.mres[i]}});
    }
    j["mmre"] = report.mmre;
    j["mmre_percent"] = report.mmre_percent;
    j["pred25"] = report.pred25;
    j["mean_bre_percent"] = report.mean_bre_percent;
    j["n"] = report.n;
    j["notes"] = report.notes;
    return j.dump(2) + "\n";
}

EvaluationReport report_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("report JSON: ") + e.what(), 1);
    }
    std::vector<PredictionPair> pairs;
    for (const auto& jp : j.at("pairs")) {
        pairs.push_back({jp.at("serial").get<int>(), jp.at("actual").get<double>(),
                         jp.at("predicted").get<double>()});
    }
    EvaluationReport report = evaluate(j.value("label", std::string("report")),
                                       std::move(pairs));
    if (j.contains("notes")) {
        report.notes = j.at("notes").get<std::vector<std::string>>();
    }
    return report;
}

std::string report_to_text(const EvaluationReport& report) {
    std::string out = "evaluation: " + report.label + "\n";
    out += "serial  actual  predicted     mre\n";
    for (std::size_t i = 0; i < report.pairs.size(); ++i) {
        const PredictionPair& p = report.pairs[i];
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%6d  %6.1f  %9.3f  %6.3f\n", p.serial,
                      p.actual, p.predicted, round_to(report.mres[i], 3));
        out += buf;
    }
    out += "n=" + std::to_string(report.n);
    out += "  MMRE=" + format_fixed(report.mmre_percent, 2) + "%";
    out += "  Pred(0.25)=" + format_fixed(report.pred25, 3);
    out += "  BRE=" + format_fixed(report.mean_bre_percent, 2) + "%\n";
    for (const std::string& note : report.notes) {
        out += "note: " + note + "\n";
    }
    return out;
}

} // namespace effortlab
