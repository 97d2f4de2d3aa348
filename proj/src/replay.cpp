#include "effortlab/replay.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "effortlab/errors.hpp"
#include "effortlab/format.hpp"

namespace effortlab::replay {

namespace {

constexpr std::string_view kTable2Labels[kTable2Models] = {
    "FFBPNN", "Cascaded FFBPNN", "LRNN"};

// Serials 31-41: actual RDE, the three recorded predictions, and the printed
// 2-decimal MRE cells, exactly as the results table shows them.
constexpr Table2Row kTable2[] = {
    {31, 65, {69.39, 79.71, 79.73}, {0.07, 0.23, 0.23}},
    {32, 75, {67.73, 66.26, 69.17}, {0.10, 0.12, 0.08}},
    {33, 65, {79.03, 55.06, 80.00}, {0.22, 0.15, 0.23}},
    {34, 65, {79.03, 55.05, 80.00}, {0.22, 0.15, 0.23}},
    {35, 70, {55.00, 77.46, 69.11}, {0.21, 0.11, 0.01}},
    {36, 70, {55.21, 74.66, 69.39}, {0.21, 0.07, 0.01}},
    {37, 70, {60.07, 72.86, 69.44}, {0.14, 0.04, 0.01}},
    {38, 65, {58.85, 62.28, 67.77}, {0.09, 0.04, 0.04}},
    {39, 75, {79.16, 61.54, 68.31}, {0.06, 0.18, 0.09}},
    {40, 75, {79.16, 64.05, 70.04}, {0.06, 0.15, 0.07}},
    {41, 75, {79.20, 55.14, 55.06}, {0.06, 0.26, 0.27}},
};

constexpr double kTable2PrintedSums[kTable2Models] = {1.43, 1.49, 1.26};
constexpr double kTable2PrintedMmres[kTable2Models] = {12.96, 13.59, 11.45};

// All 41 rows: tcoe, cgpa, actual RDE, the recorded fuzzy-system prediction,
// and the printed 3-decimal MRE cell.
constexpr Table4Row kTable4[] = {
    {1, 24, 6.219, 75, 75.0, 0.000},  {2, 24, 8.012, 75, 75.0, 0.000},
    {3, 24, 7.733, 75, 75.0, 0.000},  {4, 10, 7.564, 70, 75.0, 0.071},
    {5, 5, 5.519, 55, 64.3, 0.169},   {6, 19, 7.507, 70, 75.0, 0.071},
    {7, 8, 6.171, 75, 65.0, 0.133},   {8, 8, 6.705, 75, 65.0, 0.133},
    {9, 17, 7.629, 75, 75.0, 0.000},  {10, 9, 8.130, 70, 75.0, 0.071},
    {11, 10, 8.083, 65, 75.0, 0.154}, {12, 10, 8.126, 65, 75.0, 0.154},
    {13, 10, 7.202, 65, 75.0, 0.154}, {14, 5, 8.417, 65, 71.0, 0.092},
    {15, 5, 7.757, 70, 71.0, 0.014},  {16, 4, 7.431, 70, 70.0, 0.000},
    {17, 4, 7.121, 70, 70.0, 0.000},  {18, 4, 7.660, 70, 70.0, 0.000},
    {19, 7, 8.017, 75, 73.4, 0.021},  {20, 7, 9.076, 75, 72.8, 0.029},
    {21, 7, 7.550, 70, 73.2, 0.046},  {22, 6, 6.583, 65, 64.4, 0.009},
    {23, 6, 7.276, 65, 71.3, 0.097},  {24, 6, 8.124, 65, 72.1, 0.109},
    {25, 5, 6.530, 75, 64.4, 0.141},  {26, 5, 6.685, 70, 64.5, 0.079},
    {27, 6, 7.843, 65, 72.1, 0.109},  {28, 7, 9.160, 70, 72.7, 0.039},
    {29, 7, 8.617, 75, 73.3, 0.023},  {30, 6, 8.719, 80, 71.9, 0.101},
    {31, 4, 8.860, 65, 70.0, 0.077},  {32, 5, 7.664, 75, 71.0, 0.053},
    {33, 16, 6.795, 65, 70.0, 0.077}, {34, 16, 6.757, 65, 70.4, 0.083},
    {35, 9, 6.207, 70, 67.1, 0.041},  {36, 9, 6.636, 70, 68.6, 0.020},
    {37, 9, 6.790, 70, 70.0, 0.000},  {38, 8, 8.095, 65, 75.0, 0.154},
    {39, 20, 7.990, 75, 75.0, 0.000}, {40, 20, 8.095, 75, 75.0, 0.000},
    {41, 15, 6.340, 75, 71.0, 0.053},
};

constexpr Table1Entry kTable1[] = {
    {"FFBPNN", 12.96},
    {"Cascaded FFBPNN", 13.59},
    {"LRNN", 11.45},
    {"Mamdani FIS", 3.89},
};

constexpr std::string_view kMamdaniLabel = "Mamdani FIS";

} // namespace

std::span<const std::string_view> table2_labels() { return kTable2Labels; }
std::span<const Table2Row> table2() { return kTable2; }
std::span<const double> table2_printed_sums() { return kTable2PrintedSums; }
std::span<const double> table2_printed_mmres() { return kTable2PrintedMmres; }
std::span<const Table4Row> table4() { return kTable4; }
std::span<const Table1Entry> table1() { return kTable1; }

std::string_view verdict_name(Verdict verdict) {
    switch (verdict) {
    case Verdict::Match: return "match";
    case Verdict::RoundingMatch: return "rounding-match";
    case Verdict::Irreconcilable: return "irreconcilable";
    }
    return "?";
}

Verdict classify(double reported, double recomputed, int printed_places,
                 double tolerance) {
    if (std::abs(reported - recomputed) <= tolerance) {
        return Verdict::Match;
    }
    if (std::abs(round_to(recomputed, printed_places) - reported) <= 1e-9) {
        return Verdict::RoundingMatch;
    }
    return Verdict::Irreconcilable;
}

namespace {

std::string two(double value) { return format_fixed(value, 2); }

AuditNote make_note(std::string subject, double reported, double recomputed,
                    int places, double tolerance = 5e-5) {
    return {std::move(subject), reported, recomputed,
            classify(reported, recomputed, places, tolerance), places};
}

} // namespace

Table2Replay replay_table2() {
    Table2Replay out;
    for (int m = 0; m < kTable2Models; ++m) {
        std::vector<PredictionPair> pairs;
        pairs.reserve(std::size(kTable2));
        for (const Table2Row& row : kTable2) {
            pairs.push_back({row.serial, row.actual, row.predicted[m]});
        }
        EvaluationReport report = evaluate(std::string(kTable2Labels[m]),
                                           std::move(pairs));
        const std::string prefix = "table2 " + report.label + " ";
        double exact_sum = 0.0;
        for (std::size_t i = 0; i < report.pairs.size(); ++i) {
            exact_sum += report.mres[i];
            out.notes.push_back(make_note(
                prefix + "serial " + std::to_string(report.pairs[i].serial) + " MRE",
                kTable2[i].printed_mre[m], report.mres[i], 2));
        }
        // The "MRE VALUES" row is the column sum (not a mean); the printed
        // figure is the exact sum rounded to 2 decimals.
        out.notes.push_back(make_note(prefix + "MRE sum row",
                                      kTable2PrintedSums[m], exact_sum, 2));
        out.notes.push_back(make_note(prefix + "MMRE%", kTable2PrintedMmres[m],
                                      report.mmre_percent, 2, 5e-3));
        report.notes.push_back("recorded MMRE " + two(kTable2PrintedMmres[m]) +
                               "%, recomputed " + two(report.mmre_percent) + "% (" +
                               std::string(verdict_name(classify(
                                   kTable2PrintedMmres[m], report.mmre_percent, 2,
                                   5e-3))) +
                               ")");
        out.reports.push_back(std::move(report));
    }
    return out;
}

Table4Replay replay_table4() {
    Table4Replay out;
    std::vector<PredictionPair> all;
    std::vector<PredictionPair> tail;
    for (const Table4Row& row : kTable4) {
        all.push_back({row.serial, row.actual, row.predicted});
        if (row.serial >= 31) {
            tail.push_back({row.serial, row.actual, row.predicted});
        }
    }
    out.full = evaluate(std::string(kMamdaniLabel), std::move(all));
    out.subset = evaluate(std::string(kMamdaniLabel) + " (serials 31-41)",
                          std::move(tail));

    for (std::size_t i = 0; i < out.full.pairs.size(); ++i) {
        out.notes.push_back(make_note(
            "table4 serial " + std::to_string(kTable4[i].serial) + " MRE",
            kTable4[i].printed_mre, out.full.mres[i], 3));
    }

    const double reported = 3.89; // the comparison table's Mamdani FIS row
    out.notes.push_back(make_note("table4 MMRE% (all 41 rows) vs comparison table",
                                  reported, out.full.mmre_percent, 2, 5e-3));
    out.full.notes.push_back(
        "comparison table reports MMRE " + two(reported) + "%, but the recorded " +
        "rows give " + two(out.full.mmre_percent) + "% — " +
        std::string(verdict_name(
            classify(reported, out.full.mmre_percent, 2, 5e-3))) +
        "; both values shown");
    out.full.notes.push_back("serials 31-41 subset MMRE " +
                             two(out.subset.mmre_percent) +
                             "% (scoring window of the network models)");
    out.subset.notes.push_back("subset of the 41 recorded rows, kept comparable "
                               "with the network-model scoring window");
    return out;
}

Comparison comparison_report(std::span<const EvaluationReport> reports) {
    if (reports.size() < 2) {
        throw ValidationError("comparison needs at least 2 reports, got " +
                              std::to_string(reports.size()));
    }
    Comparison out;
    for (const EvaluationReport& report : reports) {
        ComparisonEntry entry;
        entry.label = report.label;
        entry.mmre_percent = report.mmre_percent;
        entry.pred25 = report.pred25;
        entry.n = static_cast<int>(report.n);
        for (const Table1Entry& recorded : kTable1) {
            if (recorded.label == report.label) {
                entry.reported_mmre_percent = recorded.mmre_percent;
            }
        }
        out.entries.push_back(std::move(entry));
        for (const std::string& note : report.notes) {
            out.notes.push_back(report.label + ": " + note);
        }
    }
    std::stable_sort(out.entries.begin(), out.entries.end(),
                     [](const ComparisonEntry& a, const ComparisonEntry& b) {
                         return a.mmre_percent < b.mmre_percent;
                     });
    return out;
}

Comparison recorded_comparison() {
    const Table2Replay t2 = replay_table2();
    const Table4Replay t4 = replay_table4();
    std::vector<EvaluationReport> reports = t2.reports;
    EvaluationReport mamdani = t4.full;
    mamdani.notes.push_back("evaluated over all 41 recorded rows; the network "
                            "models above are scored on serials 31-41 only");
    reports.push_back(std::move(mamdani));
    return comparison_report(reports);
}

// ---- rendering ------------------------------------------------------------

std::optional<RenderFormat> render_format_from_name(std::string_view name) {
    if (name == "text") return RenderFormat::Text;
    if (name == "csv") return RenderFormat::Csv;
    if (name == "json") return RenderFormat::Json;
    if (name == "svg") return RenderFormat::Svg;
    return std::nullopt;
}

namespace {

[[noreturn]] void reject_svg(const char* what) {
    throw ValidationError(std::string("svg output is only available for the "
                                      "model comparison, not for ") + what);
}

std::string note_line(const AuditNote& note) {
    return "  [" + std::string(verdict_name(note.verdict)) + "] " + note.subject +
           ": printed " + format_fixed(note.reported, note.printed_places) +
           ", recomputed " + format_double(note.recomputed);
}

nlohmann::json note_json(const AuditNote& note) {
    return {{"subject", note.subject},
            {"reported", note.reported},
            {"recomputed", note.recomputed},
            {"verdict", std::string(verdict_name(note.verdict))}};
}

void append_notes_csv(std::string& out, std::span<const AuditNote> notes) {
    out += "subject,reported,recomputed,verdict\n";
    for (const AuditNote& note : notes) {
        out += note.subject + ',' + format_double(note.reported) + ',' +
               format_double(note.recomputed) + ',' +
               std::string(verdict_name(note.verdict)) + '\n';
    }
}

} // namespace

std::string render_table2(const Table2Replay& replay, RenderFormat format) {
    switch (format) {
    case RenderFormat::Text: {
        std::string out = "recorded network predictions, re-audited\n\n";
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%6s  %6s", "serial", "actual");
        out += buf;
        for (const EvaluationReport& report : replay.reports) {
            std::snprintf(buf, sizeof(buf), "  %15s  %9s", report.label.c_str(),
                          "mre");
            out += buf;
        }
        out += '\n';
        const auto rows = table2();
        for (std::size_t i = 0; i < rows.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%6d  %6.1f", rows[i].serial,
                          rows[i].actual);
            out += buf;
            for (const EvaluationReport& report : replay.reports) {
                std::snprintf(buf, sizeof(buf), "  %15.2f  %9.4f",
                              report.pairs[i].predicted, report.mres[i]);
                out += buf;
            }
            out += '\n';
        }
        out += '\n';
        for (const EvaluationReport& report : replay.reports) {
            std::snprintf(buf, sizeof(buf),
                          "%-15s  MMRE %5.2f%%  Pred(0.25) %5.3f  n=%d\n",
                          report.label.c_str(), report.mmre_percent, report.pred25,
                          static_cast<int>(report.n));
            out += buf;
        }
        out += "\naudit:\n";
        for (const AuditNote& note : replay.notes) {
            out += note_line(note) + '\n';
        }
        return out;
    }
    case RenderFormat::Csv: {
        std::string out = "model,serial,actual,predicted,mre,printed_mre,verdict\n";
        std::size_t cursor = 0;
        for (const EvaluationReport& report : replay.reports) {
            for (std::size_t i = 0; i < report.pairs.size(); ++i) {
                const AuditNote& note = replay.notes[cursor++];
                out += report.label + ',' +
                       std::to_string(report.pairs[i].serial) + ',' +
                       format_double(report.pairs[i].actual) + ',' +
                       format_double(report.pairs[i].predicted) + ',' +
                       format_double(report.mres[i]) + ',' +
                       format_double(note.reported) + ',' +
                       std::string(verdict_name(note.verdict)) + '\n';
            }
            cursor += 2; // sum row + MMRE notes land in the aggregate section
        }
        out += "\nmodel,aggregate,reported,recomputed,verdict\n";
        cursor = 0;
        for (const EvaluationReport& report : replay.reports) {
            cursor += report.pairs.size();
            for (const char* name : {"mre_sum", "mmre_percent"}) {
                const AuditNote& note = replay.notes[cursor++];
                out += report.label + ',' + name + ',' +
                       format_double(note.reported) + ',' +
                       format_double(note.recomputed) + ',' +
                       std::string(verdict_name(note.verdict)) + '\n';
            }
        }
        return out;
    }
    case RenderFormat::Json: {
        nlohmann::json j;
        j["reports"] = nlohmann::json::array();
        for (const EvaluationReport& report : replay.reports) {
            j["reports"].push_back(nlohmann::json::parse(report_to_json(report)));
        }
        j["audit"] = nlohmann::json::array();
        for (const AuditNote& note : replay.notes) {
            j["audit"].push_back(note_json(note));
        }
        return j.dump(2) + "\n";
    }
    case RenderFormat::Svg: reject_svg("the recorded network table");
    }
    throw ValidationError("unsupported render format");
}

std::string render_table4(const Table4Replay& replay, RenderFormat format) {
    switch (format) {
    case RenderFormat::Text: {
        std::string out = "recorded fuzzy-system predictions, re-audited\n\n";
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%6s  %4s  %6s  %6s  %9s  %8s  %7s\n",
                      "serial", "tcoe", "cgpa", "actual", "predicted", "mre",
                      "printed");
        out += buf;
        const auto rows = table4();
        for (std::size_t i = 0; i < rows.size(); ++i) {
            std::snprintf(buf, sizeof(buf),
                          "%6d  %4d  %6.3f  %6.1f  %9.1f  %8.4f  %7.3f\n",
                          rows[i].serial, rows[i].tcoe, rows[i].cgpa,
                          rows[i].actual, rows[i].predicted, replay.full.mres[i],
                          rows[i].printed_mre);
            out += buf;
        }
        std::snprintf(buf, sizeof(buf),
                      "\n%-12s MMRE %5.2f%%  Pred(0.25) %5.3f  n=%d\n", "all rows:",
                      replay.full.mmre_percent, replay.full.pred25,
                      static_cast<int>(replay.full.n));
        out += buf;
        std::snprintf(buf, sizeof(buf),
                      "%-12s MMRE %5.2f%%  Pred(0.25) %5.3f  n=%d\n",
                      "serials 31+:", replay.subset.mmre_percent,
                      replay.subset.pred25, static_cast<int>(replay.subset.n));
        out += buf;
        for (const std::string& note : replay.full.notes) {
            out += "note: " + note + '\n';
        }
        out += "\naudit:\n";
        for (const AuditNote& note : replay.notes) {
            out += note_line(note) + '\n';
        }
        return out;
    }
    case RenderFormat::Csv: {
        std::string out =
            "serial,tcoe,cgpa,actual,predicted,mre,printed_mre,verdict\n";
        const auto rows = table4();
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const AuditNote& note = replay.notes[i];
            out += std::to_string(rows[i].serial) + ',' +
                   std::to_string(rows[i].tcoe) + ',' +
                   format_double(rows[i].cgpa) + ',' +
                   format_double(rows[i].actual) + ',' +
                   format_double(rows[i].predicted) + ',' +
                   format_double(replay.full.mres[i]) + ',' +
                   format_double(rows[i].printed_mre) + ',' +
                   std::string(verdict_name(note.verdict)) + '\n';
        }
        out += '\n';
        append_notes_csv(out,
                         std::span<const AuditNote>(replay.notes)
                             .subspan(rows.size()));
        return out;
    }
    case RenderFormat::Json: {
        nlohmann::json j;
        j["full"] = nlohmann::json::parse(report_to_json(replay.full));
        j["subset"] = nlohmann::json::parse(report_to_json(replay.subset));
        j["audit"] = nlohmann::json::array();
        for (const AuditNote& note : replay.notes) {
            j["audit"].push_back(note_json(note));
        }
        return j.dump(2) + "\n";
    }
    case RenderFormat::Svg: reject_svg("the recorded fuzzy table");
    }
    throw ValidationError("unsupported render format");
}

std::string render_comparison(const Comparison& comparison, RenderFormat format) {
    switch (format) {
    case RenderFormat::Text: {
        std::string out = "model comparison, ascending by recomputed MMRE\n\n";
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%4s  %-18s  %8s  %8s  %10s  %4s\n",
                      "rank", "model", "MMRE%", "recorded", "Pred(0.25)", "n");
        out += buf;
        for (std::size_t i = 0; i < comparison.entries.size(); ++i) {
            const ComparisonEntry& entry = comparison.entries[i];
            std::string recorded = entry.reported_mmre_percent
                                       ? two(*entry.reported_mmre_percent)
                                       : std::string("-");
            std::snprintf(buf, sizeof(buf), "%4zu  %-18s  %8.2f  %8s  %10.3f  %4d\n",
                          i + 1, entry.label.c_str(), entry.mmre_percent,
                          recorded.c_str(), entry.pred25, entry.n);
            out += buf;
        }
        if (!comparison.notes.empty()) {
            out += "\nnotes:\n";
            for (const std::string& note : comparison.notes) {
                out += "  - " + note + '\n';
            }
        }
        return out;
    }
    case RenderFormat::Csv: {
        std::string out = "rank,label,mmre_percent,reported_mmre_percent,pred25,n\n";
        for (std::size_t i = 0; i < comparison.entries.size(); ++i) {
            const ComparisonEntry& entry = comparison.entries[i];
            out += std::to_string(i + 1) + ',' + entry.label + ',' +
                   format_double(entry.mmre_percent) + ',' +
                   (entry.reported_mmre_percent
                        ? format_double(*entry.reported_mmre_percent)
                        : std::string()) +
                   ',' + format_double(entry.pred25) + ',' +
                   std::to_string(entry.n) + '\n';
        }
        if (!comparison.notes.empty()) {
            out += "\nnote\n";
            for (const std::string& note : comparison.notes) {
                out += note + '\n';
            }
        }
        return out;
    }
    case RenderFormat::Json: {
        nlohmann::json j;
        j["entries"] = nlohmann::json::array();
        for (std::size_t i = 0; i < comparison.entries.size(); ++i) {
            const ComparisonEntry& entry = comparison.entries[i];
            nlohmann::json e = {{"rank", i + 1},
                                {"label", entry.label},
                                {"mmre_percent", entry.mmre_percent},
                                {"pred25", entry.pred25},
                                {"n", entry.n}};
            if (entry.reported_mmre_percent) {
                e["reported_mmre_percent"] = *entry.reported_mmre_percent;
            }
            j["entries"].push_back(std::move(e));
        }
        j["notes"] = comparison.notes;
        return j.dump(2) + "\n";
    }
    case RenderFormat::Svg: return comparison_svg(comparison);
    }
    throw ValidationError("unsupported render format");
}

std::string comparison_svg(const Comparison& comparison) {
    // One bar per model. Fixed canvas, bars laid out left to right in rank
    // order, height proportional to MMRE%.
    const int width = 640;
    const int height = 360;
    const int plot_left = 60;
    const int plot_top = 40;
    const int plot_bottom = height - 60;
    const int plot_height = plot_bottom - plot_top;
    double max_mmre = 0;
    for (const ComparisonEntry& entry : comparison.entries) {
        max_mmre = std::max(max_mmre, entry.mmre_percent);
    }
    if (max_mmre <= 0) max_mmre = 1;

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
           std::to_string(width) + "\" height=\"" + std::to_string(height) +
           "\">\n";
    out += "  <title>MMRE% by model</title>\n";
    out += "  <line x1=\"" + std::to_string(plot_left) + "\" y1=\"" +
           std::to_string(plot_bottom) + "\" x2=\"" + std::to_string(width - 20) +
           "\" y2=\"" + std::to_string(plot_bottom) +
           "\" stroke=\"#444444\" stroke-width=\"1\"/>\n";

    const std::size_t count = comparison.entries.size();
    const double slot = static_cast<double>(width - plot_left - 20) /
                        static_cast<double>(count);
    for (std::size_t i = 0; i < count; ++i) {
        const ComparisonEntry& entry = comparison.entries[i];
        const double bar_height = plot_height * entry.mmre_percent / max_mmre;
        const double x = plot_left + slot * static_cast<double>(i) + slot * 0.15;
        const double bar_width = slot * 0.7;
        const double y = plot_bottom - bar_height;
        out += "  <rect x=\"" + format_double(x) + "\" y=\"" + format_double(y) +
               "\" width=\"" + format_double(bar_width) + "\" height=\"" +
               format_double(bar_height) + "\" fill=\"#4878a8\"/>\n";
        out += "  <text x=\"" + format_double(x + bar_width / 2) + "\" y=\"" +
               format_double(y - 6) +
               "\" text-anchor=\"middle\" font-size=\"13\">" +
               two(entry.mmre_percent) + "%</text>\n";
        out += "  <text x=\"" + format_double(x + bar_width / 2) + "\" y=\"" +
               std::to_string(plot_bottom + 18) +
               "\" text-anchor=\"middle\" font-size=\"12\">" + entry.label +
               "</text>\n";
    }
    out += "  <text x=\"" + std::to_string(plot_left) + "\" y=\"24\" "
           "font-size=\"15\">MMRE% by model (lower is better)</text>\n";
    out += "</svg>\n";
    return out;
}

} // namespace effortlab::replay
