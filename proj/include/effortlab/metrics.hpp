#pragma once

#include <span>
#include <string>
#include <vector>

namespace effortlab {

struct PredictionPair {
    int serial = 0;
    double actual = 0;    // weeks, > 0
    double predicted = 0; // weeks; > 0 required for BRE only

    bool operator==(const PredictionPair&) const = default;
};

/// |actual - predicted| / actual. Throws NumericError when actual <= 0.
double mre(double actual, double predicted);

/// Mean of the unrounded MREs. Rounding happens only at display time; that
/// is what reproduces the published aggregates.
double mmre(std::span<const PredictionPair> pairs);

/// Fraction of pairs with MRE <= threshold.
double pred_at(std::span<const PredictionPair> pairs, double threshold);

/// Balanced relative error: |actual - predicted| / min(actual, predicted).
double bre(double actual, double predicted);

struct EvaluationReport {
    std::string label;
    std::vector<PredictionPair> pairs;
    std::vector<double> mres; // parallel to pairs, unrounded
    double mmre = 0;
    double mmre_percent = 0;
    double pred25 = 0;
    double mean_bre_percent = 0;
    std::size_t n = 0;
    std::vector<std::string> notes; // free-form context / discrepancy strings
};

/// Populate every report field from the metric primitives above.
EvaluationReport evaluate(std::string label, std::vector<PredictionPair> pairs);

// Serialisations. CSV is one row per pair plus aggregate footer rows with
// fixed field names; JSON is the structured-object format consumed by
// `report compare`. Values round-trip exactly (shortest-round-trip decimals).
std::string report_to_csv(const EvaluationReport& report);
EvaluationReport report_from_csv(std::string_view csv);
std::string report_to_json(const EvaluationReport& report);
EvaluationReport report_from_json(const std::string& json_text);
std::string report_to_text(const EvaluationReport& report);

} // namespace effortlab
