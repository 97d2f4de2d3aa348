#include <doctest.h>

#include <cmath>
#include <vector>

#include "effortlab/errors.hpp"
#include "effortlab/format.hpp"
#include "effortlab/metrics.hpp"
#include "effortlab/rng.hpp"

using namespace effortlab;

namespace {

// The three recorded prediction columns for serials 31-41, used as known
// inputs with independently computed aggregates.
const std::vector<PredictionPair> kFfbp = {
    {31, 65, 69.39}, {32, 75, 67.73}, {33, 65, 79.03}, {34, 65, 79.03},
    {35, 70, 55.00}, {36, 70, 55.21}, {37, 70, 60.07}, {38, 65, 58.85},
    {39, 75, 79.16}, {40, 75, 79.16}, {41, 75, 79.20}};
const std::vector<PredictionPair> kCascade = {
    {31, 65, 79.71}, {32, 75, 66.26}, {33, 65, 55.06}, {34, 65, 55.05},
    {35, 70, 77.46}, {36, 70, 74.66}, {37, 70, 72.86}, {38, 65, 62.28},
    {39, 75, 61.54}, {40, 75, 64.05}, {41, 75, 55.14}};
const std::vector<PredictionPair> kLrnn = {
    {31, 65, 79.73}, {32, 75, 69.17}, {33, 65, 80.00}, {34, 65, 80.00},
    {35, 70, 69.11}, {36, 70, 69.39}, {37, 70, 69.44}, {38, 65, 67.77},
    {39, 75, 68.31}, {40, 75, 70.04}, {41, 75, 55.06}};

} // namespace

TEST_CASE("mre matches the recorded cells after display rounding") {
    CHECK(mre(65, 69.39) == std::abs(65.0 - 69.39) / 65.0);
    CHECK(round_to(mre(65, 69.39), 2) == doctest::Approx(0.07).epsilon(1e-12));
    CHECK(round_to(mre(70, 75), 3) == doctest::Approx(0.071).epsilon(1e-12));
    CHECK(mre(62.5, 62.5) == 0.0);
}

TEST_CASE("mre rejects non-positive actuals") {
    CHECK_THROWS_AS(mre(0, 10), NumericError);
    CHECK_THROWS_AS(mre(-5, 10), NumericError);
}

TEST_CASE("mmre of the recorded columns reproduces the printed aggregates") {
    // Sums and means frozen from independent summation of the exact MREs.
    double sum = 0;
    for (const PredictionPair& p : kFfbp) sum += mre(p.actual, p.predicted);
    CHECK(sum == doctest::Approx(1.4251413919413916).epsilon(1e-14));
    CHECK(mmre(kFfbp) == doctest::Approx(0.1295583083583083).epsilon(1e-14));
    CHECK(format_fixed(mmre(kFfbp) * 100.0, 2) == "12.96");

    CHECK(mmre(kCascade) == doctest::Approx(0.1359048951048951).epsilon(1e-14));
    CHECK(format_fixed(mmre(kCascade) * 100.0, 2) == "13.59");

    CHECK(mmre(kLrnn) == doctest::Approx(0.11446646686646683).epsilon(1e-14));
    CHECK(format_fixed(mmre(kLrnn) * 100.0, 2) == "11.45");
}

TEST_CASE("mmre of all-exact predictions is zero") {
    const std::vector<PredictionPair> pairs = {{1, 70, 70}, {2, 55, 55}};
    CHECK(mmre(pairs) == 0.0);
}

TEST_CASE("mmre and pred_at reject empty input") {
    const std::vector<PredictionPair> none;
    CHECK_THROWS_AS(mmre(none), NumericError);
    CHECK_THROWS_AS(pred_at(none, 0.25), NumericError);
    CHECK_THROWS_AS(evaluate("empty", {}), NumericError);
}

TEST_CASE("pred_at counts the recorded columns correctly") {
    CHECK(pred_at(kFfbp, 0.25) == 1.0); // max exact MRE 0.2158
    CHECK(pred_at(kCascade, 0.25) == doctest::Approx(10.0 / 11.0).epsilon(1e-14));
    // Only serial 41 (0.26587) exceeds the threshold.
    CHECK(pred_at(kLrnn, 0.25) == doctest::Approx(10.0 / 11.0).epsilon(1e-14));

    const std::vector<PredictionPair> off = {{1, 70, 71}};
    CHECK(pred_at(off, 0.0) == 0.0);
}

TEST_CASE("pred_at is monotone in the threshold") {
    double prev = -1;
    for (double q : {0.0, 0.05, 0.1, 0.2, 0.25, 0.3, 1.0}) {
        const double v = pred_at(kCascade, q);
        CHECK(v >= prev);
        prev = v;
    }
    double max_mre = 0;
    for (const PredictionPair& p : kCascade) {
        max_mre = std::max(max_mre, mre(p.actual, p.predicted));
    }
    CHECK(pred_at(kCascade, max_mre) == 1.0);
}

TEST_CASE("bre divides by the smaller operand") {
    CHECK(bre(75, 55.06) == doctest::Approx(0.36215038140210676).epsilon(1e-14));
    CHECK(bre(62.5, 62.5) == 0.0);
    CHECK(bre(70, 75) == std::abs(70.0 - 75.0) / 70.0); // min is the actual
    CHECK_THROWS_AS(bre(0, 10), NumericError);
    CHECK_THROWS_AS(bre(70, 0), NumericError);
    CHECK_THROWS_AS(bre(70, -1), NumericError);
}

TEST_CASE("mre is scale invariant and never exceeds bre") {
    SplitMix64 rng(99);
    for (int i = 0; i < 1000; ++i) {
        const double actual = 1e-3 + rng.next_unit() * 200.0;
        const double predicted = 1e-3 + rng.next_unit() * 200.0;
        const double base = mre(actual, predicted);
        for (double k : {0.5, 2.0, 10.0}) {
            const double scaled = mre(k * actual, k * predicted);
            CHECK(std::abs(scaled - base) <=
                  1e-12 * std::max(std::abs(scaled), std::abs(base)));
        }
        CHECK(bre(actual, predicted) >= base);
        if (predicted >= actual) {
            CHECK(bre(actual, predicted) == base);
        }
    }
}

TEST_CASE("evaluate fills every aggregate") {
    const EvaluationReport report = evaluate("cascade columns", kCascade);
    CHECK(report.label == "cascade columns");
    CHECK(report.n == 11);
    REQUIRE(report.mres.size() == 11);
    CHECK(report.mmre == doctest::Approx(0.1359048951048951).epsilon(1e-14));
    CHECK(report.mmre_percent == doctest::Approx(13.59048951048951).epsilon(1e-12));
    CHECK(report.pred25 == doctest::Approx(10.0 / 11.0).epsilon(1e-14));
    CHECK(report.mean_bre_percent > report.mmre_percent); // underestimates present

    double lo = 1e9;
    double hi = -1e9;
    for (double m : report.mres) {
        lo = std::min(lo, m);
        hi = std::max(hi, m);
    }
    CHECK(report.mmre >= lo);
    CHECK(report.mmre <= hi);

    const EvaluationReport exact = evaluate("exact", {{1, 70, 70}});
    CHECK(exact.mmre == 0.0);
    CHECK(exact.pred25 == 1.0);
    CHECK(exact.mean_bre_percent == 0.0);
}

TEST_CASE("report csv round-trips with identical values") {
    EvaluationReport report = evaluate("columns", kLrnn);
    report.notes.push_back("recorded split: test half");
    const std::string csv = report_to_csv(report);
    CHECK(csv.find("serial,actual,predicted,mre") != std::string::npos);
    CHECK(csv.find("mmre_percent,") != std::string::npos);
    CHECK(csv.find("pred25,") != std::string::npos);
    CHECK(csv.find("mean_bre_percent,") != std::string::npos);
    CHECK(csv.find("n,11") != std::string::npos);

    const EvaluationReport back = report_from_csv(csv);
    CHECK(back.pairs == report.pairs);
    CHECK(back.mmre == report.mmre);
    CHECK(back.pred25 == report.pred25);
    CHECK(report_to_csv(back) == csv);
}

TEST_CASE("report json round-trips with identical values") {
    EvaluationReport report = evaluate("columns", kFfbp);
    report.notes.push_back("a note");
    const std::string json_text = report_to_json(report);
    const EvaluationReport back = report_from_json(json_text);
    CHECK(back.label == report.label);
    CHECK(back.pairs == report.pairs);
    CHECK(back.mmre == report.mmre);
    CHECK(back.notes == report.notes);
    CHECK(report_to_json(back) == json_text);
}

TEST_CASE("report text shows the aggregates and notes") {
    EvaluationReport report = evaluate("columns", kFfbp);
    report.notes.push_back("visible note");
    const std::string text = report_to_text(report);
    CHECK(text.find("12.96") != std::string::npos);
    CHECK(text.find("note: visible note") != std::string::npos);
    CHECK(text.find("n=11") != std::string::npos);
}

TEST_CASE("evaluate propagates bre errors for non-positive predictions") {
    CHECK_THROWS_AS(evaluate("bad", {{1, 70, -5}}), NumericError);
}
