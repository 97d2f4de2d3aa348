#pragma once

#include <array>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace effortlab {

/// One student project row: ERD counts, academic grade, effort in weeks.
struct ProjectRecord {
    int serial = 0;   // >= 1, unique within a dataset
    int tcoe = 0;     // entity count, >= 1
    int tcoa = 0;     // attribute count, >= 1
    int tcor = 0;     // relationship count, >= 1
    double cgpa = 0;  // grade point, (0, 10]
    double rde = 0;   // effort in weeks, > 0

    bool operator==(const ProjectRecord&) const = default;
};

/// Record fields usable as model inputs.
enum class Feature { Tcoe, Tcoa, Tcor, Cgpa };

inline constexpr std::array<Feature, 4> kAllFeatures = {
    Feature::Tcoe, Feature::Tcoa, Feature::Tcor, Feature::Cgpa};

std::string_view feature_name(Feature f);
std::optional<Feature> feature_from_name(std::string_view name); // case-insensitive
double feature_value(const ProjectRecord& record, Feature f);

struct Dataset {
    std::vector<ProjectRecord> records;
    std::string source; // "embedded" or a file path / caller label

    const ProjectRecord* find(int serial) const;
    bool operator==(const Dataset& other) const { return records == other.records; }
};

/// The embedded 41-record student dataset. Stable across runs.
Dataset builtin_dataset();

/// Throws ValidationError naming the field and serial on any bound violation.
void validate_record(const ProjectRecord& record);

/// Parse CSV with header `serial,tcoe,tcoa,tcor,cgpa,rde`. LF or CRLF.
/// Malformed rows raise ParseError naming the line; invariant violations
/// raise ValidationError naming the field and serial.
Dataset load_dataset(std::istream& in, std::string source = "stream");
Dataset load_dataset_text(std::string_view csv, std::string source = "text");

/// CSV serialisation (round-trips through load_dataset_text by value).
std::string serialize_dataset(const Dataset& dataset);

struct Split {
    Dataset train; // serials 1..31
    Dataset test;  // serials 31..41 -- serial 31 is in both halves
};

/// The split the recorded results were scored with. Requires serials 1..41
/// each present exactly once. Serial 31 lands in both halves; reports built
/// on the test half should carry recorded_split_note() so the overlap stays
/// visible.
Split recorded_split(const Dataset& dataset);

/// One-line note for reports that use the test half, spelling out the split.
std::string recorded_split_note();

struct Range {
    double lo = 0;
    double hi = 0;

    bool operator==(const Range&) const = default;
};

/// Affine [0,1] scaling fitted on training extrema. Test-side values may
/// fall outside [0,1]; they are not clamped.
struct NormalizationParams {
    std::vector<Feature> features;
    std::vector<Range> feature_ranges; // parallel to `features`
    Range target_range;                // rde extrema

    std::vector<double> normalize(const ProjectRecord& record) const;
    double normalize_feature(std::size_t index, double value) const;
    double denormalize_feature(std::size_t index, double value) const;
    double normalize_target(double rde) const;
    double denormalize_target(double value) const;

    bool operator==(const NormalizationParams&) const = default;
};

/// Fit min/max parameters on a training set. Throws ValidationError when a
/// selected feature (or the target) is constant, naming it.
NormalizationParams min_max_normalize(const Dataset& train,
                                      std::span<const Feature> features = kAllFeatures);

} // namespace effortlab
