#include "effortlab/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

#include "effortlab/errors.hpp"
#include "effortlab/format.hpp"

namespace effortlab {

namespace {

// Table of 41 student projects: serial, tcoe, tcoa, tcor, cgpa, rde.
constexpr ProjectRecord kStudentDataset[] = {
    {1, 24, 70, 29, 6.219, 75},  {2, 24, 70, 29, 8.012, 75},
    {3, 24, 70, 29, 7.733, 75},  {4, 10, 56, 9, 7.564, 70},
    {5, 5, 44, 5, 5.519, 55},    {6, 19, 47, 11, 7.507, 70},
    {7, 8, 33, 9, 6.171, 75},    {8, 8, 33, 9, 6.705, 75},
    {9, 17, 53, 7, 7.629, 75},   {10, 9, 37, 7, 8.130, 70},
    {11, 10, 36, 8, 8.083, 65},  {12, 10, 36, 8, 8.126, 65},
    {13, 10, 36, 8, 7.202, 65},  {14, 5, 17, 5, 8.417, 65},
    {15, 5, 16, 7, 7.757, 70},   {16, 4, 26, 4, 7.431, 70},
    {17, 4, 26, 4, 7.121, 70},   {18, 4, 26, 4, 7.660, 70},
    {19, 7, 34, 6, 8.017, 75},   {20, 7, 34, 6, 9.076, 75},
    {21, 7, 27, 5, 7.550, 70},   {22, 6, 37, 5, 6.583, 65},
    {23, 6, 27, 12, 7.276, 65},  {24, 6, 27, 12, 8.124, 65},
    {25, 5, 26, 4, 6.530, 75},   {26, 5, 26, 4, 6.685, 70},
    {27, 6, 28, 6, 7.843, 65},   {28, 7, 38, 9, 9.160, 70},
    {29, 7, 38, 9, 8.617, 75},   {30, 6, 18, 3, 8.719, 80},
    {31, 4, 22, 3, 8.860, 65},   {32, 5, 18, 5, 7.664, 75},
    {33, 16, 85, 15, 6.795, 65}, {34, 16, 85, 15, 6.757, 65},
    {35, 9, 36, 9, 6.207, 70},   {36, 9, 36, 9, 6.636, 70},
    {37, 9, 36, 9, 6.790, 70},   {38, 8, 24, 7, 8.095, 65},
    {39, 20, 115, 22, 7.990, 75}, {40, 20, 115, 22, 8.095, 75},
    {41, 15, 60, 9, 6.340, 75},
};

constexpr std::string_view kCsvHeader = "serial,tcoe,tcoa,tcor,cgpa,rde";

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

double parse_field(std::string_view token, std::string_view name, int line_no) {
    token = trim(token);
    if (token.empty()) {
        throw ParseError("empty field '" + std::string(name) + "'", line_no);
    }
    try {
        return parse_double(token, name);
    } catch (const ValidationError& e) {
        throw ParseError(e.what(), line_no);
    }
}

int integral_count(double value, std::string_view field, int serial) {
    if (value != std::floor(value)) {
        throw ValidationError(std::string(field) + " must be integral in record serial " +
                              std::to_string(serial) + ", got " + format_double(value));
    }
    return static_cast<int>(value);
}

} // namespace

std::string_view feature_name(Feature f) {
    switch (f) {
    case Feature::Tcoe: return "tcoe";
    case Feature::Tcoa: return "tcoa";
    case Feature::Tcor: return "tcor";
    case Feature::Cgpa: return "cgpa";
    }
    return "?";
}

std::optional<Feature> feature_from_name(std::string_view name) {
    std::string n = lower(name);
    for (Feature f : kAllFeatures) {
        if (n == feature_name(f)) {
            return f;
        }
    }
    return std::nullopt;
}

double feature_value(const ProjectRecord& record, Feature f) {
    switch (f) {
    case Feature::Tcoe: return record.tcoe;
    case Feature::Tcoa: return record.tcoa;
    case Feature::Tcor: return record.tcor;
    case Feature::Cgpa: return record.cgpa;
    }
    return 0;
}

const ProjectRecord* Dataset::find(int serial) const {
    for (const ProjectRecord& r : records) {
        if (r.serial == serial) {
            return &r;
        }
    }
    return nullptr;
}

Dataset builtin_dataset() {
    Dataset out;
    out.source = "embedded";
    out.records.assign(std::begin(kStudentDataset), std::end(kStudentDataset));
    return out;
}

void validate_record(const ProjectRecord& r) {
    auto fail = [&](std::string_view field, const std::string& why) {
        throw ValidationError("record serial " + std::to_string(r.serial) + ": " +
                              std::string(field) + " " + why);
    };
    if (r.serial < 1) {
        throw ValidationError("serial must be >= 1, got " + std::to_string(r.serial));
    }
    if (r.tcoe < 1) fail("tcoe", "must be a count >= 1, got " + std::to_string(r.tcoe));
    if (r.tcoa < 1) fail("tcoa", "must be a count >= 1, got " + std::to_string(r.tcoa));
    if (r.tcor < 1) fail("tcor", "must be a count >= 1, got " + std::to_string(r.tcor));
    if (!(r.cgpa > 0.0 && r.cgpa <= 10.0)) {
        fail("cgpa", "must lie in (0, 10], got " + format_double(r.cgpa));
    }
    if (!(r.rde > 0.0)) fail("rde", "must be > 0 weeks, got " + format_double(r.rde));
}

Dataset load_dataset_text(std::string_view csv, std::string source) {
    Dataset out;
    out.source = std::move(source);

    std::size_t pos = 0;
    int line_no = 0;
    bool saw_header = false;
    std::set<int> seen_serials;

    while (pos <= csv.size()) {
        std::size_t eol = csv.find('\n', pos);
        std::string_view line = (eol == std::string_view::npos)
                                    ? csv.substr(pos)
                                    : csv.substr(pos, eol - pos);
        pos = (eol == std::string_view::npos) ? csv.size() + 1 : eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (trim(line).empty()) {
            continue;
        }
        if (!saw_header) {
            if (lower(std::string(trim(line))) != kCsvHeader) {
                throw ParseError("expected header '" + std::string(kCsvHeader) + "', got '" +
                                 std::string(line) + "'", line_no);
            }
            saw_header = true;
            continue;
        }

        auto fields = split_fields(line);
        if (fields.size() != 6) {
            throw ParseError("expected 6 fields, got " + std::to_string(fields.size()),
                             line_no);
        }
        double serial_raw = parse_field(fields[0], "serial", line_no);
        if (serial_raw != std::floor(serial_raw) || serial_raw < 1) {
            throw ParseError("serial must be a positive integer, got " +
                             format_double(serial_raw), line_no);
        }
        ProjectRecord r;
        r.serial = static_cast<int>(serial_raw);
        r.tcoe = integral_count(parse_field(fields[1], "tcoe", line_no), "tcoe", r.serial);
        r.tcoa = integral_count(parse_field(fields[2], "tcoa", line_no), "tcoa", r.serial);
        r.tcor = integral_count(parse_field(fields[3], "tcor", line_no), "tcor", r.serial);
        r.cgpa = parse_field(fields[4], "cgpa", line_no);
        r.rde = parse_field(fields[5], "rde", line_no);
        validate_record(r);
        if (!seen_serials.insert(r.serial).second) {
            throw ValidationError("duplicate serial " + std::to_string(r.serial));
        }
        out.records.push_back(r);
    }
    if (!saw_header) {
        throw ParseError("empty input, expected header '" + std::string(kCsvHeader) + "'", 1);
    }
    return out;
}

Dataset load_dataset(std::istream& in, std::string source) {
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return load_dataset_text(buffer.str(), std::move(source));
}

std::string serialize_dataset(const Dataset& dataset) {
    std::string out(kCsvHeader);
    out += '\n';
    for (const ProjectRecord& r : dataset.records) {
        out += std::to_string(r.serial);
        out += ',' + std::to_string(r.tcoe);
        out += ',' + std::to_string(r.tcoa);
        out += ',' + std::to_string(r.tcor);
        out += ',' + format_double(r.cgpa);
        out += ',' + format_double(r.rde);
        out += '\n';
    }
    return out;
}

Split recorded_split(const Dataset& dataset) {
    for (int serial = 1; serial <= 41; ++serial) {
        if (dataset.find(serial) == nullptr) {
            throw ValidationError("recorded split requires serials 1..41; serial " +
                                  std::to_string(serial) + " is missing from " +
                                  dataset.source);
        }
    }
    if (dataset.records.size() != 41) {
        throw ValidationError("recorded split requires exactly 41 records, got " +
                              std::to_string(dataset.records.size()));
    }
    Split split;
    split.train.source = dataset.source + " [train serials 1-31]";
    split.test.source = dataset.source + " [test serials 31-41]";
    for (const ProjectRecord& r : dataset.records) {
        if (r.serial <= 31) {
            split.train.records.push_back(r);
        }
        if (r.serial >= 31) {
            split.test.records.push_back(r);
        }
    }
    return split;
}

std::string recorded_split_note() {
    return "recorded split: train serials 1-31 (31 records), test serials 31-41 "
           "(11 records); serial 31 appears in both halves";
}

std::vector<double> NormalizationParams::normalize(const ProjectRecord& record) const {
    std::vector<double> out(features.size());
    for (std::size_t i = 0; i < features.size(); ++i) {
        out[i] = normalize_feature(i, feature_value(record, features[i]));
    }
    return out;
}

double NormalizationParams::normalize_feature(std::size_t index, double value) const {
    const Range& r = feature_ranges.at(index);
    return (value - r.lo) / (r.hi - r.lo);
}

double NormalizationParams::denormalize_feature(std::size_t index, double value) const {
    const Range& r = feature_ranges.at(index);
    return r.lo + value * (r.hi - r.lo);
}

double NormalizationParams::normalize_target(double rde) const {
    return (rde - target_range.lo) / (target_range.hi - target_range.lo);
}

double NormalizationParams::denormalize_target(double value) const {
    return target_range.lo + value * (target_range.hi - target_range.lo);
}

NormalizationParams min_max_normalize(const Dataset& train,
                                      std::span<const Feature> features) {
    if (train.records.empty()) {
        throw ValidationError("cannot fit normalization on an empty training set");
    }
    if (features.empty()) {
        throw ValidationError("normalization needs at least one feature");
    }
    NormalizationParams params;
    params.features.assign(features.begin(), features.end());
    for (Feature f : features) {
        Range r{feature_value(train.records.front(), f),
                feature_value(train.records.front(), f)};
        for (const ProjectRecord& rec : train.records) {
            double v = feature_value(rec, f);
            r.lo = std::min(r.lo, v);
            r.hi = std::max(r.hi, v);
        }
        if (r.lo == r.hi) {
            throw ValidationError("feature " + std::string(feature_name(f)) +
                                  " is constant on the training set (value " +
                                  format_double(r.lo) + "); cannot min-max scale");
        }
        params.feature_ranges.push_back(r);
    }
    Range t{train.records.front().rde, train.records.front().rde};
    for (const ProjectRecord& rec : train.records) {
        t.lo = std::min(t.lo, rec.rde);
        t.hi = std::max(t.hi, rec.rde);
    }
    if (t.lo == t.hi) {
        throw ValidationError("target rde is constant on the training set (value " +
                              format_double(t.lo) + "); cannot min-max scale");
    }
    params.target_range = t;
    return params;
}

} // namespace effortlab
