#include <algorithm>
#include <cctype>
#include <set>
#include <string>
#include <vector>

#include "effortlab/errors.hpp"
#include "effortlab/format.hpp"
#include "effortlab/fuzzy.hpp"
#include "effortlab/metrics.hpp"

namespace effortlab::fuzzy {

namespace {

std::vector<std::string> split_ws(std::string_view line) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        if (std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
            continue;
        }
        if (line[i] == '#') {
            break;
        }
        std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) &&
               line[i] != '#') {
            ++i;
        }
        out.emplace_back(line.substr(start, i - start));
    }
    return out;
}

} // namespace

Grid parse_grid(std::string_view text) {
    Grid grid;
    std::set<std::string> targets;
    std::size_t pos = 0;
    int line_no = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line = (eol == std::string_view::npos)
                                    ? text.substr(pos)
                                    : text.substr(pos, eol - pos);
        pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        std::vector<std::string> tokens = split_ws(line);
        if (tokens.empty()) {
            continue;
        }
        if (tokens[0] != "param") {
            throw ParseError("expected: param <target> <v1> [v2 ...], got '" + tokens[0] +
                             "'", line_no);
        }
        if (tokens.size() < 3) {
            throw ParseError("param needs a target and at least one candidate", line_no);
        }
        GridAxis axis;
        axis.target = tokens[1];
        if (!targets.insert(axis.target).second) {
            throw ParseError("duplicate grid target '" + axis.target + "'", line_no);
        }
        for (std::size_t i = 2; i < tokens.size(); ++i) {
            try {
                axis.candidates.push_back(parse_double(tokens[i], "candidate"));
            } catch (const ValidationError& e) {
                throw ParseError(e.what(), line_no);
            }
        }
        grid.push_back(std::move(axis));
    }
    if (grid.empty()) {
        throw ParseError("grid has no 'param' lines", line_no == 0 ? 1 : line_no);
    }
    return grid;
}

std::size_t grid_size(const Grid& grid) {
    std::size_t total = 1;
    for (const GridAxis& axis : grid) {
        total *= axis.candidates.size();
    }
    return total;
}

std::vector<std::size_t> grid_choice(const Grid& grid, std::size_t index) {
    std::vector<std::size_t> choice(grid.size());
    for (std::size_t axis = grid.size(); axis-- > 0;) {
        const std::size_t size = grid[axis].candidates.size();
        choice[axis] = index % size;
        index /= size;
    }
    if (index != 0) {
        throw ValidationError("grid point index out of range");
    }
    return choice;
}

namespace {

void apply_axis(FisConfig& config, const std::string& target, double value) {
    // rule[<i>].weight
    if (target.rfind("rule[", 0) == 0) {
        const std::size_t close = target.find("].weight");
        if (close == std::string::npos || close + 8 != target.size()) {
            throw ValidationError("grid target '" + target +
                                  "' is not of the form rule[<i>].weight");
        }
        const std::string idx_text = target.substr(5, close - 5);
        const double idx_raw = parse_double(idx_text, "rule index");
        const auto idx = static_cast<std::size_t>(idx_raw);
        if (idx_raw != static_cast<double>(idx) || idx < 1 || idx > config.rules.size()) {
            throw ValidationError("grid target '" + target + "': rule index out of range 1.." +
                                  std::to_string(config.rules.size()));
        }
        config.rules[idx - 1].weight = value;
        return;
    }

    // <Var>.<Term>.center | <Var>.<Term>.width
    const std::size_t first = target.find('.');
    const std::size_t last = target.rfind('.');
    if (first == std::string::npos || first == last) {
        throw ValidationError("grid target '" + target +
                              "' is not <Var>.<Term>.center|width or rule[<i>].weight");
    }
    const std::string var_name = target.substr(0, first);
    const std::string term_label = target.substr(first + 1, last - first - 1);
    const std::string attribute = target.substr(last + 1);

    LinguisticVariable* var = nullptr;
    for (LinguisticVariable& v : config.inputs) {
        if (v.name == var_name) {
            var = &v;
        }
    }
    if (config.output.name == var_name) {
        var = &config.output;
    }
    if (var == nullptr) {
        throw ValidationError("grid target '" + target + "': unknown variable '" +
                              var_name + "'");
    }
    Term* term = nullptr;
    for (Term& t : var->terms) {
        if (t.label == term_label) {
            term = &t;
        }
    }
    if (term == nullptr) {
        throw ValidationError("grid target '" + target + "': unknown term '" + term_label +
                              "' of variable " + var_name);
    }
    if (attribute == "center") {
        term->mf = term->mf.translated(value);
    } else if (attribute == "width") {
        term->mf = term->mf.with_width(value);
    } else {
        throw ValidationError("grid target '" + target + "': unknown attribute '" +
                              attribute + "' (want center or width)");
    }
}

} // namespace

FisConfig apply_grid_point(const FisConfig& base, const Grid& grid,
                           std::span<const std::size_t> choice) {
    if (choice.size() != grid.size()) {
        throw ValidationError("grid choice size does not match axis count");
    }
    FisConfig config = base;
    for (std::size_t axis = 0; axis < grid.size(); ++axis) {
        if (choice[axis] >= grid[axis].candidates.size()) {
            throw ValidationError("grid choice out of range for target '" +
                                  grid[axis].target + "'");
        }
        apply_axis(config, grid[axis].target, grid[axis].candidates[choice[axis]]);
    }
    try {
        validate(config);
    } catch (const ValidationError& e) {
        throw ValidationError("invalid grid point for targets " +
                              [&] {
                                  std::string t;
                                  for (const GridAxis& a : grid) {
                                      t += (t.empty() ? "" : ", ") + a.target;
                                  }
                                  return t;
                              }() + ": " + e.what());
    }
    return config;
}

InputBinding bind_inputs_by_name(const FisConfig& config) {
    InputBinding binding;
    for (const LinguisticVariable& var : config.inputs) {
        std::optional<Feature> feature = feature_from_name(var.name);
        if (!feature) {
            throw ValidationError("input variable '" + var.name +
                                  "' does not match a record field (tcoe, tcoa, tcor, cgpa)");
        }
        binding.emplace_back(var.name, *feature);
    }
    return binding;
}

CrispInputs crisp_inputs_for(const InputBinding& binding, const ProjectRecord& record) {
    CrispInputs inputs;
    for (const auto& [name, feature] : binding) {
        inputs[name] = feature_value(record, feature);
    }
    return inputs;
}

TuneResult tune_fis(const FisConfig& base, const Grid& grid, const Dataset& data,
                    const InputBinding& binding) {
    if (grid.empty()) {
        throw ValidationError("tuning grid is empty");
    }
    for (const GridAxis& axis : grid) {
        if (axis.candidates.empty()) {
            throw ValidationError("grid target '" + axis.target + "' has no candidates");
        }
    }
    if (data.records.empty()) {
        throw ValidationError("tuning dataset is empty");
    }

    const std::size_t total = grid_size(grid);
    TuneResult result;
    result.trace.reserve(total);
    bool have_best = false;

    for (std::size_t index = 0; index < total; ++index) {
        const std::vector<std::size_t> choice = grid_choice(grid, index);
        FisConfig config = apply_grid_point(base, grid, choice);

        std::vector<PredictionPair> pairs;
        pairs.reserve(data.records.size());
        for (const ProjectRecord& record : data.records) {
            const InferResult inferred = infer(config, crisp_inputs_for(binding, record));
            pairs.push_back({record.serial, record.rde, inferred.output});
        }
        const double score = mmre(pairs);
        result.trace.push_back({index, score});
        // strict < keeps the lowest enumeration index on ties
        if (!have_best || score < result.best_mmre) {
            have_best = true;
            result.best = std::move(config);
            result.best_index = index;
            result.best_mmre = score;
        }
    }
    return result;
}

std::string_view default_fis_text() {
    // Larger designs and weaker students push toward the heavy end of the
    // observed 55..80 week range; the consequent centres are what the
    // default grid then searches over.
    static constexpr std::string_view kText =
        "# Effort estimator over ERD entity counts and student CGPA.\n"
        "fis \"erd-effort\"\n"
        "resolution 1001\n"
        "input TCOE range 4 24\n"
        "  mf Small trap 4 4 8 12\n"
        "  mf Medium tri 8 14 20\n"
        "  mf Large trap 16 20 24 24\n"
        "input CGPA range 5 10\n"
        "  mf Low trap 5 5 6.5 7.5\n"
        "  mf High trap 6.5 7.5 10 10\n"
        "output RDE range 55 80\n"
        "  mf Light tri 57 65 73\n"
        "  mf Moderate tri 62 70 78\n"
        "  mf Heavy tri 67 75 83\n"
        "rule TCOE=Small & CGPA=High => RDE=Light weight 1\n"
        "rule TCOE=Small & CGPA=Low => RDE=Moderate weight 1\n"
        "rule TCOE=Medium & CGPA=High => RDE=Moderate weight 1\n"
        "rule TCOE=Medium & CGPA=Low => RDE=Heavy weight 1\n"
        "rule TCOE=Large & CGPA=High => RDE=Heavy weight 1\n"
        "rule TCOE=Large & CGPA=Low => RDE=Heavy weight 1\n";
    return kText;
}

std::string_view default_grid_text() {
    // 27 consequent placements. The (70, 70, 70) point turns every
    // consequent into the same symmetric shape about 70, i.e. a
    // constant-70 estimator, which floors the tuned MMRE near 5.5%.
    static constexpr std::string_view kText =
        "# Consequent placement search for the default estimator.\n"
        "param RDE.Light.center 63 66 70\n"
        "param RDE.Moderate.center 68 70 72\n"
        "param RDE.Heavy.center 70 74 77\n";
    return kText;
}

} // namespace effortlab::fuzzy
