#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "effortlab/dataset.hpp"

namespace effortlab::fuzzy {

enum class MfKind { Triangular, Trapezoidal, Gaussian };

/// A membership function over one linguistic variable's universe.
/// Triangular (a,b,c) and trapezoidal (a,b,c,d) are piecewise linear;
/// gaussian (mean,sigma) is exp(-(x-mean)^2 / (2 sigma^2)).
class MembershipFunction {
public:
    static MembershipFunction triangular(double a, double b, double c);
    static MembershipFunction trapezoidal(double a, double b, double c, double d);
    static MembershipFunction gaussian(double mean, double sigma);

    MfKind kind() const { return kind_; }
    std::span<const double> params() const;

    double degree(double x) const; // in [0, 1]

    /// Closed support for the piecewise-linear kinds; gaussians report an
    /// unbounded interval (they intersect every universe).
    double support_lo() const;
    double support_hi() const;

    /// Shape centre: tri b, trap (b+c)/2, gauss mean.
    double center() const;
    /// Same shape translated so its centre lands on `new_center`.
    MembershipFunction translated(double new_center) const;
    /// Shape stretched about its centre. For gaussians the width is sigma;
    /// for tri/trap it is the support width.
    MembershipFunction with_width(double new_width) const;
    double width() const;

    bool operator==(const MembershipFunction&) const = default;

private:
    MembershipFunction(MfKind kind, double p0, double p1, double p2, double p3)
        : kind_(kind), p_{p0, p1, p2, p3} {}

    MfKind kind_;
    double p_[4];
};

/// Free-function form of MembershipFunction::degree.
double membership_degree(const MembershipFunction& mf, double x);

struct Term {
    std::string label;
    MembershipFunction mf;
    bool operator==(const Term&) const = default;
};

struct LinguisticVariable {
    std::string name;
    double lo = 0; // universe [lo, hi], lo < hi
    double hi = 0;
    std::vector<Term> terms;

    const Term* find_term(std::string_view label) const;
    bool operator==(const LinguisticVariable&) const = default;
};

enum class Connective { And, Or };

struct RuleClause {
    std::string variable;
    std::string term;
    bool operator==(const RuleClause&) const = default;
};

struct Rule {
    std::vector<RuleClause> antecedent; // non-empty
    Connective connective = Connective::And;
    std::string consequent; // output term label
    double weight = 1.0;    // (0, 1]
    bool operator==(const Rule&) const = default;
};

struct FisConfig {
    std::string name;
    std::vector<LinguisticVariable> inputs; // >= 1
    LinguisticVariable output;
    std::vector<Rule> rules; // >= 1
    int resolution = 1001;   // output-universe sample count, >= 101

    const LinguisticVariable* find_input(std::string_view name) const;
    bool operator==(const FisConfig&) const = default;
};

/// Structural validation: resolvable references, universe sanity, MF
/// parameter ordering, resolution floor. Throws ValidationError.
void validate(const FisConfig& config);

using CrispInputs = std::map<std::string, double>;

/// weight x (min over antecedent degrees for AND, max for OR).
/// Throws ValidationError when an input named by the rule is missing.
double rule_strength(const FisConfig& config, const Rule& rule,
                     const CrispInputs& inputs);

/// Discrete centroid sum(x*mu)/sum(mu). Returns nullopt when the aggregate
/// is empty (all mu zero); the caller decides the fallback.
std::optional<double> defuzzify_centroid(std::span<const double> xs,
                                         std::span<const double> mus);

struct InferResult {
    double output = 0;
    bool no_rule_fired = false;          // every rule strength was zero
    bool empty_aggregate = false;        // aggregated mass was zero
    std::vector<std::string> clamped;    // inputs clamped to their universe
    std::vector<double> strengths;       // per rule, config order
};

/// Mamdani pipeline: fuzzify (inputs clamped to each universe), weighted
/// min/max rule firing, clip implication, max aggregation over the sampled
/// output universe, centroid defuzzification. Falls back to the universe
/// midpoint, flagged, when nothing fires.
InferResult infer(const FisConfig& config, const CrispInputs& inputs);

// --- text format ---------------------------------------------------------

/// Parse the line-oriented FIS text format. Errors carry line (and column
/// where meaningful) positions.
FisConfig parse_fis(std::string_view text);
std::string serialize_fis(const FisConfig& config);

// --- grid-search tuning --------------------------------------------------

/// One tunable target with its candidate values. Targets:
///   <Var>.<Term>.center   translate the term's MF
///   <Var>.<Term>.width    stretch the term's MF about its centre
///   rule[<i>].weight      1-based rule weight
struct GridAxis {
    std::string target;
    std::vector<double> candidates;
    bool operator==(const GridAxis&) const = default;
};
using Grid = std::vector<GridAxis>;

Grid parse_grid(std::string_view text);
std::size_t grid_size(const Grid& grid);

/// Grid points enumerate in odometer order: the first axis is the most
/// significant digit, the last axis varies fastest.
FisConfig apply_grid_point(const FisConfig& base, const Grid& grid,
                           std::span<const std::size_t> choice);
std::vector<std::size_t> grid_choice(const Grid& grid, std::size_t index);

/// Which record field feeds which input variable.
using InputBinding = std::vector<std::pair<std::string, Feature>>;

/// Bind every config input to a record field by case-insensitive name
/// match (TCOE -> tcoe, ...). Throws ValidationError on unknown names.
InputBinding bind_inputs_by_name(const FisConfig& config);

CrispInputs crisp_inputs_for(const InputBinding& binding, const ProjectRecord& record);

struct TunePoint {
    std::size_t index = 0;
    double mmre = 0;
};

struct TuneResult {
    FisConfig best;
    std::size_t best_index = 0;
    double best_mmre = 0;
    std::vector<TunePoint> trace; // every grid point, enumeration order
};

/// Exhaustive grid search minimising full-dataset MMRE; ties break toward
/// the lowest enumeration index.
TuneResult tune_fis(const FisConfig& base, const Grid& grid, const Dataset& data,
                    const InputBinding& binding);

// --- shipped defaults ----------------------------------------------------

/// Text of the default TCOE/CGPA -> RDE estimator (data/erd_effort.fis).
std::string_view default_fis_text();
/// Text of the default tuning grid (data/tuning.grid). Contains the
/// all-centres-at-70 point, whose output is within a week of constant 70.
std::string_view default_grid_text();

} // namespace effortlab::fuzzy
