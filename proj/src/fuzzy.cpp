#include "effortlab/fuzzy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "effortlab/errors.hpp"
#include "effortlab/format.hpp"

namespace effortlab::fuzzy {

namespace {

void check_mf_params(MfKind kind, std::span<const double> p) {
    switch (kind) {
    case MfKind::Triangular:
        if (!(p[0] <= p[1] && p[1] <= p[2] && p[0] < p[2])) {
            throw ValidationError("triangular parameters must satisfy a <= b <= c with "
                                  "a < c, got " + format_double(p[0]) + " " +
                                  format_double(p[1]) + " " + format_double(p[2]));
        }
        break;
    case MfKind::Trapezoidal:
        if (!(p[0] <= p[1] && p[1] <= p[2] && p[2] <= p[3] && p[0] < p[3])) {
            throw ValidationError("trapezoidal parameters must satisfy a <= b <= c <= d "
                                  "with a < d, got " + format_double(p[0]) + " " +
                                  format_double(p[1]) + " " + format_double(p[2]) + " " +
                                  format_double(p[3]));
        }
        break;
    case MfKind::Gaussian:
        if (!(p[1] > 0.0)) {
            throw ValidationError("gaussian sigma must be > 0, got " + format_double(p[1]));
        }
        break;
    }
}

} // namespace

MembershipFunction MembershipFunction::triangular(double a, double b, double c) {
    MembershipFunction mf(MfKind::Triangular, a, b, c, 0.0);
    check_mf_params(mf.kind_, mf.params());
    return mf;
}

MembershipFunction MembershipFunction::trapezoidal(double a, double b, double c, double d) {
    MembershipFunction mf(MfKind::Trapezoidal, a, b, c, d);
    check_mf_params(mf.kind_, mf.params());
    return mf;
}

MembershipFunction MembershipFunction::gaussian(double mean, double sigma) {
    MembershipFunction mf(MfKind::Gaussian, mean, sigma, 0.0, 0.0);
    check_mf_params(mf.kind_, mf.params());
    return mf;
}

std::span<const double> MembershipFunction::params() const {
    switch (kind_) {
    case MfKind::Triangular: return {p_, 3};
    case MfKind::Trapezoidal: return {p_, 4};
    case MfKind::Gaussian: return {p_, 2};
    }
    return {};
}

double MembershipFunction::degree(double x) const {
    switch (kind_) {
    case MfKind::Triangular: {
        const double a = p_[0], b = p_[1], c = p_[2];
        if (x < a || x > c) return 0.0;
        if (x <= b) return (a == b) ? 1.0 : (x - a) / (b - a);
        if (x < c) return (c - x) / (c - b);
        return (b == c) ? 1.0 : 0.0;
    }
    case MfKind::Trapezoidal: {
        const double a = p_[0], b = p_[1], c = p_[2], d = p_[3];
        if (x < a || x > d) return 0.0;
        if (x < b) return (a == b) ? 1.0 : (x - a) / (b - a);
        if (x <= c) return 1.0;
        return (c == d) ? 1.0 : (d - x) / (d - c);
    }
    case MfKind::Gaussian: {
        const double mean = p_[0], sigma = p_[1];
        const double z = (x - mean) / sigma;
        return std::exp(-0.5 * z * z);
    }
    }
    return 0.0;
}

double MembershipFunction::support_lo() const {
    switch (kind_) {
    case MfKind::Triangular:
    case MfKind::Trapezoidal: return p_[0];
    case MfKind::Gaussian: return -std::numeric_limits<double>::infinity();
    }
    return 0.0;
}

double MembershipFunction::support_hi() const {
    switch (kind_) {
    case MfKind::Triangular: return p_[2];
    case MfKind::Trapezoidal: return p_[3];
    case MfKind::Gaussian: return std::numeric_limits<double>::infinity();
    }
    return 0.0;
}

double MembershipFunction::center() const {
    switch (kind_) {
    case MfKind::Triangular: return p_[1];
    case MfKind::Trapezoidal: return 0.5 * (p_[1] + p_[2]);
    case MfKind::Gaussian: return p_[0];
    }
    return 0.0;
}

MembershipFunction MembershipFunction::translated(double new_center) const {
    const double shift = new_center - center();
    MembershipFunction mf = *this;
    switch (kind_) {
    case MfKind::Triangular:
        mf.p_[0] += shift; mf.p_[1] += shift; mf.p_[2] += shift;
        break;
    case MfKind::Trapezoidal:
        mf.p_[0] += shift; mf.p_[1] += shift; mf.p_[2] += shift; mf.p_[3] += shift;
        break;
    case MfKind::Gaussian:
        mf.p_[0] += shift;
        break;
    }
    return mf;
}

double MembershipFunction::width() const {
    switch (kind_) {
    case MfKind::Triangular: return p_[2] - p_[0];
    case MfKind::Trapezoidal: return p_[3] - p_[0];
    case MfKind::Gaussian: return p_[1];
    }
    return 0.0;
}

MembershipFunction MembershipFunction::with_width(double new_width) const {
    if (!(new_width > 0.0)) {
        throw ValidationError("membership width must be > 0, got " +
                              format_double(new_width));
    }
    MembershipFunction mf = *this;
    if (kind_ == MfKind::Gaussian) {
        mf.p_[1] = new_width;
        return mf;
    }
    const double c = center();
    const double factor = new_width / width();
    const int count = (kind_ == MfKind::Triangular) ? 3 : 4;
    for (int i = 0; i < count; ++i) {
        mf.p_[i] = c + (p_[i] - c) * factor;
    }
    check_mf_params(mf.kind_, mf.params());
    return mf;
}

double membership_degree(const MembershipFunction& mf, double x) {
    return mf.degree(x);
}

const Term* LinguisticVariable::find_term(std::string_view label) const {
    for (const Term& t : terms) {
        if (t.label == label) {
            return &t;
        }
    }
    return nullptr;
}

const LinguisticVariable* FisConfig::find_input(std::string_view name) const {
    for (const LinguisticVariable& v : inputs) {
        if (v.name == name) {
            return &v;
        }
    }
    return nullptr;
}

namespace {

void validate_variable(const LinguisticVariable& var, std::string_view role) {
    if (var.name.empty()) {
        throw ValidationError(std::string(role) + " variable has an empty name");
    }
    if (!(var.lo < var.hi)) {
        throw ValidationError("variable " + var.name + ": universe requires lo < hi, got [" +
                              format_double(var.lo) + ", " + format_double(var.hi) + "]");
    }
    if (var.terms.empty()) {
        throw ValidationError("variable " + var.name + " has no terms");
    }
    std::set<std::string> labels;
    for (const Term& t : var.terms) {
        if (!labels.insert(t.label).second) {
            throw ValidationError("variable " + var.name + ": duplicate term label '" +
                                  t.label + "'");
        }
        check_mf_params(t.mf.kind(), t.mf.params());
        if (t.mf.support_hi() < var.lo || t.mf.support_lo() > var.hi) {
            throw ValidationError("variable " + var.name + ": term '" + t.label +
                                  "' has support outside the universe [" +
                                  format_double(var.lo) + ", " + format_double(var.hi) + "]");
        }
    }
}

} // namespace

void validate(const FisConfig& config) {
    if (config.inputs.empty()) {
        throw ValidationError("FIS '" + config.name + "' needs at least one input variable");
    }
    if (config.resolution < 101) {
        throw ValidationError("FIS '" + config.name + "': resolution must be >= 101, got " +
                              std::to_string(config.resolution));
    }
    std::set<std::string> names;
    for (const LinguisticVariable& v : config.inputs) {
        validate_variable(v, "input");
        if (!names.insert(v.name).second) {
            throw ValidationError("duplicate variable name '" + v.name + "'");
        }
    }
    validate_variable(config.output, "output");
    if (!names.insert(config.output.name).second) {
        throw ValidationError("duplicate variable name '" + config.output.name + "'");
    }
    if (config.rules.empty()) {
        throw ValidationError("FIS '" + config.name + "' has no rules");
    }
    for (std::size_t i = 0; i < config.rules.size(); ++i) {
        const Rule& rule = config.rules[i];
        const std::string where = "rule " + std::to_string(i + 1);
        if (rule.antecedent.empty()) {
            throw ValidationError(where + " has an empty antecedent");
        }
        if (!(rule.weight > 0.0 && rule.weight <= 1.0)) {
            throw ValidationError(where + ": weight must lie in (0, 1], got " +
                                  format_double(rule.weight));
        }
        for (const RuleClause& clause : rule.antecedent) {
            const LinguisticVariable* var = config.find_input(clause.variable);
            if (var == nullptr) {
                throw ValidationError(where + " references unknown input variable '" +
                                      clause.variable + "'");
            }
            if (var->find_term(clause.term) == nullptr) {
                throw ValidationError(where + " references undefined term '" + clause.term +
                                      "' of variable " + clause.variable);
            }
        }
        if (config.output.find_term(rule.consequent) == nullptr) {
            throw ValidationError(where + " references undefined output term '" +
                                  rule.consequent + "'");
        }
    }
}

double rule_strength(const FisConfig& config, const Rule& rule, const CrispInputs& inputs) {
    double combined = (rule.connective == Connective::And) ? 1.0 : 0.0;
    for (const RuleClause& clause : rule.antecedent) {
        const LinguisticVariable* var = config.find_input(clause.variable);
        if (var == nullptr) {
            throw ValidationError("rule references unknown input variable '" +
                                  clause.variable + "'");
        }
        const Term* term = var->find_term(clause.term);
        if (term == nullptr) {
            throw ValidationError("rule references undefined term '" + clause.term +
                                  "' of variable " + clause.variable);
        }
        auto it = inputs.find(clause.variable);
        if (it == inputs.end()) {
            throw ValidationError("no crisp value supplied for input variable '" +
                                  clause.variable + "'");
        }
        const double degree = term->mf.degree(it->second);
        combined = (rule.connective == Connective::And) ? std::min(combined, degree)
                                                        : std::max(combined, degree);
    }
    return rule.weight * combined;
}

std::optional<double> defuzzify_centroid(std::span<const double> xs,
                                         std::span<const double> mus) {
    if (xs.size() != mus.size() || xs.empty()) {
        throw NumericError("defuzzify_centroid needs equally sized, non-empty samples");
    }
    double weighted = 0.0;
    double mass = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i > 0 && !(xs[i] > xs[i - 1])) {
            throw NumericError("defuzzify_centroid abscissae must be strictly increasing");
        }
        if (mus[i] < 0.0) {
            throw NumericError("defuzzify_centroid membership values must be >= 0");
        }
        weighted += xs[i] * mus[i];
        mass += mus[i];
    }
    if (mass == 0.0) {
        return std::nullopt;
    }
    return weighted / mass;
}

InferResult infer(const FisConfig& config, const CrispInputs& inputs) {
    InferResult result;

    CrispInputs clamped;
    for (const LinguisticVariable& var : config.inputs) {
        auto it = inputs.find(var.name);
        if (it == inputs.end()) {
            throw ValidationError("missing crisp value for input variable '" + var.name + "'");
        }
        double value = it->second;
        if (value < var.lo || value > var.hi) {
            value = std::clamp(value, var.lo, var.hi);
            result.clamped.push_back(var.name);
        }
        clamped[var.name] = value;
    }
    for (const auto& [name, value] : inputs) {
        (void)value;
        if (config.find_input(name) == nullptr) {
            throw ValidationError("unknown input variable '" + name + "'");
        }
    }

    result.strengths.reserve(config.rules.size());
    double max_strength = 0.0;
    for (const Rule& rule : config.rules) {
        const double s = rule_strength(config, rule, clamped);
        result.strengths.push_back(s);
        max_strength = std::max(max_strength, s);
    }

    const LinguisticVariable& out = config.output;
    const double midpoint = 0.5 * (out.lo + out.hi);
    if (max_strength == 0.0) {
        result.no_rule_fired = true;
        result.output = midpoint;
        return result;
    }

    const int n = config.resolution;
    const double step = (out.hi - out.lo) / static_cast<double>(n - 1);
    std::vector<double> xs(n);
    std::vector<double> agg(n, 0.0);
    for (int i = 0; i < n; ++i) {
        xs[i] = out.lo + step * static_cast<double>(i);
    }
    for (std::size_t r = 0; r < config.rules.size(); ++r) {
        const double s = result.strengths[r];
        if (s == 0.0) {
            continue;
        }
        const Term* term = out.find_term(config.rules[r].consequent);
        for (int i = 0; i < n; ++i) {
            const double clipped = std::min(s, term->mf.degree(xs[i]));
            agg[i] = std::max(agg[i], clipped);
        }
    }

    std::optional<double> crisp = defuzzify_centroid(xs, agg);
    if (!crisp) {
        result.empty_aggregate = true;
        result.output = midpoint;
        return result;
    }
    result.output = *crisp;
    return result;
}

} // namespace effortlab::fuzzy
