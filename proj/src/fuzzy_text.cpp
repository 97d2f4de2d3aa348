#include <cctype>
#include <cstddef>
#include <string>
#include <vector>

#include "effortlab/errors.hpp"
#include "effortlab/format.hpp"
#include "effortlab/fuzzy.hpp"

namespace effortlab::fuzzy {

namespace {

struct Token {
    std::string text;
    int column; // 1-based
};

// Strips '#' comments, splits on whitespace, keeps column positions.
std::vector<Token> tokenize(std::string_view line) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        const char c = line[i];
        if (c == '#') {
            break;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '"') {
            std::size_t close = line.find('"', i + 1);
            if (close == std::string_view::npos) {
                throw ValidationError("unterminated quote");
            }
            tokens.push_back({std::string(line.substr(i, close - i + 1)),
                              static_cast<int>(i + 1)});
            i = close + 1;
            continue;
        }
        std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) &&
               line[i] != '#') {
            ++i;
        }
        tokens.push_back({std::string(line.substr(start, i - start)),
                          static_cast<int>(start + 1)});
    }
    return tokens;
}

double number_at(const Token& tok, int line_no, std::string_view what) {
    try {
        return parse_double(tok.text, what);
    } catch (const ValidationError& e) {
        throw ParseError(e.what(), line_no, tok.column);
    }
}

struct ClauseParts {
    std::string variable;
    std::string term;
};

ClauseParts split_clause(const Token& tok, int line_no) {
    std::size_t eq = tok.text.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 >= tok.text.size()) {
        throw ParseError("expected <Var>=<Label>, got '" + tok.text + "'", line_no,
                         tok.column);
    }
    return {tok.text.substr(0, eq), tok.text.substr(eq + 1)};
}

} // namespace

FisConfig parse_fis(std::string_view text) {
    FisConfig config;
    config.resolution = 1001;
    bool saw_fis = false;
    bool saw_resolution = false;
    bool saw_output = false;
    LinguisticVariable* current_var = nullptr;
    std::vector<int> rule_lines;

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

        std::vector<Token> tokens;
        try {
            tokens = tokenize(line);
        } catch (const ValidationError& e) {
            throw ParseError(e.what(), line_no);
        }
        if (tokens.empty()) {
            continue;
        }
        const std::string& keyword = tokens[0].text;

        if (keyword == "fis") {
            if (saw_fis) {
                throw ParseError("duplicate 'fis' line", line_no, tokens[0].column);
            }
            if (tokens.size() != 2 || tokens[1].text.size() < 2 ||
                tokens[1].text.front() != '"' || tokens[1].text.back() != '"') {
                throw ParseError("expected: fis \"<name>\"", line_no);
            }
            config.name = tokens[1].text.substr(1, tokens[1].text.size() - 2);
            saw_fis = true;
        } else if (keyword == "resolution") {
            if (saw_resolution) {
                throw ParseError("duplicate 'resolution' line", line_no, tokens[0].column);
            }
            if (tokens.size() != 2) {
                throw ParseError("expected: resolution <N>", line_no);
            }
            const double n = number_at(tokens[1], line_no, "resolution");
            if (n != static_cast<int>(n) || n < 101) {
                throw ParseError("resolution must be an integer >= 101, got " +
                                 tokens[1].text, line_no, tokens[1].column);
            }
            config.resolution = static_cast<int>(n);
            saw_resolution = true;
        } else if (keyword == "input" || keyword == "output") {
            if (tokens.size() != 5 || tokens[2].text != "range") {
                throw ParseError("expected: " + keyword + " <Name> range <lo> <hi>", line_no);
            }
            LinguisticVariable var;
            var.name = tokens[1].text;
            var.lo = number_at(tokens[3], line_no, "range lo");
            var.hi = number_at(tokens[4], line_no, "range hi");
            if (!(var.lo < var.hi)) {
                throw ParseError("universe requires lo < hi", line_no, tokens[3].column);
            }
            if (keyword == "input") {
                config.inputs.push_back(std::move(var));
                current_var = &config.inputs.back();
            } else {
                if (saw_output) {
                    throw ParseError("only one output variable is allowed", line_no,
                                     tokens[0].column);
                }
                config.output = std::move(var);
                current_var = &config.output;
                saw_output = true;
            }
        } else if (keyword == "mf") {
            if (current_var == nullptr) {
                throw ParseError("'mf' outside an input/output block", line_no,
                                 tokens[0].column);
            }
            if (tokens.size() < 3) {
                throw ParseError("expected: mf <Label> <kind> <params...>", line_no);
            }
            const std::string& label = tokens[1].text;
            const std::string& kind = tokens[2].text;
            auto param = [&](std::size_t i) {
                if (2 + i >= tokens.size() - 0) {
                    throw ParseError("missing parameter for mf '" + label + "'", line_no);
                }
                return number_at(tokens[3 + i], line_no, "mf parameter");
            };
            try {
                if (kind == "tri") {
                    if (tokens.size() != 6) {
                        throw ParseError("tri takes 3 parameters", line_no, tokens[2].column);
                    }
                    current_var->terms.push_back(
                        {label, MembershipFunction::triangular(param(0), param(1), param(2))});
                } else if (kind == "trap") {
                    if (tokens.size() != 7) {
                        throw ParseError("trap takes 4 parameters", line_no, tokens[2].column);
                    }
                    current_var->terms.push_back(
                        {label, MembershipFunction::trapezoidal(param(0), param(1), param(2),
                                                                param(3))});
                } else if (kind == "gauss") {
                    if (tokens.size() != 5) {
                        throw ParseError("gauss takes 2 parameters", line_no, tokens[2].column);
                    }
                    current_var->terms.push_back(
                        {label, MembershipFunction::gaussian(param(0), param(1))});
                } else {
                    throw ParseError("unknown membership kind '" + kind +
                                     "' (want tri, trap or gauss)", line_no, tokens[2].column);
                }
            } catch (const ValidationError& e) {
                throw ParseError(e.what(), line_no, tokens[2].column);
            }
        } else if (keyword == "rule") {
            current_var = nullptr;
            Rule rule;
            std::size_t i = 1;
            bool saw_connective = false;
            while (i < tokens.size() && tokens[i].text != "=>") {
                if (tokens[i].text == "&" || tokens[i].text == "|") {
                    const Connective conn = (tokens[i].text == "&") ? Connective::And
                                                                    : Connective::Or;
                    if (saw_connective && conn != rule.connective) {
                        throw ParseError("rule mixes '&' and '|' connectives", line_no,
                                         tokens[i].column);
                    }
                    rule.connective = conn;
                    saw_connective = true;
                    ++i;
                    continue;
                }
                ClauseParts parts = split_clause(tokens[i], line_no);
                rule.antecedent.push_back({std::move(parts.variable), std::move(parts.term)});
                ++i;
            }
            if (rule.antecedent.empty()) {
                throw ParseError("rule has no antecedent clauses", line_no);
            }
            if (i >= tokens.size()) {
                throw ParseError("rule is missing '=>'", line_no);
            }
            ++i; // skip =>
            if (i >= tokens.size()) {
                throw ParseError("rule is missing its consequent", line_no);
            }
            ClauseParts consequent = split_clause(tokens[i], line_no);
            if (saw_output && consequent.variable != config.output.name) {
                throw ParseError("rule consequent names variable '" + consequent.variable +
                                 "', expected output '" + config.output.name + "'", line_no,
                                 tokens[i].column);
            }
            rule.consequent = std::move(consequent.term);
            ++i;
            if (i < tokens.size()) {
                if (tokens[i].text != "weight" || i + 1 >= tokens.size()) {
                    throw ParseError("expected: weight <w>", line_no, tokens[i].column);
                }
                rule.weight = number_at(tokens[i + 1], line_no, "weight");
                if (!(rule.weight > 0.0 && rule.weight <= 1.0)) {
                    throw ParseError("weight must lie in (0, 1], got " + tokens[i + 1].text,
                                     line_no, tokens[i + 1].column);
                }
                i += 2;
            }
            if (i < tokens.size()) {
                throw ParseError("unexpected trailing token '" + tokens[i].text + "'",
                                 line_no, tokens[i].column);
            }
            config.rules.push_back(std::move(rule));
            rule_lines.push_back(line_no);
        } else {
            throw ParseError("unknown directive '" + keyword + "'", line_no,
                             tokens[0].column);
        }
    }

    if (!saw_fis) {
        throw ParseError("missing 'fis \"<name>\"' line", 1);
    }
    if (!saw_output) {
        throw ParseError("missing output variable", line_no);
    }

    // Reference resolution, reported against the offending rule's line.
    for (std::size_t r = 0; r < config.rules.size(); ++r) {
        const Rule& rule = config.rules[r];
        for (const RuleClause& clause : rule.antecedent) {
            const LinguisticVariable* var = config.find_input(clause.variable);
            if (var == nullptr) {
                throw ParseError("rule references unknown input variable '" +
                                 clause.variable + "'", rule_lines[r]);
            }
            if (var->find_term(clause.term) == nullptr) {
                throw ParseError("rule references undefined term '" + clause.term +
                                 "' of variable " + clause.variable, rule_lines[r]);
            }
        }
        if (config.output.find_term(rule.consequent) == nullptr) {
            throw ParseError("rule references undefined output term '" + rule.consequent +
                             "'", rule_lines[r]);
        }
    }

    validate(config);
    return config;
}

namespace {

std::string mf_line(const Term& term) {
    std::string out = "  mf " + term.label;
    switch (term.mf.kind()) {
    case MfKind::Triangular: out += " tri"; break;
    case MfKind::Trapezoidal: out += " trap"; break;
    case MfKind::Gaussian: out += " gauss"; break;
    }
    for (double p : term.mf.params()) {
        out += ' ' + format_double(p);
    }
    return out + '\n';
}

std::string variable_block(const LinguisticVariable& var, std::string_view keyword) {
    std::string out = std::string(keyword) + ' ' + var.name + " range " +
                      format_double(var.lo) + ' ' + format_double(var.hi) + '\n';
    for (const Term& term : var.terms) {
        out += mf_line(term);
    }
    return out;
}

} // namespace

std::string serialize_fis(const FisConfig& config) {
    std::string out = "fis \"" + config.name + "\"\n";
    out += "resolution " + std::to_string(config.resolution) + '\n';
    for (const LinguisticVariable& var : config.inputs) {
        out += variable_block(var, "input");
    }
    out += variable_block(config.output, "output");
    for (const Rule& rule : config.rules) {
        out += "rule ";
        const char* sep = (rule.connective == Connective::And) ? " & " : " | ";
        for (std::size_t i = 0; i < rule.antecedent.size(); ++i) {
            if (i > 0) {
                out += sep;
            }
            out += rule.antecedent[i].variable + '=' + rule.antecedent[i].term;
        }
        out += " => " + config.output.name + '=' + rule.consequent;
        out += " weight " + format_double(rule.weight) + '\n';
    }
    return out;
}

} // namespace effortlab::fuzzy
