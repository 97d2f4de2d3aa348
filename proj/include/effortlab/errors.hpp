#pragma once

#include <stdexcept>
#include <string>

namespace effortlab {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text (CSV, FIS config, tuning grid, model file).
/// The message names the offending line (and column where known).
class ParseError : public Error {
public:
    ParseError(std::string message, int line, int column = -1)
        : Error(locate(message, line, column)), line_(line), column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

private:
    static std::string locate(const std::string& message, int line, int column) {
        std::string out = "line " + std::to_string(line);
        if (column >= 1) {
            out += ", column " + std::to_string(column);
        }
        return out + ": " + message;
    }

    int line_;
    int column_;
};

/// Structurally well-formed input that violates a domain invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Numeric failure at run time (empty aggregate, empty metric input, ...).
class NumericError : public Error {
public:
    using Error::Error;
};

} // namespace effortlab
