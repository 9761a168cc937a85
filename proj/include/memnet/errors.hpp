#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace memnet {

// Broad failure categories. The CLI maps these onto its exit codes.
enum class ErrorKind { Usage, Parse, Validation, Numerical };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class UsageError : public Error {
public:
    explicit UsageError(const std::string& what) : Error(ErrorKind::Usage, what) {}
};

/// Malformed document. Line and column are 1-based; 0 means unknown.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
        : Error(ErrorKind::Parse, format(what, line, column)), line_(line), column_(column) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }
    [[nodiscard]] std::size_t column() const noexcept { return column_; }

private:
    static std::string format(const std::string& what, std::size_t line, std::size_t column) {
        if (line == 0) return what;
        return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what;
    }

    std::size_t line_;
    std::size_t column_;
};

/// One broken structural rule, e.g. a self-loop or a dangling link endpoint.
struct Violation {
    enum class Rule {
        InvalidParams,
        DuplicateNodeId,
        MissingEndpoint,
        SelfLoop,
        DuplicateLink,
        NoFixedVoltageNode,
        Disconnected,
        MissingDrive,
        UnexpectedDrive,
    };

    Rule rule;
    std::string message;

    friend bool operator==(const Violation&, const Violation&) = default;
};

inline const char* rule_name(Violation::Rule rule) {
    switch (rule) {
        case Violation::Rule::InvalidParams: return "invalid-params";
        case Violation::Rule::DuplicateNodeId: return "duplicate-node-id";
        case Violation::Rule::MissingEndpoint: return "missing-endpoint";
        case Violation::Rule::SelfLoop: return "self-loop";
        case Violation::Rule::DuplicateLink: return "duplicate-link";
        case Violation::Rule::NoFixedVoltageNode: return "no-fixed-voltage-node";
        case Violation::Rule::Disconnected: return "disconnected";
        case Violation::Rule::MissingDrive: return "missing-drive";
        case Violation::Rule::UnexpectedDrive: return "unexpected-drive";
    }
    return "unknown";
}

class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<Violation> violations)
        : Error(ErrorKind::Validation, format(violations)), violations_(std::move(violations)) {}

    [[nodiscard]] const std::vector<Violation>& violations() const noexcept { return violations_; }

private:
    static std::string format(const std::vector<Violation>& violations) {
        std::string out = "validation failed:";
        for (const auto& v : violations) {
            out += "\n  [";
            out += rule_name(v.rule);
            out += "] ";
            out += v.message;
        }
        return out;
    }

    std::vector<Violation> violations_;
};

class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

/// The internal-node conductance matrix cannot be factored.
class SingularSystemError : public NumericalError {
public:
    explicit SingularSystemError(const std::string& what) : NumericalError(what) {}
};

/// The implicit-step fixed point did not settle within the iteration budget.
class NonConvergenceError : public NumericalError {
public:
    NonConvergenceError(const std::string& what, double residual)
        : NumericalError(what), residual_(residual) {}

    [[nodiscard]] double residual() const noexcept { return residual_; }

private:
    double residual_;
};

}  // namespace memnet
