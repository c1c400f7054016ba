#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace spe {

enum class Severity { error, warning };

/// One finding from a validator. Validators return lists of these instead of
/// throwing, so callers can collect and render everything at once.
struct Diagnostic {
    Severity severity = Severity::error;
    std::string location;
    std::string message;

    bool operator==(const Diagnostic&) const = default;
};

inline bool has_errors(const std::vector<Diagnostic>& diags) {
    for (const auto& d : diags)
        if (d.severity == Severity::error) return true;
    return false;
}

std::string format_diagnostics(const std::vector<Diagnostic>& diags);

/// Syntax or structural error raised while reading a model document.
/// Carries the 1-based source position of the offending token.
class ParseError : public std::runtime_error {
public:
    ParseError(int line, int column, const std::string& message)
        : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) +
                             ": " + message),
          line_(line),
          column_(column),
          message_(message) {}

    int line() const { return line_; }
    int column() const { return column_; }
    const std::string& bare_message() const { return message_; }

private:
    int line_;
    int column_;
    std::string message_;
};

/// Semantic error raised by model transformations and solvers when a
/// precondition does not hold (unresolvable reference, saturation, ...).
class ModelError : public std::runtime_error {
public:
    explicit ModelError(const std::string& message) : std::runtime_error(message) {}
};

} // namespace spe
