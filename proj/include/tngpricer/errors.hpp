#pragma once

#include <stdexcept>
#include <string>

namespace tngpricer {

/// Failure categories; the CLI maps each onto its own exit status.
enum class ErrorCategory { validation, numeric, io };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

/// An argument lies outside the domain of the operation.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(ErrorCategory::validation, what) {}
};

/// Input text could not be parsed at all.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error(ErrorCategory::validation, what) {}
};

/// Parsed input violates the documented schema. `field()` is the offending path, e.g. `firms[2].sigma`.
class SchemaError : public Error {
public:
    SchemaError(std::string field, const std::string& what)
        : Error(ErrorCategory::validation, field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// A cross-reference (contract -> obligor firm) does not resolve.
class ReferenceError : public Error {
public:
    explicit ReferenceError(const std::string& what) : Error(ErrorCategory::validation, what) {}
};

/// Overflow, non-convergence or an otherwise unrepresentable result.
class NumericError : public Error {
public:
    explicit NumericError(const std::string& what) : Error(ErrorCategory::numeric, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorCategory::io, what) {}
};

}  // namespace tngpricer
