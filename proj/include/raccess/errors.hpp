#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace raccess {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown when a Groebner run exceeds its degree or pair budget.
class ResourceError : public Error {
public:
    ResourceError(const std::string& what, std::size_t basis_size, std::size_t pairs_processed)
        : Error(what), basis_size_(basis_size), pairs_processed_(pairs_processed) {}

    std::size_t basis_size() const noexcept { return basis_size_; }
    std::size_t pairs_processed() const noexcept { return pairs_processed_; }

private:
    std::size_t basis_size_;
    std::size_t pairs_processed_;
};

/// A substitution or shift produced an identically-zero denominator.
class DegeneracyError : public Error {
public:
    using Error::Error;
};

/// Exact evaluation hit a vanishing denominator.
class EvaluationError : public Error {
public:
    enum class Kind { pole, indeterminate };

    EvaluationError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

/// Numeric iteration came within the pole guard of a vanishing denominator.
class PoleError : public Error {
public:
    PoleError(std::size_t step, const std::string& what) : Error(what), step_(step) {}
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

class ParseError : public Error {
public:
    ParseError(int line, int column, const std::string& message)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
          line_(line), column_(column), message_(message) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }
    const std::string& message() const noexcept { return message_; }

private:
    int line_;
    int column_;
    std::string message_;
};

} // namespace raccess
