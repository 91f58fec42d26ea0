#pragma once

#include <stdexcept>
#include <string>

namespace dppmse {

/// Dimension mismatch between matrices, ragged rows, label-count violations.
class ShapeError : public std::runtime_error {
public:
    explicit ShapeError(const std::string &msg) : std::runtime_error(msg) {}
};

/// Malformed text input. Carries a 1-based (row, column) location when known.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string &msg, std::size_t row, std::size_t column)
        : std::runtime_error(msg), row_(row), column_(column) {}
    explicit ParseError(const std::string &msg) : std::runtime_error(msg) {}

    std::size_t row() const { return row_; }
    std::size_t column() const { return column_; }

private:
    std::size_t row_ = 0;
    std::size_t column_ = 0;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string &msg) : std::runtime_error(msg) {}
};

/// Parameter vector outside the generative model's domain (e.g. non-positive scale).
class ModelDomainError : public DomainError {
public:
    explicit ModelDomainError(const std::string &msg) : DomainError(msg) {}
};

/// Requested computation exceeds the configured work budget.
class ResourceError : public std::runtime_error {
public:
    explicit ResourceError(const std::string &msg) : std::runtime_error(msg) {}
};

/// Regression design with no usable predictor variance.
class DegenerateDesignError : public std::runtime_error {
public:
    explicit DegenerateDesignError(const std::string &msg) : std::runtime_error(msg) {}
};

}  // namespace dppmse
