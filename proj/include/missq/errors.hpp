#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace missq {

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file: ragged rows, bad quoting, unreadable bytes.
class IngestError : public Error {
public:
    IngestError(const std::string& what, std::size_t row = 0, std::size_t column = 0)
        : Error(what), row_(row), column_(column) {}

    /// 1-based physical row of the offending record, 0 when not applicable.
    std::size_t row() const noexcept { return row_; }
    /// 1-based column, 0 when not applicable.
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

/// Structurally valid input that violates a domain rule (duplicate names,
/// bad config, out-of-range index, unknown metric).
class ValidationError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Q_AM and the pairwise metrics are undefined for N = 0.
class EmptyDatasetError : public Error {
public:
    EmptyDatasetError() : Error("dataset has no items; metrics are undefined for N = 0") {}
};

class TooFewVariablesError : public Error {
public:
    explicit TooFewVariablesError(std::size_t k)
        : Error("pairwise metrics need at least 2 variables, got " + std::to_string(k)) {}
};

/// A histogram was requested for a variable without recorded values.
class NoSupportError : public Error {
public:
    using Error::Error;
};

/// A generator request that cannot be realised. `bound()` names the violated
/// constraint, e.g. "frechet_upper" or "inside_capacity".
class FeasibilityError : public Error {
public:
    FeasibilityError(std::string bound, const std::string& what)
        : Error(what), bound_(std::move(bound)) {}

    const std::string& bound() const noexcept { return bound_; }

private:
    std::string bound_;
};

/// The caller asked for something that has not been computed (for example a
/// filter on a CM metric when only JM matrices exist).
class UncomputedError : public Error {
public:
    using Error::Error;
};

}  // namespace missq
