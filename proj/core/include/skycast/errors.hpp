#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace skycast {

// Error taxonomy maps onto process exit codes:
//   ConfigError -> 1, DataError -> 2, NumericError -> 3.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
    virtual int exit_code() const noexcept { return 1; }
};

class ConfigError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 1; }
};

class DataError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

class NumericError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 3; }
};

// ---- data-shaped failures ----

class ParseError : public DataError {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& reason)
        : DataError(source + ":" + std::to_string(line) + ": " + reason),
          line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class SchemaError : public DataError {
public:
    using DataError::DataError;
};

class NonMonotonicTimestamps : public DataError {
public:
    using DataError::DataError;
};

class MisalignedSeries : public DataError {
public:
    using DataError::DataError;
};

class EmptyPartition : public DataError {
public:
    using DataError::DataError;
};

class InsufficientData : public DataError {
public:
    using DataError::DataError;
};

class InsufficientHistory : public DataError {
public:
    using DataError::DataError;
};

class EmptyInput : public DataError {
public:
    using DataError::DataError;
};

class LengthMismatch : public DataError {
public:
    using DataError::DataError;
};

class MemberCountMismatch : public DataError {
public:
    using DataError::DataError;
};

class ConventionMismatch : public DataError {
public:
    using DataError::DataError;
};

class DegenerateData : public DataError {
public:
    using DataError::DataError;
};

// ---- numeric failures ----

class NonConvergence : public NumericError {
public:
    NonConvergence(const std::string& what, int iterations, double gradient_norm)
        : NumericError(what + " (iterations=" + std::to_string(iterations) +
                       ", |grad|=" + std::to_string(gradient_norm) + ")"),
          iterations_(iterations),
          gradient_norm_(gradient_norm) {}
    int iterations() const noexcept { return iterations_; }
    double gradient_norm() const noexcept { return gradient_norm_; }

private:
    int iterations_;
    double gradient_norm_;
};

class NumericalFailure : public NumericError {
public:
    using NumericError::NumericError;
};

class AllFitsFailed : public NumericError {
public:
    using NumericError::NumericError;
};

class ZeroNormalization : public NumericError {
public:
    using NumericError::NumericError;
};

}  // namespace skycast
