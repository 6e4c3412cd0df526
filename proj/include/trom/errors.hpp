#pragma once

#include <stdexcept>
#include <string>

namespace trom {

/// Base class for all library errors. `code()` is a stable, machine-parsable
/// identifier (lower_snake_case) used by the CLI for exit diagnostics.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& msg)
        : std::runtime_error(msg), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

/// Caller violated a documented precondition (bad mode, rank out of range, ...).
class UsageError : public Error {
public:
    explicit UsageError(const std::string& msg) : Error("usage", msg) {}
};

/// Input data failed validation (non-finite entries, shape mismatch, ...).
class InvalidDataError : public Error {
public:
    explicit InvalidDataError(const std::string& msg) : Error("invalid_data", msg) {}
};

class NotPositiveDefiniteError : public Error {
public:
    NotPositiveDefiniteError(long pivot, const std::string& msg)
        : Error("not_positive_definite", msg), pivot_(pivot) {}
    long pivot() const { return pivot_; }

private:
    long pivot_;
};

class EmptyBasisError : public Error {
public:
    explicit EmptyBasisError(const std::string& msg) : Error("empty_basis", msg) {}
};

class OutOfHullError : public Error {
public:
    explicit OutOfHullError(const std::string& msg) : Error("out_of_hull", msg) {}
};

class DegenerateGeometryError : public Error {
public:
    explicit DegenerateGeometryError(const std::string& msg)
        : Error("degenerate_geometry", msg) {}
};

class IllConditionedKernelError : public Error {
public:
    IllConditionedKernelError(double cond_estimate, const std::string& msg)
        : Error("ill_conditioned_kernel", msg), cond_(cond_estimate) {}
    double condition_estimate() const { return cond_; }

private:
    double cond_;
};

class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& msg) : Error("numerical", msg) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error("io", msg) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error("config_invalid", msg) {}
};

}  // namespace trom
