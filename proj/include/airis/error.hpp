#pragma once

#include <stdexcept>
#include <string>

namespace airis {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Operand shapes disagree with the scenario or with each other.
class DimensionError : public Error {
public:
    DimensionError(std::string operand, long expected, long actual)
        : Error("dimension mismatch in '" + operand + "': expected " + std::to_string(expected) +
                ", got " + std::to_string(actual)),
          operand_(std::move(operand)),
          expected_(expected),
          actual_(actual) {}

    const std::string& operand() const noexcept { return operand_; }
    long expected() const noexcept { return expected_; }
    long actual() const noexcept { return actual_; }

private:
    std::string operand_;
    long expected_;
    long actual_;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

// A numerical subsolver could not produce a certified point.
class SolverError : public Error {
public:
    using Error::Error;
};

// Channel-file and other persistence failures.
class IoError : public Error {
public:
    using Error::Error;
};

class CorruptFileError : public IoError {
public:
    using IoError::IoError;
};

}  // namespace airis
