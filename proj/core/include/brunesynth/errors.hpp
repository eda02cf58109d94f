#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace brunesynth {

// Bad input or violated precondition. CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Anything that went wrong while computing. CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public NumericalError {
public:
    DomainError(const std::string& what, std::size_t pole_index)
        : NumericalError(what), pole_index_(pole_index) {}
    std::size_t pole_index() const noexcept { return pole_index_; }

private:
    std::size_t pole_index_;
};

class NotPositiveRealError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Carries a human-readable extraction log so failures deep in a cascade can be diagnosed.
class ConditioningError : public NumericalError {
public:
    ConditioningError(const std::string& what, std::vector<std::string> log = {})
        : NumericalError(what), log_(std::move(log)) {}
    const std::vector<std::string>& log() const noexcept { return log_; }

private:
    std::vector<std::string> log_;
};

class ConvergenceError : public NumericalError {
public:
    ConvergenceError(const std::string& what, std::vector<std::string> trajectory = {})
        : NumericalError(what), trajectory_(std::move(trajectory)) {}
    const std::vector<std::string>& trajectory() const noexcept { return trajectory_; }

private:
    std::vector<std::string> trajectory_;
};

class UnsupportedError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

}  // namespace brunesynth
