#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace divstats {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A configuration violates one or more invariants; every violation is kept.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(std::vector<std::string> violations)
        : std::invalid_argument(join(violations)), violations_(std::move(violations)) {}

    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    static std::string join(const std::vector<std::string>& v) {
        std::string out = "invalid configuration";
        for (std::size_t i = 0; i < v.size(); ++i) {
            out += (i == 0 ? ": " : "; ");
            out += v[i];
        }
        return out;
    }

    std::vector<std::string> violations_;
};

/// An operation was called for a config whose regime needs a different formula.
class RegimeError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Iterative/adaptive evaluation did not reach its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double estimate, double error_bound)
        : std::runtime_error(what), estimate_(estimate), error_bound_(error_bound) {}

    double estimate() const noexcept { return estimate_; }
    double error_bound() const noexcept { return error_bound_; }

private:
    double estimate_;
    double error_bound_;
};

/// Simulation request that cannot be honored (memory bound, bad rate, ...).
class ConfigurationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Too little simulated data to form the requested estimate.
class InsufficientData : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace divstats
