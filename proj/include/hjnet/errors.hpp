#ifndef HJNET_ERRORS_HPP
#define HJNET_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace hjnet {

// Base class for all library failures.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad user input: malformed configs, unknown ids, invalid arguments.
struct ConfigError : Error {
    using Error::Error;
};

// A numerical procedure failed (root search, convergence, stability).
struct NumericalError : Error {
    using Error::Error;
};

// A sampled function violated the quasi-convexity contract.
struct InvalidHamiltonianError : Error {
    using Error::Error;
};

// Level-set query below the minimum of the Hamiltonian.
struct BelowMinimumError : NumericalError {
    using NumericalError::NumericalError;
};

// A root or level set fell outside the configured search interval.
struct SearchBoundError : NumericalError {
    using NumericalError::NumericalError;
};

// Time step too large for the monotone scheme.
struct CflError : NumericalError {
    double required_dt;
    CflError(const std::string& msg, double required) : NumericalError(msg), required_dt(required) {}
};

// Fixed-point iteration hit its iteration cap.
struct ConvergenceError : NumericalError {
    double residual;
    ConvergenceError(const std::string& msg, double res) : NumericalError(msg), residual(res) {}
};

// Vertex test function regularization could not meet its budget.
struct RegularizationError : NumericalError {
    using NumericalError::NumericalError;
};

// Query outside the admissible domain of an operator.
struct OutsideDomainError : Error {
    using Error::Error;
};

// A controlled trajectory left the network.
struct InfeasibleError : Error {
    using Error::Error;
};

}  // namespace hjnet

#endif
