#pragma once

#include <stdexcept>
#include <string>

namespace eptk {

/// Caller supplied something outside an operation's contract.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A well-formed request that has no mathematical answer at this input
/// (complex spectrum, degenerate spectrum, vertex not found, ...).
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Iterative eigensolver gave up.
class ConvergenceError : public DomainError {
public:
    ConvergenceError(const std::string& what, int iterations)
        : DomainError(what + " (after " + std::to_string(iterations) + " iterations)"),
          iterations_(iterations) {}

    int iterations() const noexcept { return iterations_; }

private:
    int iterations_;
};

} // namespace eptk
