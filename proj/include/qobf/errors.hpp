#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qobf {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// QASM syntax or unsupported-construct error, with source position.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t line, std::size_t column)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                ": " + message),
          line_(line),
          column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Circuit invariant violation (bad arity, out-of-range qubit, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Gates inside one barrier-delimited region overlap on a qubit.
class SliceError : public Error {
public:
    using Error::Error;
};

/// No legal insertion point, or a stale/occupied candidate.
class CandidateError : public Error {
public:
    using Error::Error;
};

/// Simulation precondition failures: qubit cap, missing measurements,
/// malformed inputs or distributions, layout mismatch.
class SimError : public Error {
public:
    using Error::Error;
};

/// Restoration failed: recorded dummy gate absent or digest check failed.
/// Signals that a downstream pass moved or optimized away the dummy SWAP.
class KeyMismatchError : public Error {
public:
    using Error::Error;
};

}  // namespace qobf
