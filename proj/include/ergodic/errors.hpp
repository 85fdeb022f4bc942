#pragma once

#include <stdexcept>
#include <string>

namespace ergodic {

/// Argument outside the mathematical domain of an operation (e.g. eps > pi).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Caller broke a precondition that is not about numeric ranges
/// (mismatched dimensions, short grids, unit-norm requirements).
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A designer spec cannot be realized; the message carries the diagnostic.
class ConstructionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ergodic
