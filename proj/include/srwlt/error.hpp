#pragma once

#include <stdexcept>
#include <string>

namespace srwlt {

/// Argument outside the mathematical domain of an operation (x = 0 for the
/// avoid-zero law, a >= b for the stay-above probability, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A streaming precondition was broken by the caller, e.g. a non-adjacent
/// site fed to a visit tally.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Malformed or inconsistent experiment configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A request exceeds a documented resource cap (enumeration depth, DP size).
class ResourceCapError : public std::length_error {
public:
    using std::length_error::length_error;
};

} // namespace srwlt
