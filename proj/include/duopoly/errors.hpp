#pragma once

#include <stdexcept>
#include <string>

namespace duopoly {

/// Invalid or malformed model/simulation configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical solver failed to converge or produced an inconsistent solution.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The L/F/C geometry does not have the shape an operation requires
/// (wrong number of preemption intervals, L <= C inside an A-interval, ...).
class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the operation's domain (ordering violations, z <= 0, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace duopoly
