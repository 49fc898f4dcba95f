#pragma once

#include <stdexcept>
#include <string>

namespace ahilb {

/// Input violates an operation's precondition (bad shapes, out-of-range
/// parameters, inconsistent ideals). Maps to CLI exit code 2.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A computation could not deliver its contract (quadrature did not
/// converge, fit residuals too large, enumeration bound exceeded). Maps to
/// CLI exit code 3.
class ComputationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ahilb
