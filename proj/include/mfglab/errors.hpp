#pragma once

#include <stdexcept>
#include <string>

namespace mfglab {

/// Precondition violation on a public operation.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A computation produced a non-finite value or failed to converge.
class NumericalFailure : public std::runtime_error {
public:
    explicit NumericalFailure(const std::string& what, double time = 0.0)
        : std::runtime_error(what), time_(time) {}

    /// Time at which the failure was detected (0 when not time-related).
    double time() const noexcept { return time_; }

private:
    double time_;
};

/// The requested combination of inputs has no implemented derivation.
class UnsupportedCase : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace mfglab
