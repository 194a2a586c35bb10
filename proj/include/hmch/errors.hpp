#pragma once

#include <stdexcept>
#include <string>

namespace hmch {

/// Argument outside the mathematical domain of an operation (a <= 0, M < m, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Two fields on incompatible grids, or a grid size that is not allowed.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Evaluation at a point where a closed form has a genuine singularity.
class SingularityError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Non-finite state produced during time integration.
class BlowUpError : public std::runtime_error {
public:
    BlowUpError(double time, double max_abs)
        : std::runtime_error("blow-up detected at t=" + std::to_string(time) +
                             " (max|u|=" + std::to_string(max_abs) + ")"),
          time_(time), max_abs_(max_abs) {}

    double time() const noexcept { return time_; }
    double max_abs() const noexcept { return max_abs_; }

private:
    double time_;
    double max_abs_;
};

} // namespace hmch
