#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace vblob {

/// Invalid problem or solver configuration (unsupported order, bad tolerance, ...).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the domain of a special function.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Two vortices sit at exactly the same point where the model needs a
/// positive separation.
class PairDegeneracyError : public std::runtime_error {
public:
    PairDegeneracyError(std::size_t i, std::size_t j, std::optional<std::size_t> step = {});

    std::size_t first() const noexcept { return i_; }
    std::size_t second() const noexcept { return j_; }
    std::optional<std::size_t> step() const noexcept { return step_; }

    PairDegeneracyError at_step(std::size_t step) const { return {i_, j_, step}; }

private:
    std::size_t i_;
    std::size_t j_;
    std::optional<std::size_t> step_;
};

/// Fixed-point iteration did not reach its tolerance. Carries the last
/// iterate so callers can inspect where it stalled.
class SolverFailure : public std::runtime_error {
public:
    SolverFailure(std::vector<double> last_x, std::vector<double> last_y, double residual,
                  int iterations, std::optional<std::size_t> step = {});

    const std::vector<double>& last_x() const noexcept { return x_; }
    const std::vector<double>& last_y() const noexcept { return y_; }
    double residual() const noexcept { return residual_; }
    int iterations() const noexcept { return iterations_; }
    std::optional<std::size_t> step() const noexcept { return step_; }

    SolverFailure at_step(std::size_t step) const { return {x_, y_, residual_, iterations_, step}; }

private:
    std::vector<double> x_;
    std::vector<double> y_;
    double residual_;
    int iterations_;
    std::optional<std::size_t> step_;
};

}  // namespace vblob
