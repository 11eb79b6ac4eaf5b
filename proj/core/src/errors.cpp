#include "vblob/errors.hpp"

#include <sstream>

namespace vblob {
namespace {

std::string step_suffix(std::optional<std::size_t> step) {
    if (!step) return {};
    return " at step " + std::to_string(*step);
}

std::string degeneracy_message(std::size_t i, std::size_t j, std::optional<std::size_t> step) {
    std::ostringstream os;
    os << "coincident vortices " << i << " and " << j << step_suffix(step);
    return os.str();
}

std::string solver_message(double residual, int iterations, std::optional<std::size_t> step) {
    std::ostringstream os;
    os << "fixed-point iteration did not converge after " << iterations
       << " iterations (last update " << residual << ")" << step_suffix(step);
    return os.str();
}

}  // namespace

PairDegeneracyError::PairDegeneracyError(std::size_t i, std::size_t j,
                                         std::optional<std::size_t> step)
    : std::runtime_error(degeneracy_message(i, j, step)), i_(i), j_(j), step_(step) {}

SolverFailure::SolverFailure(std::vector<double> last_x, std::vector<double> last_y,
                             double residual, int iterations, std::optional<std::size_t> step)
    : std::runtime_error(solver_message(residual, iterations, step)),
      x_(std::move(last_x)),
      y_(std::move(last_y)),
      residual_(residual),
      iterations_(iterations),
      step_(step) {}

}  // namespace vblob
