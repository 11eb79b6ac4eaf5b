#pragma once

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

#include "vblob/blob_model.hpp"

namespace vblob {

/// Controls the switch between the closed-form and Taylor evaluation of C^tau.
struct CTauParams {
    double epsilon_switch = 1e-4;  ///< Taylor branch when |z - 1| <= epsilon_switch
    int taylor_terms = 3;          ///< terms kept in (z - 1), 1..3

    void validate() const;
};

/// Fixed-point iteration settings shared by the implicit steppers.
struct SolverConfig {
    double tol = 1e-13;  ///< max-norm position update at which iteration stops
    int max_iters = 200;
    /// Relaxation factor: x <- x + damping * (G(x) - x). 1 is plain Picard.
    double damping = 1.0;
    Summation summation = Summation::sequential;

    void validate() const;
};

struct StepOutcome {
    State next;
    int iterations = 0;
    double residual = 0.0;  ///< max-norm of the final update
};

/// Discrete cutoff factor between scaled squared distances xi_k (old level)
/// and xi_k1 (new level). Reduces to C^{(m)} at xi_k1 = xi_k.
///
/// Throws DomainError when either argument is not positive.
double c_tau(Order m, double xi_k, double xi_k1, const CTauParams& params = {});

/// Closed form only, whatever the size of z - 1. Loses accuracy as z -> 1.
double c_tau_closed(Order m, double xi_k, double xi_k1);

/// Truncated expansion in (z - 1) about xi_k, with `terms` in 1..3.
double c_tau_taylor(Order m, double xi_k, double xi_k1, int terms = 3);

/// Discrete right-hand side f^tau(cand, prev).
///
/// Throws PairDegeneracyError when a pair with any nonzero strength has zero
/// separation at either time level.
Velocities dmm_rhs(const BlobSystem& system, const State& prev, const State& cand,
                   const CTauParams& params = {}, Summation summation = Summation::sequential);

/// F^tau = (cand - prev)/tau - f^tau(cand, prev).
Velocities dmm_residual(const BlobSystem& system, const State& prev, const State& cand, double tau,
                        const CTauParams& params = {});

/// One conservative step: Picard iteration on x = x^k + tau f^tau(x, x^k),
/// started from an RK4 predictor.
///
/// Throws SolverFailure if the update does not fall below solver.tol within
/// solver.max_iters iterations.
StepOutcome dmm_step(const BlobSystem& system, const State& state, double tau,
                     const CTauParams& params = {}, const SolverConfig& solver = {});

/// Dense 4 x 2M multiplier matrix. Columns 0..M-1 act on x, M..2M-1 on y;
/// rows correspond to (P_x, P_y, L, H).
struct MultiplierMatrix {
    std::size_t m = 0;
    std::array<std::vector<double>, 4> rows;

    explicit MultiplierMatrix(std::size_t n = 0);
    /// Row-by-vector products against velocities or increments.
    std::array<double, 4> apply(const std::vector<double>& vx, const std::vector<double>& vy) const;
};

/// (P_x, P_y, L, H) as an array, in multiplier-row order.
std::array<double, 4> psi_vector(const ConservedSet& c);

/// Continuous multiplier matrix at one state.
MultiplierMatrix multiplier_matrix(const BlobSystem& system, const State& state);

/// Discrete multiplier matrix between two states.
MultiplierMatrix discrete_multiplier_matrix(const BlobSystem& system, const State& prev,
                                            const State& cand, const CTauParams& params = {});

/// (res1, res2) with res1 = |Lambda^tau (cand - prev)/tau - (psi(cand) - psi(prev))/tau|_inf
/// and res2 = |Lambda^tau f^tau|_inf. Both vanish identically for any pair of states.
std::pair<double, double> discrete_multiplier_residuals(const BlobSystem& system, const State& prev,
                                                        const State& cand, double tau,
                                                        const CTauParams& params = {});

}  // namespace vblob
