#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vblob/blob_model.hpp"
#include "vblob/dmm.hpp"

namespace vblob {

enum class MethodKind { rk4, rm2, rm4, imm, dmm };

/// Parses "rk4", "rm2", "rm4", "imm" or "dmm"; throws ConfigError otherwise.
MethodKind method_from_string(std::string_view name);
std::string_view to_string(MethodKind kind);

/// A stepper choice. Implicit methods (imm, dmm) carry a SolverConfig.
class Method {
public:
    static Method explicit_method(MethodKind kind, Summation summation = Summation::sequential);
    static Method implicit_method(MethodKind kind, SolverConfig solver = {}, CTauParams ctau = {});
    /// Picks explicit or implicit construction from the kind.
    static Method make(MethodKind kind, SolverConfig solver = {}, CTauParams ctau = {});

    MethodKind kind() const noexcept { return kind_; }
    bool is_implicit() const noexcept { return solver_.has_value(); }
    const std::optional<SolverConfig>& solver() const noexcept { return solver_; }
    const CTauParams& ctau() const noexcept { return ctau_; }
    Summation summation() const noexcept { return summation_; }

private:
    Method(MethodKind kind, std::optional<SolverConfig> solver, CTauParams ctau, Summation summation);

    MethodKind kind_;
    std::optional<SolverConfig> solver_;
    CTauParams ctau_;
    Summation summation_;
};

/// Explicit Runge-Kutta coefficients (a strictly lower triangular).
struct ButcherTableau {
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    std::vector<double> c;
};

/// Tableau of rk4, rm2 or rm4; throws ConfigError for the implicit kinds.
const ButcherTableau& tableau(MethodKind kind);

State rk4_step(const BlobSystem& system, const State& state, double tau,
               Summation summation = Summation::sequential);

/// Ralston two-stage method: c = (0, 2/3), b = (1/4, 3/4).
State rm2_step(const BlobSystem& system, const State& state, double tau,
               Summation summation = Summation::sequential);

/// Ralston four-stage method with minimal truncation error bound.
State rm4_step(const BlobSystem& system, const State& state, double tau,
               Summation summation = Summation::sequential);

/// Implicit midpoint: next = state + tau f((state + next)/2), Picard iteration
/// from an RK4 predictor. Throws SolverFailure on non-convergence.
StepOutcome imm_step(const BlobSystem& system, const State& state, double tau,
                     const SolverConfig& solver = {});

/// One step of any method; explicit methods report zero iterations.
StepOutcome step(const BlobSystem& system, const State& state, double tau, const Method& method);

struct Sample {
    std::size_t step = 0;
    double t = 0.0;
    ConservedSet psi;
    std::optional<State> state;
};

struct RunRecord {
    MethodKind method = MethodKind::rk4;
    double tau = 0.0;
    std::size_t n_steps = 0;
    std::vector<Sample> samples;
    /// Per-step solver iterations and final updates (implicit methods only).
    std::vector<int> iterations;
    std::vector<double> residuals;
    /// Seconds spent inside the stepper calls.
    double wall_seconds = 0.0;
    State final_state;
};

/// Called after every stride-th step (and for the initial state) with the step index.
using Observer = std::function<void(std::size_t step, const State& state)>;

struct IntegrateOptions {
    std::size_t stride = 1;
    bool sample_conserved = true;
    bool sample_states = false;
    Observer observer;
};

/// Applies `method` n_steps times. Samples are taken at step 0, every stride
/// steps, and at the last step. Step errors are rethrown carrying the 1-based
/// index of the step that failed.
RunRecord integrate(const BlobSystem& system, const State& state, double tau, std::size_t n_steps,
                    const Method& method, const IntegrateOptions& options = {});

}  // namespace vblob
