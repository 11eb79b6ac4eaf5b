#include "vblob/integrators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "vblob/errors.hpp"

namespace vblob {
namespace {

const double kSqrt5 = std::sqrt(5.0);

ButcherTableau make_tableau(std::vector<std::vector<double>> a, std::vector<double> b) {
    std::vector<double> c;
    for (const auto& row : a) {
        double sum = 0.0;
        for (double v : row) sum += v;
        c.push_back(sum);
    }
    return {std::move(a), std::move(b), std::move(c)};
}

const ButcherTableau kRk4 = make_tableau({{}, {0.5}, {0.0, 0.5}, {0.0, 0.0, 1.0}},
                                         {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0});

const ButcherTableau kRm2 = make_tableau({{}, {2.0 / 3.0}}, {0.25, 0.75});

// Ralston (1962), exact values in terms of sqrt(5):
//   c = (0, 2/5, 7/8 - 3 sqrt5/16, 1)
//   a31 = (-2889 + 1428 sqrt5)/1024     a32 = (3785 - 1620 sqrt5)/1024
//   a41 = (-3365 + 2094 sqrt5)/6040     a42 = (-975 - 3046 sqrt5)/2552
//   a43 = (467040 + 203968 sqrt5)/240845
//   b = ((263 + 24 sqrt5)/1812, (125 - 1000 sqrt5)/3828,
//        1024 (3346 + 1623 sqrt5)/5924787, (30 - 4 sqrt5)/123)
const ButcherTableau kRm4 = make_tableau(
    {{},
     {0.4},
     {(-2889.0 + 1428.0 * kSqrt5) / 1024.0, (3785.0 - 1620.0 * kSqrt5) / 1024.0},
     {(-3365.0 + 2094.0 * kSqrt5) / 6040.0, (-975.0 - 3046.0 * kSqrt5) / 2552.0,
      (467040.0 + 203968.0 * kSqrt5) / 240845.0}},
    {(263.0 + 24.0 * kSqrt5) / 1812.0, (125.0 - 1000.0 * kSqrt5) / 3828.0,
     1024.0 * (3346.0 + 1623.0 * kSqrt5) / 5924787.0, (30.0 - 4.0 * kSqrt5) / 123.0});

void require_step(double tau) {
    if (!std::isfinite(tau)) throw ConfigError("time step must be finite");
}

State explicit_rk(const BlobSystem& system, const State& state, double tau, const ButcherTableau& tab,
                  Summation summation) {
    require_step(tau);
    validate_state(system, state);
    const std::size_t n = state.size();
    const std::size_t stages = tab.b.size();
    std::vector<Velocities> k;
    k.reserve(stages);
    State stage = state;
    for (std::size_t s = 0; s < stages; ++s) {
        for (std::size_t i = 0; i < n; ++i) {
            double ax = 0.0;
            double ay = 0.0;
            for (std::size_t r = 0; r < s; ++r) {
                ax += tab.a[s][r] * k[r].u[i];
                ay += tab.a[s][r] * k[r].v[i];
            }
            stage.x[i] = state.x[i] + tau * ax;
            stage.y[i] = state.y[i] + tau * ay;
        }
        k.push_back(rhs(system, stage, summation));
    }
    State out = state;
    for (std::size_t i = 0; i < n; ++i) {
        double bx = 0.0;
        double by = 0.0;
        for (std::size_t s = 0; s < stages; ++s) {
            bx += tab.b[s] * k[s].u[i];
            by += tab.b[s] * k[s].v[i];
        }
        out.x[i] += tau * bx;
        out.y[i] += tau * by;
    }
    out.t = state.t + tau;
    return out;
}

}  // namespace

MethodKind method_from_string(std::string_view name) {
    if (name == "rk4") return MethodKind::rk4;
    if (name == "rm2") return MethodKind::rm2;
    if (name == "rm4") return MethodKind::rm4;
    if (name == "imm") return MethodKind::imm;
    if (name == "dmm") return MethodKind::dmm;
    throw ConfigError("unknown method '" + std::string(name) + "'");
}

std::string_view to_string(MethodKind kind) {
    switch (kind) {
        case MethodKind::rk4: return "rk4";
        case MethodKind::rm2: return "rm2";
        case MethodKind::rm4: return "rm4";
        case MethodKind::imm: return "imm";
        case MethodKind::dmm: return "dmm";
    }
    return "?";
}

Method::Method(MethodKind kind, std::optional<SolverConfig> solver, CTauParams ctau,
               Summation summation)
    : kind_(kind), solver_(std::move(solver)), ctau_(ctau), summation_(summation) {}

Method Method::explicit_method(MethodKind kind, Summation summation) {
    if (kind == MethodKind::imm || kind == MethodKind::dmm)
        throw ConfigError(std::string(to_string(kind)) + " is implicit and needs a solver config");
    return {kind, std::nullopt, CTauParams{}, summation};
}

Method Method::implicit_method(MethodKind kind, SolverConfig solver, CTauParams ctau) {
    if (kind != MethodKind::imm && kind != MethodKind::dmm)
        throw ConfigError(std::string(to_string(kind)) + " is explicit");
    solver.validate();
    ctau.validate();
    return {kind, solver, ctau, solver.summation};
}

Method Method::make(MethodKind kind, SolverConfig solver, CTauParams ctau) {
    if (kind == MethodKind::imm || kind == MethodKind::dmm) return implicit_method(kind, solver, ctau);
    return explicit_method(kind, solver.summation);
}

const ButcherTableau& tableau(MethodKind kind) {
    switch (kind) {
        case MethodKind::rk4: return kRk4;
        case MethodKind::rm2: return kRm2;
        case MethodKind::rm4: return kRm4;
        default: throw ConfigError(std::string(to_string(kind)) + " has no explicit tableau");
    }
}

State rk4_step(const BlobSystem& system, const State& state, double tau, Summation summation) {
    return explicit_rk(system, state, tau, kRk4, summation);
}

State rm2_step(const BlobSystem& system, const State& state, double tau, Summation summation) {
    return explicit_rk(system, state, tau, kRm2, summation);
}

State rm4_step(const BlobSystem& system, const State& state, double tau, Summation summation) {
    return explicit_rk(system, state, tau, kRm4, summation);
}

StepOutcome imm_step(const BlobSystem& system, const State& state, double tau,
                     const SolverConfig& solver) {
    require_step(tau);
    solver.validate();
    validate_state(system, state);
    const std::size_t n = state.size();
    State cand = rk4_step(system, state, tau, solver.summation);
    State mid = state;
    State next = cand;
    double update = 0.0;
    for (int it = 1; it <= solver.max_iters; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            mid.x[i] = 0.5 * (state.x[i] + cand.x[i]);
            mid.y[i] = 0.5 * (state.y[i] + cand.y[i]);
        }
        const Velocities f = rhs(system, mid, solver.summation);
        update = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double gx = state.x[i] + tau * f.u[i];
            const double gy = state.y[i] + tau * f.v[i];
            next.x[i] = cand.x[i] + solver.damping * (gx - cand.x[i]);
            next.y[i] = cand.y[i] + solver.damping * (gy - cand.y[i]);
            update = std::max({update, std::abs(next.x[i] - cand.x[i]), std::abs(next.y[i] - cand.y[i])});
        }
        std::swap(cand, next);
        if (!std::isfinite(update)) break;
        if (update <= solver.tol) {
            cand.t = state.t + tau;
            return {std::move(cand), it, update};
        }
    }
    throw SolverFailure(cand.x, cand.y, update, solver.max_iters);
}

StepOutcome step(const BlobSystem& system, const State& state, double tau, const Method& method) {
    switch (method.kind()) {
        case MethodKind::rk4: return {rk4_step(system, state, tau, method.summation()), 0, 0.0};
        case MethodKind::rm2: return {rm2_step(system, state, tau, method.summation()), 0, 0.0};
        case MethodKind::rm4: return {rm4_step(system, state, tau, method.summation()), 0, 0.0};
        case MethodKind::imm: return imm_step(system, state, tau, *method.solver());
        case MethodKind::dmm: return dmm_step(system, state, tau, method.ctau(), *method.solver());
    }
    throw ConfigError("unknown method");
}

RunRecord integrate(const BlobSystem& system, const State& state, double tau, std::size_t n_steps,
                    const Method& method, const IntegrateOptions& options) {
    require_step(tau);
    validate_state(system, state);
    const std::size_t stride = std::max<std::size_t>(1, options.stride);

    RunRecord rec;
    rec.method = method.kind();
    rec.tau = tau;
    rec.n_steps = n_steps;

    auto sample = [&](std::size_t k, const State& s) {
        if (options.sample_conserved || options.sample_states) {
            Sample smp;
            smp.step = k;
            smp.t = s.t;
            if (options.sample_conserved) smp.psi = conserved(system, s);
            if (options.sample_states) smp.state = s;
            rec.samples.push_back(std::move(smp));
        }
        if (options.observer) options.observer(k, s);
    };

    State cur = state;
    sample(0, cur);
    using clock = std::chrono::steady_clock;
    clock::duration elapsed{};
    for (std::size_t k = 1; k <= n_steps; ++k) {
        StepOutcome out;
        const auto t0 = clock::now();
        try {
            out = step(system, cur, tau, method);
        } catch (const PairDegeneracyError& e) {
            throw e.at_step(k);
        } catch (const SolverFailure& e) {
            throw e.at_step(k);
        }
        elapsed += clock::now() - t0;
        if (method.is_implicit()) {
            rec.iterations.push_back(out.iterations);
            rec.residuals.push_back(out.residual);
        }
        cur = std::move(out.next);
        if (k % stride == 0 || k == n_steps) sample(k, cur);
    }
    rec.wall_seconds = std::chrono::duration<double>(elapsed).count();
    rec.final_state = std::move(cur);
    return rec;
}

}  // namespace vblob
