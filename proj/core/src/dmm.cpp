#include "vblob/dmm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "vblob/detail/parallel.hpp"
#include "vblob/errors.hpp"
#include "vblob/integrators.hpp"
#include "vblob/specfun.hpp"

namespace vblob {
namespace {

constexpr double kInvTwoPi = 0.5 / std::numbers::pi;
// Below this xi, Ein(xi) < E1(xi), so the Ein difference carries less rounding.
constexpr double kEinLimit = 0.5;

void require_positive_xi(double xi_k, double xi_k1) {
    if (!(xi_k > 0.0) || !(xi_k1 > 0.0))
        throw DomainError("c_tau: scaled distances must be positive at both time levels");
}

// Pair factor C^tau / (r^k)^2, shared by the stepping loop and the multiplier matrix.
struct PairTerm {
    double xbar;
    double ybar;
    double f;
};

PairTerm pair_term(const BlobSystem& system, const State& prev, const State& cand, std::size_t i,
                   std::size_t j, const CTauParams& params) {
    const double dx0 = prev.x[i] - prev.x[j];
    const double dy0 = prev.y[i] - prev.y[j];
    const double dx1 = cand.x[i] - cand.x[j];
    const double dy1 = cand.y[i] - cand.y[j];
    const double r0 = dx0 * dx0 + dy0 * dy0;
    const double r1 = dx1 * dx1 + dy1 * dy1;
    if (r0 == 0.0 || r1 == 0.0) throw PairDegeneracyError(std::min(i, j), std::max(i, j));
    const double delta = system.delta();
    const double ct = c_tau(system.order(), scaled_r2(r0, delta), scaled_r2(r1, delta), params);
    return {0.5 * (dx0 + dx1), 0.5 * (dy0 + dy1), ct / r0};
}

void check_pair(const BlobSystem& system, const State& prev, const State& cand) {
    validate_state(system, prev);
    validate_state(system, cand);
}

void dmm_rhs_rows(const BlobSystem& system, const State& prev, const State& cand,
                  const CTauParams& params, Velocities& out, std::size_t begin, std::size_t end) {
    const auto kappa = system.kappa();
    const std::size_t n = prev.size();
    for (std::size_t i = begin; i < end; ++i) {
        double u = 0.0;
        double v = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i || (kappa[i] == 0.0 && kappa[j] == 0.0)) continue;
            const PairTerm t = pair_term(system, prev, cand, i, j, params);
            u -= kappa[j] * t.ybar * t.f;
            v += kappa[j] * t.xbar * t.f;
        }
        out.u[i] = u * kInvTwoPi;
        out.v[i] = v * kInvTwoPi;
    }
}

double max_abs_diff(const State& a, const State& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max({m, std::abs(a.x[i] - b.x[i]), std::abs(a.y[i] - b.y[i])});
    return m;
}

}  // namespace

void CTauParams::validate() const {
    if (!(epsilon_switch > 0.0 && epsilon_switch < 1.0))
        throw ConfigError("Taylor switch threshold must lie in (0, 1)");
    if (taylor_terms < 1 || taylor_terms > 3) throw ConfigError("taylor_terms must be 1, 2 or 3");
}

void SolverConfig::validate() const {
    if (!(tol > 0.0)) throw ConfigError("solver tolerance must be positive");
    if (max_iters < 1) throw ConfigError("max_iters must be >= 1");
    if (!(damping > 0.0 && damping <= 1.0)) throw ConfigError("damping must lie in (0, 1]");
}

double c_tau_closed(Order m, double xi_k, double xi_k1) {
    require_positive_xi(xi_k, xi_k1);
    const double d = (xi_k1 - xi_k) / xi_k;
    if (d == 0.0) throw DomainError("c_tau_closed: undefined at z = 1");
    // log z + E1(xi_k1) - E1(xi_k); for small xi the two parts cancel to O(d xi),
    // so take the difference of Ein instead.
    const double base = std::max(xi_k, xi_k1) <= kEinLimit
                            ? exp_integral_ein(xi_k1) - exp_integral_ein(xi_k)
                            : std::log1p(d) + exp_integral_e1(xi_k1) - exp_integral_e1(xi_k);
    const double dexp = std::exp(-xi_k) * std::expm1(-(xi_k1 - xi_k));
    switch (m) {
        case Order::second: return base / d;
        case Order::fourth: return (base - dexp) / d;
        case Order::sixth:
            return (base + dexp * (-1.5 + 0.5 * xi_k)) / d + 0.5 * xi_k * std::exp(-xi_k1);
    }
    throw ConfigError("unsupported order");
}

double c_tau_taylor(Order m, double xi_k, double xi_k1, int terms) {
    require_positive_xi(xi_k, xi_k1);
    if (terms < 1 || terms > 3) throw ConfigError("taylor_terms must be 1, 2 or 3");
    const double x = xi_k;
    const double d = (xi_k1 - xi_k) / xi_k;
    const double e = std::exp(-x);
    const double x2 = x * x;
    const double x3 = x2 * x;
    // Coefficient of d^n is x^{n+1} V^{(n+1)}(x) / (n+1)! for the pair potential V.
    double c0 = -std::expm1(-x);
    double c1 = 0.5 * (-1.0 + (1.0 + x) * e);
    double c2 = (2.0 - (2.0 + 2.0 * x + x2) * e) / 6.0;
    switch (m) {
        case Order::second: break;
        case Order::fourth:
            c0 += x * e;
            c1 -= 0.5 * x2 * e;
            c2 += x3 * e / 6.0;
            break;
        case Order::sixth:
            c0 += (2.0 * x - 0.5 * x2) * e;
            c1 += 0.5 * (-2.5 * x2 + 0.5 * x3) * e;
            c2 += (3.0 * x3 - 0.5 * x3 * x) * e / 6.0;
            break;
    }
    if (terms == 1) return c0;
    if (terms == 2) return c0 + d * c1;
    return c0 + d * (c1 + d * c2);
}

double c_tau(Order m, double xi_k, double xi_k1, const CTauParams& params) {
    require_positive_xi(xi_k, xi_k1);
    const double d = (xi_k1 - xi_k) / xi_k;
    const bool taylor = std::abs(d) <= params.epsilon_switch;
    if (xi_k >= kFarXi && xi_k1 >= kFarXi) {
        // Both levels far apart: E1 terms are zero and exponentials are below
        // rounding, leaving the point-vortex divided difference of log.
        if (!taylor) return std::log1p(d) / d;
        if (params.taylor_terms == 1) return 1.0;
        if (params.taylor_terms == 2) return 1.0 - 0.5 * d;
        return 1.0 + d * (-0.5 + d / 3.0);
    }
    if (taylor) return c_tau_taylor(m, xi_k, xi_k1, params.taylor_terms);
    return c_tau_closed(m, xi_k, xi_k1);
}

Velocities dmm_rhs(const BlobSystem& system, const State& prev, const State& cand,
                   const CTauParams& params, Summation summation) {
    check_pair(system, prev, cand);
    params.validate();
    const std::size_t n = prev.size();
    Velocities out(n);
    if (summation == Summation::parallel) {
        detail::parallel_rows(n, [&](std::size_t b, std::size_t e) {
            dmm_rhs_rows(system, prev, cand, params, out, b, e);
        });
        return out;
    }
    const auto kappa = system.kappa();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (kappa[i] == 0.0 && kappa[j] == 0.0) continue;
            const PairTerm t = pair_term(system, prev, cand, i, j, params);
            out.u[i] -= kappa[j] * t.ybar * t.f;
            out.v[i] += kappa[j] * t.xbar * t.f;
            out.u[j] += kappa[i] * t.ybar * t.f;
            out.v[j] -= kappa[i] * t.xbar * t.f;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        out.u[i] *= kInvTwoPi;
        out.v[i] *= kInvTwoPi;
    }
    return out;
}

Velocities dmm_residual(const BlobSystem& system, const State& prev, const State& cand, double tau,
                        const CTauParams& params) {
    if (tau == 0.0 || !std::isfinite(tau)) throw ConfigError("time step must be finite and nonzero");
    Velocities r = dmm_rhs(system, prev, cand, params);
    for (std::size_t i = 0; i < prev.size(); ++i) {
        r.u[i] = (cand.x[i] - prev.x[i]) / tau - r.u[i];
        r.v[i] = (cand.y[i] - prev.y[i]) / tau - r.v[i];
    }
    return r;
}

StepOutcome dmm_step(const BlobSystem& system, const State& state, double tau,
                     const CTauParams& params, const SolverConfig& solver) {
    if (tau == 0.0 || !std::isfinite(tau)) throw ConfigError("time step must be finite and nonzero");
    params.validate();
    solver.validate();
    validate_state(system, state);

    State cand = rk4_step(system, state, tau, solver.summation);
    State next = cand;
    double update = 0.0;
    for (int it = 1; it <= solver.max_iters; ++it) {
        const Velocities f = dmm_rhs(system, state, cand, params, solver.summation);
        for (std::size_t i = 0; i < state.size(); ++i) {
            const double gx = state.x[i] + tau * f.u[i];
            const double gy = state.y[i] + tau * f.v[i];
            next.x[i] = cand.x[i] + solver.damping * (gx - cand.x[i]);
            next.y[i] = cand.y[i] + solver.damping * (gy - cand.y[i]);
        }
        update = max_abs_diff(next, cand);
        std::swap(cand, next);
        if (!std::isfinite(update)) break;
        if (update <= solver.tol) {
            cand.t = state.t + tau;
            return {std::move(cand), it, update};
        }
    }
    throw SolverFailure(cand.x, cand.y, update, solver.max_iters);
}

MultiplierMatrix::MultiplierMatrix(std::size_t n) : m(n) {
    for (auto& r : rows) r.assign(2 * n, 0.0);
}

std::array<double, 4> MultiplierMatrix::apply(const std::vector<double>& vx,
                                              const std::vector<double>& vy) const {
    if (vx.size() != m || vy.size() != m) throw ConfigError("vector length does not match matrix");
    std::array<double, 4> out{};
    for (std::size_t r = 0; r < 4; ++r) {
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) acc += rows[r][i] * vx[i] + rows[r][m + i] * vy[i];
        out[r] = acc;
    }
    return out;
}

std::array<double, 4> psi_vector(const ConservedSet& c) { return {c.px, c.py, c.ell, c.ham}; }

MultiplierMatrix multiplier_matrix(const BlobSystem& system, const State& state) {
    validate_state(system, state);
    const std::size_t n = state.size();
    const auto kappa = system.kappa();
    MultiplierMatrix lam(n);
    for (std::size_t i = 0; i < n; ++i) {
        lam.rows[0][n + i] = kappa[i];
        lam.rows[1][i] = -kappa[i];
        lam.rows[2][i] = -kappa[i] * state.x[i];
        lam.rows[2][n + i] = -kappa[i] * state.y[i];
        double sx = 0.0;
        double sy = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i || kappa[j] == 0.0) continue;
            const double dx = state.x[i] - state.x[j];
            const double dy = state.y[i] - state.y[j];
            const double r2 = dx * dx + dy * dy;
            if (r2 == 0.0) {
                if (kappa[i] != 0.0) throw PairDegeneracyError(std::min(i, j), std::max(i, j));
                continue;
            }
            const double f = kappa[j] * cutoff_over_r2(system.order(), r2, system.delta());
            sx += dx * f;
            sy += dy * f;
        }
        lam.rows[3][i] = -kInvTwoPi * kappa[i] * sx;
        lam.rows[3][n + i] = -kInvTwoPi * kappa[i] * sy;
    }
    return lam;
}

MultiplierMatrix discrete_multiplier_matrix(const BlobSystem& system, const State& prev,
                                            const State& cand, const CTauParams& params) {
    check_pair(system, prev, cand);
    params.validate();
    const std::size_t n = prev.size();
    const auto kappa = system.kappa();
    MultiplierMatrix lam(n);
    for (std::size_t i = 0; i < n; ++i) {
        lam.rows[0][n + i] = kappa[i];
        lam.rows[1][i] = -kappa[i];
        lam.rows[2][i] = -kappa[i] * 0.5 * (prev.x[i] + cand.x[i]);
        lam.rows[2][n + i] = -kappa[i] * 0.5 * (prev.y[i] + cand.y[i]);
        double sx = 0.0;
        double sy = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i || (kappa[i] == 0.0 && kappa[j] == 0.0)) continue;
            const PairTerm t = pair_term(system, prev, cand, i, j, params);
            sx += kappa[j] * t.xbar * t.f;
            sy += kappa[j] * t.ybar * t.f;
        }
        lam.rows[3][i] = -kInvTwoPi * kappa[i] * sx;
        lam.rows[3][n + i] = -kInvTwoPi * kappa[i] * sy;
    }
    return lam;
}

std::pair<double, double> discrete_multiplier_residuals(const BlobSystem& system, const State& prev,
                                                        const State& cand, double tau,
                                                        const CTauParams& params) {
    if (tau == 0.0 || !std::isfinite(tau)) throw ConfigError("time step must be finite and nonzero");
    const MultiplierMatrix lam = discrete_multiplier_matrix(system, prev, cand, params);
    const std::size_t n = prev.size();
    std::vector<double> dx(n);
    std::vector<double> dy(n);
    for (std::size_t i = 0; i < n; ++i) {
        dx[i] = (cand.x[i] - prev.x[i]) / tau;
        dy[i] = (cand.y[i] - prev.y[i]) / tau;
    }
    const auto lhs = lam.apply(dx, dy);
    const auto p0 = psi_vector(conserved(system, prev));
    const auto p1 = psi_vector(conserved(system, cand));
    double res1 = 0.0;
    for (std::size_t r = 0; r < 4; ++r) res1 = std::max(res1, std::abs(lhs[r] - (p1[r] - p0[r]) / tau));

    const Velocities f = dmm_rhs(system, prev, cand, params);
    const auto lf = lam.apply(f.u, f.v);
    double res2 = 0.0;
    for (double v : lf) res2 = std::max(res2, std::abs(v));
    return {res1, res2};
}

}  // namespace vblob
