#include "vblob/blob_model.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "vblob/detail/parallel.hpp"
#include "vblob/errors.hpp"
#include "vblob/specfun.hpp"

namespace vblob {
namespace {

constexpr double kInvTwoPi = 0.5 / std::numbers::pi;

// Maclaurin coefficients of C^{(m)}(xi)/xi, i.e. -a_{n+1} where a_n are the
// coefficients of Q^{(m)}(xi) e^{-xi}.
constexpr int kSeriesTerms = 7;

constexpr std::array<double, kSeriesTerms> cutoff_series(std::array<double, 3> qcoef) {
    std::array<double, kSeriesTerms + 1> e{};
    double fact = 1.0;
    for (int n = 0; n <= kSeriesTerms; ++n) {
        if (n > 0) fact *= n;
        e[n] = (n % 2 == 0 ? 1.0 : -1.0) / fact;
    }
    std::array<double, kSeriesTerms> out{};
    for (int n = 1; n <= kSeriesTerms; ++n) {
        double a = 0.0;
        for (int k = 0; k < 3 && k <= n; ++k) a += qcoef[k] * e[n - k];
        out[n - 1] = -a;
    }
    return out;
}

constexpr auto kSeries2 = cutoff_series({1.0, 0.0, 0.0});
constexpr auto kSeries4 = cutoff_series({1.0, -1.0, 0.0});
constexpr auto kSeries6 = cutoff_series({1.0, -2.0, 0.5});

const std::array<double, kSeriesTerms>& series_for(Order m) {
    switch (m) {
        case Order::second: return kSeries2;
        case Order::fourth: return kSeries4;
        case Order::sixth: return kSeries6;
    }
    throw ConfigError("unsupported order");
}

// C^{(m)}(xi) as a function of the scaled squared radius.
double cutoff_scaled(Order m, double xi) {
    // 1 - Q e^{-xi} = -expm1(-xi) + (1 - Q) e^{-xi}; no cancellation for small xi.
    const double head = -std::expm1(-xi);
    switch (m) {
        case Order::second: return head;
        case Order::fourth: return head + xi * std::exp(-xi);
        case Order::sixth: return head + (2.0 * xi - 0.5 * xi * xi) * std::exp(-xi);
    }
    throw ConfigError("unsupported order");
}

double cutoff_over_xi(Order m, double xi) {
    if (xi < kSmallXi) {
        const auto& c = series_for(m);
        double acc = 0.0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * xi + *it;
        return acc;
    }
    if (xi >= kFarXi) return 1.0 / xi;
    return cutoff_scaled(m, xi) / xi;
}

void rhs_rows(const BlobSystem& system, const State& state, Velocities& out, std::size_t begin,
              std::size_t end) {
    const auto kappa = system.kappa();
    const double delta = system.delta();
    const double inv_d2 = 1.0 / (delta * delta);
    const std::size_t n = state.size();
    for (std::size_t i = begin; i < end; ++i) {
        double u = 0.0;
        double v = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i || kappa[j] == 0.0) continue;
            const double dx = state.x[i] - state.x[j];
            const double dy = state.y[i] - state.y[j];
            const double r2 = dx * dx + dy * dy;
            if (r2 == 0.0) {
                if (kappa[i] != 0.0) throw PairDegeneracyError(std::min(i, j), std::max(i, j));
                continue;
            }
            const double f = kappa[j] * cutoff_over_xi(system.order(), scaled_r2(r2, delta)) * inv_d2;
            u -= dy * f;
            v += dx * f;
        }
        out.u[i] = u * kInvTwoPi;
        out.v[i] = v * kInvTwoPi;
    }
}

}  // namespace

Order order_from_int(int m) {
    switch (m) {
        case 2: return Order::second;
        case 4: return Order::fourth;
        case 6: return Order::sixth;
        default: throw ConfigError("order m must be 2, 4 or 6 (got " + std::to_string(m) + ")");
    }
}

BlobSystem::BlobSystem(Order order, double h, double delta, std::vector<double> kappa,
                       std::optional<double> q)
    : order_(order), h_(h), delta_(delta), q_(q), kappa_(std::move(kappa)) {
    order_from_int(to_int(order_));
    if (!(h_ > 0.0) || !std::isfinite(h_)) throw ConfigError("grid spacing h must be positive");
    if (!(delta_ > 0.0) || !std::isfinite(delta_))
        throw ConfigError("smoothing parameter delta must be positive");
    if (q_ && !(*q_ > 0.0 && *q_ < 1.0))
        throw ConfigError("smoothing exponent q must lie in (0, 1)");
    for (double k : kappa_)
        if (!std::isfinite(k)) throw ConfigError("vortex strengths must be finite");
}

double BlobSystem::circulation() const noexcept {
    double g = 0.0;
    for (double k : kappa_) g += k;
    return g;
}

State::State(std::vector<double> xs, std::vector<double> ys, double time)
    : x(std::move(xs)), y(std::move(ys)), t(time) {
    if (x.size() != y.size()) throw ConfigError("state coordinate arrays differ in length");
}

void validate_state(const BlobSystem& system, const State& state) {
    if (state.x.size() != system.size() || state.y.size() != system.size())
        throw ConfigError("state size does not match the vortex count");
    for (std::size_t i = 0; i < state.size(); ++i)
        if (!std::isfinite(state.x[i]) || !std::isfinite(state.y[i]))
            throw ConfigError("non-finite vortex position at index " + std::to_string(i));
}

double q_polynomial(Order m, double r) {
    switch (m) {
        case Order::second: return 1.0;
        case Order::fourth: return 1.0 - r;
        case Order::sixth: return 1.0 - 2.0 * r + 0.5 * r * r;
    }
    throw ConfigError("unsupported order");
}

double p_polynomial(Order m, double r) {
    using std::numbers::pi;
    switch (m) {
        case Order::second: return 1.0 / pi;
        case Order::fourth: return (2.0 - r) / pi;
        case Order::sixth: return (6.0 - 6.0 * r + r * r) / (2.0 * pi);
    }
    throw ConfigError("unsupported order");
}

double cutoff(Order m, double r2, double delta) { return cutoff_scaled(m, scaled_r2(r2, delta)); }

double cutoff_over_r2(Order m, double r2, double delta) {
    return cutoff_over_xi(m, scaled_r2(r2, delta)) / (delta * delta);
}

double pair_potential(Order m, double r2, double delta) {
    const double xi = scaled_r2(r2, delta);
    const double base = std::log(r2) + exp_integral_e1(xi);
    switch (m) {
        case Order::second: return base;
        case Order::fourth: return base - std::exp(-xi);
        case Order::sixth: return base + (-1.5 + 0.5 * xi) * std::exp(-xi);
    }
    throw ConfigError("unsupported order");
}

double blob_vorticity(const BlobSystem& system, const State& state, Point z) {
    validate_state(system, state);
    const double delta = system.delta();
    double w = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i) {
        const double dx = z.x - state.x[i];
        const double dy = z.y - state.y[i];
        const double xi = scaled_r2(dx * dx + dy * dy, delta);
        w += system.kappa(i) * p_polynomial(system.order(), xi) * std::exp(-xi);
    }
    return w / (delta * delta);
}

Velocities rhs(const BlobSystem& system, const State& state, Summation summation) {
    validate_state(system, state);
    const std::size_t n = state.size();
    Velocities out(n);
    if (summation == Summation::parallel) {
        detail::parallel_rows(n, [&](std::size_t b, std::size_t e) { rhs_rows(system, state, out, b, e); });
        return out;
    }

    const auto kappa = system.kappa();
    const double delta = system.delta();
    const double inv_d2 = 1.0 / (delta * delta);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (kappa[i] == 0.0 && kappa[j] == 0.0) continue;
            const double dx = state.x[i] - state.x[j];
            const double dy = state.y[i] - state.y[j];
            const double r2 = dx * dx + dy * dy;
            if (r2 == 0.0) {
                if (kappa[i] != 0.0 && kappa[j] != 0.0) throw PairDegeneracyError(i, j);
                continue;
            }
            const double f = cutoff_over_xi(system.order(), scaled_r2(r2, delta)) * inv_d2;
            out.u[i] -= kappa[j] * dy * f;
            out.v[i] += kappa[j] * dx * f;
            out.u[j] += kappa[i] * dy * f;
            out.v[j] -= kappa[i] * dx * f;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        out.u[i] *= kInvTwoPi;
        out.v[i] *= kInvTwoPi;
    }
    return out;
}

Point velocity_field(const BlobSystem& system, const State& state, Point z) {
    validate_state(system, state);
    const double delta = system.delta();
    double u = 0.0;
    double v = 0.0;
    for (std::size_t j = 0; j < state.size(); ++j) {
        const double kj = system.kappa(j);
        if (kj == 0.0) continue;
        const double dx = z.x - state.x[j];
        const double dy = z.y - state.y[j];
        const double f = kj * cutoff_over_r2(system.order(), dx * dx + dy * dy, delta);
        u -= dy * f;
        v += dx * f;
    }
    return {u * kInvTwoPi, v * kInvTwoPi};
}

ConservedSet conserved(const BlobSystem& system, const State& state) {
    validate_state(system, state);
    const auto kappa = system.kappa();
    const std::size_t n = state.size();
    ConservedSet c;
    double pair_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = state.x[i];
        const double yi = state.y[i];
        c.gamma += kappa[i];
        c.px += kappa[i] * yi;
        c.py -= kappa[i] * xi;
        c.ell -= 0.5 * kappa[i] * (xi * xi + yi * yi);
        if (kappa[i] == 0.0) continue;
        for (std::size_t j = i + 1; j < n; ++j) {
            if (kappa[j] == 0.0) continue;
            const double dx = xi - state.x[j];
            const double dy = yi - state.y[j];
            const double r2 = dx * dx + dy * dy;
            if (r2 == 0.0) throw PairDegeneracyError(i, j);
            pair_sum += kappa[i] * kappa[j] * pair_potential(system.order(), r2, system.delta());
        }
    }
    c.ham = -pair_sum / (4.0 * std::numbers::pi);
    return c;
}

double initial_vorticity(double r, int p) {
    if (p < 1) throw ConfigError("vorticity exponent p must be >= 1");
    if (r > 1.0) return 0.0;
    const double base = 1.0 - r * r;
    double w = 1.0;
    for (int k = 0; k < p; ++k) w *= base;
    return w;
}

GridSetup init_grid(int cells_per_side, int p, double q, Order m, bool prune_zero) {
    if (cells_per_side < 1) throw ConfigError("cells per side must be >= 1");
    if (!(q > 0.0 && q < 1.0)) throw ConfigError("smoothing exponent q must lie in (0, 1)");
    const double h = 2.0 / cells_per_side;
    std::vector<double> xs;
    std::vector<double> ys;
    std::vector<double> kappa;
    const auto total = static_cast<std::size_t>(cells_per_side) * cells_per_side;
    xs.reserve(total);
    ys.reserve(total);
    kappa.reserve(total);
    for (int iy = 0; iy < cells_per_side; ++iy) {
        const double y = -1.0 + (iy + 0.5) * h;
        for (int ix = 0; ix < cells_per_side; ++ix) {
            const double x = -1.0 + (ix + 0.5) * h;
            const double k = initial_vorticity(std::hypot(x, y), p) * h * h;
            if (prune_zero && k == 0.0) continue;
            xs.push_back(x);
            ys.push_back(y);
            kappa.push_back(k);
        }
    }
    return {BlobSystem(m, h, std::pow(h, q), std::move(kappa), q), State(std::move(xs), std::move(ys))};
}

}  // namespace vblob
