#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <tuple>
#include <vector>

namespace vblob {

/// Order of the mollified kernel.
enum class Order : int { second = 2, fourth = 4, sixth = 6 };

/// Throws ConfigError for anything other than 2, 4 or 6.
Order order_from_int(int m);
inline int to_int(Order m) { return static_cast<int>(m); }

/// Summation strategy for the O(M^2) pair loops.
///
/// `sequential` visits pairs in ascending (i, j) order on one thread and is
/// bit-reproducible. `parallel` splits rows over worker threads; each row is
/// still summed in ascending j, but results differ from `sequential` at the
/// rounding level.
enum class Summation { sequential, parallel };

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Static problem data. Strengths are stored premultiplied, kappa_i = omega_i h^2.
class BlobSystem {
public:
    BlobSystem(Order order, double h, double delta, std::vector<double> kappa,
               std::optional<double> q = {});

    Order order() const noexcept { return order_; }
    double h() const noexcept { return h_; }
    double delta() const noexcept { return delta_; }
    /// Smoothing exponent when delta was derived as h^q.
    std::optional<double> q() const noexcept { return q_; }
    std::size_t size() const noexcept { return kappa_.size(); }
    std::span<const double> kappa() const noexcept { return kappa_; }
    double kappa(std::size_t i) const { return kappa_[i]; }

    /// Total circulation sum_i kappa_i.
    double circulation() const noexcept;

private:
    Order order_;
    double h_;
    double delta_;
    std::optional<double> q_;
    std::vector<double> kappa_;
};

/// Vortex positions at time t.
struct State {
    std::vector<double> x;
    std::vector<double> y;
    double t = 0.0;

    State() = default;
    State(std::vector<double> xs, std::vector<double> ys, double time = 0.0);

    std::size_t size() const noexcept { return x.size(); }
};

/// Per-vortex velocity components (u = dx/dt, v = dy/dt).
struct Velocities {
    std::vector<double> u;
    std::vector<double> v;

    explicit Velocities(std::size_t n = 0) : u(n, 0.0), v(n, 0.0) {}
};

/// Discrete invariants evaluated on a state.
struct ConservedSet {
    double gamma = 0.0;  ///< total circulation
    double px = 0.0;     ///< linear impulse, x component
    double py = 0.0;     ///< linear impulse, y component
    double ell = 0.0;    ///< angular impulse
    double ham = 0.0;    ///< Hamiltonian
};

/// Below this xi = r^2/delta^2 the kernel factor C(r^2)/r^2 uses its Maclaurin series.
inline constexpr double kSmallXi = 1e-3;

/// At or above this xi, Q^{(m)}(xi) e^{-xi} < 2^-54 for every order, so
/// C^{(m)} rounds to exactly 1 and the exponential terms can be skipped.
inline constexpr double kFarXi = 50.0;

// Kernel polynomials. r is the scaled squared radius r^2/delta^2.
double q_polynomial(Order m, double r);
double p_polynomial(Order m, double r);

/// C^{(m)}(r2) = 1 - Q^{(m)}(r2/delta^2) exp(-r2/delta^2).
double cutoff(Order m, double r2, double delta);

/// C^{(m)}(r2) / r2, finite at r2 = 0 (limit is c/delta^2 with c = 1, 2, 3 for m = 2, 4, 6).
double cutoff_over_r2(Order m, double r2, double delta);

/// Pair potential V^{(m)}(r2) = log r2 + E1(xi) + extra^{(m)}(xi), xi = r2/delta^2,
/// with dV/d(r2) = C^{(m)}(r2)/r2. Requires r2 > 0.
double pair_potential(Order m, double r2, double delta);

/// Scaled squared distance r2/delta^2. Every caller that must agree at the
/// rounding level (Hamiltonian, discrete right-hand side) goes through here.
inline double scaled_r2(double r2, double delta) { return r2 / (delta * delta); }

/// Approximate vorticity omega^h(z) = sum_i kappa_i zeta(z - z_i).
double blob_vorticity(const BlobSystem& system, const State& state, Point z);

/// Right-hand side of the vortex-blob ODEs.
///
/// Throws PairDegeneracyError when two vortices with nonzero strength coincide.
Velocities rhs(const BlobSystem& system, const State& state,
               Summation summation = Summation::sequential);

/// Mollified velocity field v^h(z) = sum_j kappa_j K^{delta,(m)}(z - z_j).
Point velocity_field(const BlobSystem& system, const State& state, Point z);

/// Circulation, impulses, angular impulse and Hamiltonian.
///
/// Throws PairDegeneracyError when two strength-bearing vortices coincide.
ConservedSet conserved(const BlobSystem& system, const State& state);

/// omega_0(r) = (1 - r^2)^p inside the unit disk, zero outside.
double initial_vorticity(double r, int p);

struct GridSetup {
    BlobSystem system;
    State state;
};

/// Uniform grid on [-1, 1]^2 with one vortex per cell centre, h = 2/cells,
/// delta = h^q and kappa_i = omega_0(|z_i|) h^2. With prune_zero set, vortices
/// of zero strength are dropped.
GridSetup init_grid(int cells_per_side, int p, double q, Order m, bool prune_zero);

/// Checks that a state matches the system size and holds only finite values.
void validate_state(const BlobSystem& system, const State& state);

}  // namespace vblob
