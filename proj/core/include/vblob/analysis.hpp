#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "vblob/blob_model.hpp"
#include "vblob/integrators.hpp"

namespace vblob {

/// Tensor rule on the disk r <= r_max: composite Gauss-Legendre in r (Jacobian r
/// folded into the weights) times equispaced trapezoid nodes in theta.
struct QuadratureRule {
    std::vector<double> r_nodes;
    std::vector<double> r_weights;
    std::vector<double> theta_nodes;
    std::vector<double> theta_weights;
    double r_max = 1.0;

    /// Composite 8-point Gauss-Legendre on `panels` equal radial panels.
    static QuadratureRule polar(double r_max = 1.0, int panels = 16, int angular = 64);

    /// Integral of f over the disk.
    double integrate(const std::function<double(Point)>& f) const;
};

/// 8-point Gauss-Legendre nodes and weights on [a, b], ascending.
std::pair<std::vector<double>, std::vector<double>> gauss_legendre_8(double a, double b);

/// Exact velocity for omega_0 = (1 - r^2)^p in the unit disk.
Point exact_velocity(Point z, int p);

/// Angular velocity of the four-vortex ring of radius 1/sqrt(2) with strengths kappa.
double four_vortex_alpha(Order m, double delta, double kappa = 0.125);

/// Ring positions at time t.
State four_vortex_exact(double t, Order m, double delta, double kappa = 0.125);

/// Ring system with h = 1 and four equal strengths.
BlobSystem four_vortex_system(Order m, double delta = 1.0, double kappa = 0.125);

/// Euclidean norm of the stacked position differences.
double temporal_error(const State& numerical, const State& exact);

/// L2 norm of v^h - v over the rule's disk.
double spatial_error(const BlobSystem& system, const State& state, int p, const QuadratureRule& rule);

/// Same norm for an arbitrary approximate field.
double spatial_error(const std::function<Point(Point)>& field, int p, const QuadratureRule& rule);

struct ExactIntegrals {
    double gamma;
    double px;
    double py;
    double ell;
    double ham;
};

/// Continuum invariants of omega_0 = (1 - r^2)^p. The Hamiltonian is
/// -(1/4pi) times the double integral of omega omega' log|z - z'|, reduced to
/// a closed form in harmonic numbers.
ExactIntegrals exact_conserved_integrals(int p);

struct DriftSeries {
    std::vector<std::size_t> steps;
    std::vector<double> times;
    std::vector<double> gamma;
    std::vector<double> px;
    std::vector<double> py;
    std::vector<double> ell;
    std::vector<double> ham;

    double max_gamma() const;
    double max_px() const;
    double max_py() const;
    double max_ell() const;
    double max_ham() const;
};

/// |psi^k - psi^0| at every sample. Throws ConfigError for an empty record.
DriftSeries drift_series(const RunRecord& record);

struct OrderFit {
    double slope;
    double intercept;
    double r_squared;
};

/// Least-squares line through (log scale, log error). Needs at least three
/// points, all positive.
OrderFit fit_order(std::span<const std::pair<double, double>> points);

}  // namespace vblob
