#include "vblob/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>

#include "vblob/errors.hpp"

namespace vblob {
namespace {

void require_exponent(int p) {
    if (p < 1) throw ConfigError("vorticity exponent p must be >= 1");
}

double harmonic(int n) {
    double h = 0.0;
    for (int k = n; k >= 1; --k) h += 1.0 / k;
    return h;
}

double max_of(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, x);
    return m;
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> gauss_legendre_8(double a, double b) {
    using rule = boost::math::quadrature::gauss<double, 8>;
    const auto& xs = rule::abscissa();
    const auto& ws = rule::weights();
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    std::vector<double> nodes;
    std::vector<double> weights;
    // Boost stores the non-negative half of the symmetric rule.
    for (std::size_t k = xs.size(); k-- > 0;) {
        if (xs[k] == 0.0) continue;
        nodes.push_back(mid - half * xs[k]);
        weights.push_back(half * ws[k]);
    }
    for (std::size_t k = 0; k < xs.size(); ++k) {
        nodes.push_back(mid + half * xs[k]);
        weights.push_back(half * ws[k]);
    }
    return {nodes, weights};
}

QuadratureRule QuadratureRule::polar(double r_max, int panels, int angular) {
    if (!(r_max > 0.0) || panels < 1 || angular < 1)
        throw ConfigError("quadrature needs r_max > 0, panels >= 1 and angular >= 1");
    QuadratureRule rule;
    rule.r_max = r_max;
    const double width = r_max / panels;
    for (int k = 0; k < panels; ++k) {
        auto [nodes, weights] = gauss_legendre_8(k * width, (k + 1) * width);
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            rule.r_nodes.push_back(nodes[i]);
            rule.r_weights.push_back(weights[i] * nodes[i]);
        }
    }
    const double dtheta = 2.0 * std::numbers::pi / angular;
    for (int k = 0; k < angular; ++k) {
        rule.theta_nodes.push_back(k * dtheta);
        rule.theta_weights.push_back(dtheta);
    }
    return rule;
}

double QuadratureRule::integrate(const std::function<double(Point)>& f) const {
    double total = 0.0;
    for (std::size_t a = 0; a < theta_nodes.size(); ++a) {
        const double c = std::cos(theta_nodes[a]);
        const double s = std::sin(theta_nodes[a]);
        double ring = 0.0;
        for (std::size_t k = 0; k < r_nodes.size(); ++k)
            ring += r_weights[k] * f({r_nodes[k] * c, r_nodes[k] * s});
        total += theta_weights[a] * ring;
    }
    return total;
}

Point exact_velocity(Point z, int p) {
    require_exponent(p);
    const double u = z.x * z.x + z.y * z.y;
    const double n = p + 1.0;
    double factor;
    if (u == 0.0) {
        factor = 0.5;
    } else if (u <= 1.0) {
        // (1 - (1-u)^n) / (2 n u), accurate as u -> 0.
        factor = -std::expm1(n * std::log1p(-u)) / (2.0 * n * u);
    } else {
        factor = 1.0 / (2.0 * n * u);
    }
    return {-z.y * factor, z.x * factor};
}

double four_vortex_alpha(Order m, double delta, double kappa) {
    return kappa * (cutoff(m, 1.0, delta) + 0.5 * cutoff(m, 2.0, delta)) / std::numbers::pi;
}

State four_vortex_exact(double t, Order m, double delta, double kappa) {
    const double alpha = four_vortex_alpha(m, delta, kappa);
    const double radius = std::sqrt(0.5);
    std::vector<double> xs(4);
    std::vector<double> ys(4);
    for (int i = 1; i <= 4; ++i) {
        const double phi = alpha * t + i * std::numbers::pi / 2.0 - std::numbers::pi / 4.0;
        xs[i - 1] = radius * std::cos(phi);
        ys[i - 1] = radius * std::sin(phi);
    }
    return {std::move(xs), std::move(ys), t};
}

BlobSystem four_vortex_system(Order m, double delta, double kappa) {
    return BlobSystem(m, 1.0, delta, std::vector<double>(4, kappa));
}

double temporal_error(const State& numerical, const State& exact) {
    if (numerical.size() != exact.size()) throw ConfigError("temporal_error: state sizes differ");
    double acc = 0.0;
    for (std::size_t i = 0; i < numerical.size(); ++i) {
        const double dx = numerical.x[i] - exact.x[i];
        const double dy = numerical.y[i] - exact.y[i];
        acc += dx * dx + dy * dy;
    }
    return std::sqrt(acc);
}

double spatial_error(const std::function<Point(Point)>& field, int p, const QuadratureRule& rule) {
    require_exponent(p);
    const double sq = rule.integrate([&](Point z) {
        const Point a = field(z);
        const Point e = exact_velocity(z, p);
        const double du = a.x - e.x;
        const double dv = a.y - e.y;
        return du * du + dv * dv;
    });
    return std::sqrt(sq);
}

double spatial_error(const BlobSystem& system, const State& state, int p, const QuadratureRule& rule) {
    validate_state(system, state);
    return spatial_error([&](Point z) { return velocity_field(system, state, z); }, p, rule);
}

ExactIntegrals exact_conserved_integrals(int p) {
    require_exponent(p);
    using std::numbers::pi;
    const double n = p + 1.0;
    // int_0^1 (1-u)^k log u du = -H_{k+1}/(k+1)
    const double integral = -harmonic(p + 1) / n + harmonic(2 * p + 2) / (2.0 * n);
    return {
        .gamma = pi / n,
        .px = 0.0,
        .py = 0.0,
        .ell = -0.5 * pi / (n * (n + 1.0)),
        .ham = -pi / (4.0 * n) * integral,
    };
}

double DriftSeries::max_gamma() const { return max_of(gamma); }
double DriftSeries::max_px() const { return max_of(px); }
double DriftSeries::max_py() const { return max_of(py); }
double DriftSeries::max_ell() const { return max_of(ell); }
double DriftSeries::max_ham() const { return max_of(ham); }

DriftSeries drift_series(const RunRecord& record) {
    if (record.samples.empty()) throw ConfigError("drift_series: record has no samples");
    const ConservedSet& c0 = record.samples.front().psi;
    DriftSeries d;
    for (const Sample& s : record.samples) {
        d.steps.push_back(s.step);
        d.times.push_back(s.t);
        d.gamma.push_back(std::abs(s.psi.gamma - c0.gamma));
        d.px.push_back(std::abs(s.psi.px - c0.px));
        d.py.push_back(std::abs(s.psi.py - c0.py));
        d.ell.push_back(std::abs(s.psi.ell - c0.ell));
        d.ham.push_back(std::abs(s.psi.ham - c0.ham));
    }
    return d;
}

OrderFit fit_order(std::span<const std::pair<double, double>> points) {
    if (points.size() < 3) throw ConfigError("fit_order needs at least three points");
    double sx = 0.0;
    double sy = 0.0;
    for (const auto& [s, e] : points) {
        if (!(s > 0.0) || !(e > 0.0)) throw DomainError("fit_order: scales and errors must be positive");
        sx += std::log(s);
        sy += std::log(e);
    }
    const double n = static_cast<double>(points.size());
    const double mx = sx / n;
    const double my = sy / n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (const auto& [s, e] : points) {
        const double dx = std::log(s) - mx;
        const double dy = std::log(e) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw DomainError("fit_order: scales must not all be equal");
    const double slope = sxy / sxx;
    const double r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return {slope, my - slope * mx, r2};
}

}  // namespace vblob
