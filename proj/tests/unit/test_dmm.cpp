#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <cmath>
#include <random>
#include <vector>

#include "vblob/analysis.hpp"
#include "vblob/blob_model.hpp"
#include "vblob/dmm.hpp"
#include "vblob/errors.hpp"
#include "vblob/integrators.hpp"

using namespace vblob;

namespace {

const Order kOrders[] = {Order::second, Order::fourth, Order::sixth};

// Pair potential in scaled variables, long double, boost E1.
long double potential_oracle(Order m, long double xi) {
    long double v = std::log(xi) + boost::math::expint(1, xi);
    if (m == Order::fourth) v -= std::exp(-xi);
    if (m == Order::sixth) v += (0.5L * xi - 1.5L) * std::exp(-xi);
    return v;
}

// C^tau is xi_k times the divided difference of the potential.
double ctau_oracle(Order m, double a, double b) {
    const long double la = a, lb = b;
    return static_cast<double>(la * (potential_oracle(m, lb) - potential_oracle(m, la)) / (lb - la));
}

GridSetup random_setup(Order m, std::size_t n, std::mt19937_64& rng, double spread = 1.0) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> k(n), x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        k[i] = u(rng);
        x[i] = spread * u(rng);
        y[i] = spread * u(rng);
    }
    return {BlobSystem(m, 1.0, 1.0, k), State(x, y)};
}

double max_abs_diff(const State& a, const State& b) {
    double e = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        e = std::max({e, std::abs(a.x[i] - b.x[i]), std::abs(a.y[i] - b.y[i])});
    return e;
}

}  // namespace

TEST(CTau, ClosedFormMatchesDividedDifference) {
    for (Order m : kOrders)
        for (double a : {0.01, 0.3, 1.0, 4.0, 15.0})
            for (double z : {0.2, 0.9, 0.99, 1.01, 1.5, 3.0, 40.0}) {
                const double got = c_tau(m, a, a * z);
                const double ref = ctau_oracle(m, a, a * z);
                EXPECT_NEAR(got, ref, 1e-13 * std::max(1.0, std::abs(ref)))
                    << "m=" << to_int(m) << " xi=" << a << " z=" << z;
            }
}

TEST(CTau, AccurateForCloselySpacedBlobs) {
    // C^tau = xi_k int_0^1 C(xi_s)/xi_s ds along xi_s = xi_k + s (xi_k1 - xi_k).
    for (Order m : kOrders)
        for (double a : {1e-3, 1e-2, 0.1, 0.45})
            for (double d : {-0.3, -1e-2, -1e-3, 2e-4, 1e-3, 1e-2, 0.3}) {
                const double b = a * (1 + d);
                const double ref = a * boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
                                           [&](double s) {
                                               const double x = a + s * (b - a);
                                               return cutoff_over_r2(m, x, 1.0);
                                           },
                                           0.0, 1.0, 0, 0.0);
                EXPECT_LE(std::abs(c_tau(m, a, b) - ref), 2e-15 / std::abs(d) * ref)
                    << "m=" << to_int(m) << " xi=" << a << " d=" << d;
            }
}

TEST(CTau, ReducesToCutoffAtEqualLevels) {
    for (Order m : kOrders)
        for (double xi : {1e-6, 0.02, 0.7, 3.0, 20.0, 60.0})
            EXPECT_NEAR(c_tau(m, xi, xi), cutoff(m, xi, 1.0), 2e-16) << "m=" << to_int(m) << " xi=" << xi;
}

TEST(CTau, SymmetricInItsLevelsAfterRescaling) {
    // xi_k1 C^tau(xi_k, xi_k1) / xi_k is C^tau(xi_k1, xi_k).
    for (Order m : kOrders)
        for (double a : {0.2, 1.0, 5.0})
            for (double b : {0.1, 0.5, 2.5, 8.0}) {
                if (a == b) continue;
                EXPECT_NEAR(c_tau(m, a, b) / a, c_tau(m, b, a) / b, 1e-14 / std::min(a, b));
            }
}

TEST(CTau, FarFieldBranchIsPointVortexLog) {
    for (Order m : kOrders) {
        EXPECT_EQ(c_tau(m, 60.0, 90.0), std::log1p(0.5) / 0.5);
        EXPECT_NEAR(c_tau(m, 60.0, 60.0 * (1 + 1e-6)), 1.0 - 0.5e-6 + 1e-12 / 3, 1e-15);
        EXPECT_NEAR(c_tau(m, 60.0, 90.0), ctau_oracle(m, 60.0, 90.0), 1e-15);
    }
}

TEST(CTau, TaylorBranchUsedInsideSwitch) {
    CTauParams p;
    const double a = 1.0, b = 1.0 + 0.5e-4;
    for (Order m : kOrders) EXPECT_EQ(c_tau(m, a, b, p), c_tau_taylor(m, a, b, 3));
    p.taylor_terms = 1;
    EXPECT_EQ(c_tau(Order::fourth, a, b, p), c_tau_taylor(Order::fourth, a, b, 1));
    EXPECT_EQ(c_tau(Order::fourth, 1.0, 1.5, p), c_tau_closed(Order::fourth, 1.0, 1.5));
}

TEST(CTau, TaylorTruncationHasThirdOrderSlope) {
    for (Order m : kOrders) {
        std::vector<std::pair<double, double>> pts;
        for (int k = 0; k <= 20; ++k) {
            const double d = std::pow(10.0, -3.0 + 2.0 * k / 20.0);
            pts.emplace_back(d, std::abs(c_tau_closed(m, 1.0, 1.0 + d) - c_tau_taylor(m, 1.0, 1.0 + d, 3)));
        }
        EXPECT_NEAR(fit_order(pts).slope, 3.0, 0.2) << "m=" << to_int(m);
    }
}

TEST(CTau, TaylorTermCountSetsOrder) {
    const double d1 = 1e-2, d2 = 5e-3;
    for (int terms = 1; terms <= 3; ++terms) {
        const double e1 = std::abs(ctau_oracle(Order::sixth, 1.0, 1.0 + d1) - c_tau_taylor(Order::sixth, 1.0, 1.0 + d1, terms));
        const double e2 = std::abs(ctau_oracle(Order::sixth, 1.0, 1.0 + d2) - c_tau_taylor(Order::sixth, 1.0, 1.0 + d2, terms));
        EXPECT_NEAR(std::log2(e1 / e2), terms, 0.15) << "terms=" << terms;
    }
}

TEST(CTau, ClosedFormDegradesNearOne) {
    for (Order m : kOrders) {
        auto worst = [&](double lo) {
            double w = 0.0;
            for (int k = 0; k < 50; ++k) {
                const double d = lo * (1.0 + 9.0 * k / 50.0);
                w = std::max(w, std::abs(c_tau_closed(m, 1.0, 1.0 + d) - c_tau_taylor(m, 1.0, 1.0 + d)));
            }
            return w;
        };
        EXPECT_GT(worst(1e-8), worst(1e-6));
        EXPECT_GT(worst(1e-6), worst(1e-4));
        EXPECT_GT(worst(1e-7), 1e-11);
    }
}

TEST(CTau, Errors) {
    EXPECT_THROW(c_tau(Order::second, 0.0, 1.0), DomainError);
    EXPECT_THROW(c_tau(Order::second, 1.0, -1.0), DomainError);
    EXPECT_THROW(c_tau_closed(Order::second, 1.0, 1.0), DomainError);
    EXPECT_THROW(c_tau_taylor(Order::second, 1.0, 1.1, 4), ConfigError);
    EXPECT_THROW((CTauParams{0.0, 3}.validate()), ConfigError);
    EXPECT_THROW((CTauParams{1e-4, 0}.validate()), ConfigError);
    SolverConfig s;
    s.tol = 0.0;
    EXPECT_THROW(s.validate(), ConfigError);
    s = {};
    s.max_iters = 0;
    EXPECT_THROW(s.validate(), ConfigError);
    s = {};
    s.damping = 1.5;
    EXPECT_THROW(s.validate(), ConfigError);
}

TEST(DmmRhs, MatchesContinuousRhsAtEqualLevels) {
    std::mt19937_64 rng(3);
    for (Order m : kOrders) {
        auto g = random_setup(m, 10, rng);
        const auto a = dmm_rhs(g.system, g.state, g.state);
        const auto b = rhs(g.system, g.state);
        for (std::size_t i = 0; i < 10; ++i) {
            EXPECT_NEAR(a.u[i], b.u[i], 1e-14);
            EXPECT_NEAR(a.v[i], b.v[i], 1e-14);
        }
    }
}

TEST(DmmRhs, ParallelAgreesWithSequential) {
    std::mt19937_64 rng(4);
    auto g = random_setup(Order::fourth, 120, rng);
    State cand = g.state;
    for (auto& x : cand.x) x += 0.01;
    const auto a = dmm_rhs(g.system, g.state, cand, {}, Summation::sequential);
    const auto b = dmm_rhs(g.system, g.state, cand, {}, Summation::parallel);
    for (std::size_t i = 0; i < 120; ++i) {
        EXPECT_NEAR(a.u[i], b.u[i], 1e-13);
        EXPECT_NEAR(a.v[i], b.v[i], 1e-13);
    }
}

TEST(DmmRhs, DegeneratePairsThrow) {
    BlobSystem sys(Order::second, 1.0, 1.0, {1.0, 1.0});
    State a({0.0, 1.0}, {0.0, 0.0});
    State b({0.5, 0.5}, {0.0, 0.0});
    EXPECT_THROW(dmm_rhs(sys, a, b), PairDegeneracyError);
    EXPECT_THROW(dmm_rhs(sys, b, a), PairDegeneracyError);
    BlobSystem zero(Order::second, 1.0, 1.0, {0.0, 0.0});
    EXPECT_NO_THROW(dmm_rhs(zero, a, b));
}

TEST(Multipliers, DiscreteResidualsVanishOnRandomPairs) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> jitter(-1.0, 1.0);
    for (int trial = 0; trial < 60; ++trial) {
        const Order m = kOrders[trial % 3];
        auto g = random_setup(m, 5, rng);
        State cand = g.state;
        // Half the trials move by O(1e-6) so every pair lands in the Taylor branch.
        const double scale = trial % 2 ? 1e-6 : 0.3;
        for (std::size_t i = 0; i < 5; ++i) {
            cand.x[i] += scale * jitter(rng);
            cand.y[i] += scale * jitter(rng);
        }
        const auto [r1, r2] = discrete_multiplier_residuals(g.system, g.state, cand, 0.5);
        EXPECT_LE(r1, 1e-11) << "trial " << trial;
        EXPECT_LE(r2, 1e-11) << "trial " << trial;
    }
}

TEST(Multipliers, ContinuousMatrixAnnihilatesRhs) {
    std::mt19937_64 rng(5);
    for (Order m : kOrders) {
        auto g = random_setup(m, 7, rng);
        const auto v = rhs(g.system, g.state);
        for (double r : multiplier_matrix(g.system, g.state).apply(v.u, v.v)) EXPECT_NEAR(r, 0.0, 1e-14);
    }
}

TEST(Multipliers, ContinuousMatrixIsGradientOfInvariants) {
    std::mt19937_64 rng(6);
    auto g = random_setup(Order::fourth, 4, rng);
    const auto lam = multiplier_matrix(g.system, g.state);
    // Lambda applied to a direction equals the directional derivative of psi.
    std::vector<double> dx = {0.3, -0.1, 0.2, 0.5}, dy = {-0.4, 0.1, 0.0, 0.2};
    const double eps = 1e-6;
    State plus = g.state, minus = g.state;
    for (std::size_t i = 0; i < 4; ++i) {
        plus.x[i] += eps * dx[i];
        plus.y[i] += eps * dy[i];
        minus.x[i] -= eps * dx[i];
        minus.y[i] -= eps * dy[i];
    }
    const auto pp = psi_vector(conserved(g.system, plus));
    const auto pm = psi_vector(conserved(g.system, minus));
    const auto applied = lam.apply(dx, dy);
    for (int r = 0; r < 4; ++r) EXPECT_NEAR(applied[r], (pp[r] - pm[r]) / (2 * eps), 1e-8);
}

TEST(DmmStep, ConservesAllInvariantsToRoundoff) {
    std::mt19937_64 rng(8);
    for (Order m : kOrders) {
        auto g = random_setup(m, 6, rng);
        const auto c0 = conserved(g.system, g.state);
        State s = g.state;
        for (int k = 0; k < 20; ++k) s = dmm_step(g.system, s, 0.5).next;
        const auto c1 = conserved(g.system, s);
        EXPECT_NEAR(c1.px, c0.px, 1e-13);
        EXPECT_NEAR(c1.py, c0.py, 1e-13);
        EXPECT_NEAR(c1.ell, c0.ell, 1e-12);
        EXPECT_NEAR(c1.ham, c0.ham, 1e-12);
        EXPECT_DOUBLE_EQ(s.t, 10.0);
    }
}

TEST(DmmStep, SatisfiesItsOwnEquation) {
    std::mt19937_64 rng(10);
    auto g = random_setup(Order::sixth, 5, rng);
    SolverConfig sc;
    sc.tol = 1e-14;
    const auto out = dmm_step(g.system, g.state, 0.25, {}, sc);
    const auto f = dmm_residual(g.system, g.state, out.next, 0.25);
    for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_NEAR(f.u[i], 0.0, 1e-12);
        EXPECT_NEAR(f.v[i], 0.0, 1e-12);
    }
    EXPECT_LE(out.residual, 1e-14);
    EXPECT_GE(out.iterations, 1);
}

TEST(DmmStep, IsSymmetric) {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 10; ++trial) {
        auto g = random_setup(kOrders[trial % 3], 4, rng);
        SolverConfig sc;
        const State fwd = dmm_step(g.system, g.state, 0.7, {}, sc).next;
        const State back = dmm_step(g.system, fwd, -0.7, {}, sc).next;
        EXPECT_LE(max_abs_diff(back, g.state), 10 * sc.tol);
        EXPECT_NEAR(back.t, 0.0, 1e-15);
    }
}

TEST(DmmStep, SecondOrderInTime) {
    const BlobSystem sys = four_vortex_system(Order::fourth, 1.0, 1.0);
    const State s0 = four_vortex_exact(0.0, Order::fourth, 1.0, 1.0);
    std::vector<std::pair<double, double>> pts;
    for (double tau : {0.1, 0.05, 0.025}) {
        State s = s0;
        const int n = static_cast<int>(std::lround(1.0 / tau));
        for (int k = 0; k < n; ++k) s = dmm_step(sys, s, tau).next;
        pts.emplace_back(tau, temporal_error(s, four_vortex_exact(1.0, Order::fourth, 1.0, 1.0)));
    }
    EXPECT_NEAR(fit_order(pts).slope, 2.0, 0.1);
}

TEST(DmmStep, FailureCarriesLastIterate) {
    std::mt19937_64 rng(14);
    auto g = random_setup(Order::second, 4, rng);
    SolverConfig sc;
    sc.max_iters = 1;
    try {
        dmm_step(g.system, g.state, 1.0, {}, sc);
        FAIL() << "expected SolverFailure";
    } catch (const SolverFailure& e) {
        EXPECT_EQ(e.iterations(), 1);
        EXPECT_EQ(e.last_x().size(), 4u);
        EXPECT_GT(e.residual(), sc.tol);
        EXPECT_FALSE(e.step().has_value());
        EXPECT_EQ(e.at_step(7).step(), 7u);
    }
}

TEST(DmmStep, DampingStillConverges) {
    std::mt19937_64 rng(15);
    auto g = random_setup(Order::fourth, 4, rng);
    SolverConfig plain, damped;
    damped.damping = 0.7;
    const auto a = dmm_step(g.system, g.state, 0.5, {}, plain);
    const auto b = dmm_step(g.system, g.state, 0.5, {}, damped);
    EXPECT_LE(max_abs_diff(a.next, b.next), 1e-12);
    EXPECT_GT(b.iterations, a.iterations);
}
