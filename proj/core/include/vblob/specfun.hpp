#pragma once

#include <array>

namespace vblob {

/// Which evaluation path exp_integral_e1 takes for a given argument.
enum class E1Kind { series, rational, asymptotic_cutoff };

struct E1Regime {
    E1Kind kind;
    double lower;  ///< exclusive lower bound of the regime
    double upper;  ///< inclusive upper bound (infinity for the cutoff regime)
};

/// Regime boundaries: series on (0, 1], rational fits on (1, 34], zero beyond 34.
inline constexpr double kE1SeriesLimit = 1.0;
inline constexpr double kE1Cutoff = 34.0;

/// Interior knots of the rational segments on (kE1SeriesLimit, kE1Cutoff].
inline constexpr std::array<double, 2> kE1RationalKnots = {4.0, 12.0};

E1Regime e1_regime(double x);

/// Exponential integral E1(x) for x > 0.
///
/// Relative error stays below 5e-15 on (1e-16, 34]; for x > 34 the function
/// returns exactly zero since E1 is below 1e-16 there. Throws DomainError
/// for x <= 0 or NaN.
double exp_integral_e1(double x);

/// Ein(x) = int_0^x (1 - e^{-t})/t dt = log x + gamma + E1(x), for x >= 0.
/// Power series on [0, 1], so Ein(x2) - Ein(x1) keeps full relative accuracy
/// for small arguments where log and E1 cancel.
double exp_integral_ein(double x);

/// Independent high-accuracy E1 used to audit exp_integral_e1: power series
/// for x <= 2 and a modified-Lentz continued fraction above, both in long
/// double. Unlike exp_integral_e1 it does not truncate at 34.
double e1_reference(double x);

}  // namespace vblob
