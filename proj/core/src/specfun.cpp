#include "vblob/specfun.hpp"

#include <cmath>
#include <limits>
#include <span>

#include "vblob/errors.hpp"

namespace vblob {
namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

// Rational fits of g(x) = x e^x E1(x) on each segment, in the variable
// t = (x - a) / (b - a) in [0, 1]. Generated by tools/e1_fit/fit_e1.py; fit
// error below 7e-18 relative on every segment. All coefficients are positive,
// so Horner evaluation on [0, 1] is free of cancellation.
struct RationalSegment {
    double a;
    double b;
    std::span<const double> p;
    std::span<const double> q;
};

constexpr double kP1[] = {5.9634736232319407842e-1, 6.6544635384589837264,
                          3.0015250084001309161e+1, 7.0325440722113956232e+1,
                          9.1555241822199099224e+1, 6.5572861310384559108e+1,
                          2.3697968262887967203e+1, 3.3080915511134519407};
constexpr double kQ1[] = {1.0,
                          1.01893288181036557e+1,
                          4.2046418822324430319e+1,
                          9.0480247351232023982e+1,
                          1.0888104380184894102e+2,
                          7.2737172068531600395e+1,
                          2.4800651247738398299e+1,
                          3.3080924586441236508};

constexpr double kP2[] = {8.2538259960422333305e-1, 6.4874365632778765805,
                          2.0642987438438152832e+1, 3.3941959245138835208e+1,
                          3.0326071385559136982e+1, 1.3918986713733847189e+1,
                          2.5566261468852316136};
constexpr double kQ2[] = {1.0,
                          7.5523891226016917807,
                          2.3150027605445904792e+1,
                          3.6780118594132404834e+1,
                          3.1866208491403144905e+1,
                          1.4238564952999487133e+1,
                          2.5566261492656737195};

constexpr double kP3[] = {9.2791359766703076787e-1, 6.6879266790609872025,
                          1.9070582078679901295e+1, 2.6873411636305589189e+1,
                          1.8700072871991080355e+1, 5.1366483423866373865};
constexpr double kQ3[] = {1.0,
                          7.0832592795871442614,
                          1.9872317353971795813e+1,
                          2.7585447122680885637e+1,
                          1.8933556887246869911e+1,
                          5.1366483424209258657};

constexpr RationalSegment kSegments[] = {
    {kE1SeriesLimit, kE1RationalKnots[0], kP1, kQ1},
    {kE1RationalKnots[0], kE1RationalKnots[1], kP2, kQ2},
    {kE1RationalKnots[1], kE1Cutoff, kP3, kQ3},
};

double horner(std::span<const double> c, double t) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
    return acc;
}

double e1_series(double x) {
    // sum_{k>=1} (-1)^{k+1} x^k / (k k!), Neumaier-compensated: near x = 1
    // the result is ~4x smaller than the partial sums.
    double term = x;
    double sum = x;
    double carry = 0.0;
    for (int k = 2; k < 40; ++k) {
        term *= -x / k;
        const double add = term / k;
        const double next = sum + add;
        carry += std::abs(sum) >= std::abs(add) ? (sum - next) + add : (add - next) + sum;
        sum = next;
        if (std::abs(add) < 1e-18 * std::abs(sum)) break;
    }
    return ((sum - kEulerGamma) + carry) - std::log(x);
}

double e1_rational(double x) {
    for (const auto& seg : kSegments) {
        if (x <= seg.b) {
            const double t = (x - seg.a) / (seg.b - seg.a);
            return std::exp(-x) / x * (horner(seg.p, t) / horner(seg.q, t));
        }
    }
    return 0.0;
}

void require_positive(double x, const char* who) {
    if (!(x > 0.0)) throw DomainError(std::string(who) + ": argument must be positive");
}

long double reference_series(long double x) {
    constexpr long double gamma = 0.577215664901532860606512090082402431L;
    long double term = x;
    long double sum = x;
    for (int k = 2; k < 200; ++k) {
        term *= -x / k;
        const long double add = term / k;
        sum += add;
        if (std::fabs(add) < 1e-22L * std::fabs(sum)) break;
    }
    return -gamma - std::log(x) + sum;
}

long double reference_continued_fraction(long double x) {
    constexpr long double tiny = 1e-4000L;
    long double b = x + 1.0L;
    long double c = 1.0L / tiny;
    long double d = 1.0L / b;
    long double h = d;
    for (int i = 1; i < 100000; ++i) {
        const long double an = -static_cast<long double>(i) * i;
        b += 2.0L;
        d = 1.0L / (an * d + b);
        c = b + an / c;
        const long double del = c * d;
        h *= del;
        if (std::fabs(del - 1.0L) < 1e-21L) break;
    }
    return h * std::exp(-x);
}

}  // namespace

E1Regime e1_regime(double x) {
    require_positive(x, "e1_regime");
    if (x <= kE1SeriesLimit) return {E1Kind::series, 0.0, kE1SeriesLimit};
    if (x <= kE1Cutoff) return {E1Kind::rational, kE1SeriesLimit, kE1Cutoff};
    return {E1Kind::asymptotic_cutoff, kE1Cutoff, std::numeric_limits<double>::infinity()};
}

double exp_integral_e1(double x) {
    require_positive(x, "exp_integral_e1");
    if (x <= kE1SeriesLimit) return e1_series(x);
    if (x <= kE1Cutoff) return e1_rational(x);
    return 0.0;
}

double exp_integral_ein(double x) {
    if (!(x >= 0.0)) throw DomainError("exp_integral_ein: argument must be non-negative");
    if (x > 1.0) return std::log(x) + kEulerGamma + exp_integral_e1(x);
    // sum_{k>=1} (-1)^{k+1} x^k / (k k!)
    double term = x;
    double sum = x;
    for (int k = 2; k < 40; ++k) {
        term *= -x / k;
        const double add = term / k;
        sum += add;
        if (std::abs(add) <= 1e-17 * sum) break;
    }
    return sum;
}

double e1_reference(double x) {
    require_positive(x, "e1_reference");
    const long double lx = x;
    return static_cast<double>(x <= 2.0 ? reference_series(lx) : reference_continued_fraction(lx));
}

}  // namespace vblob
