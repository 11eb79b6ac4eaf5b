"""Fit rational approximations of g(x) = x * exp(x) * E1(x) on (1, 34].

Each segment [a, b] is mapped to t in [0, 1] and g is approximated by
P(t)/Q(t) with Q(0) = 1. Coefficients come from Sanathanan-Koerner
reweighted least squares on Chebyshev nodes, minimising relative error,
carried out in 50-digit arithmetic. Prints C++ initializer lists.

Usage: python3 fit_e1.py
"""
import mpmath as mp

mp.mp.dps = 50

SEGMENTS = [(1, 4, 7, 7), (4, 12, 6, 6), (12, 34, 5, 5)]


def target(x):
    return x * mp.exp(x) * mp.e1(x)


def to_x(t, a, b):
    return a + (b - a) * t


def horner(c, s):
    acc = mp.mpf(0)
    for v in reversed(c):
        acc = acc * s + v
    return acc


def fit(a, b, n, d, nodes=400, sweeps=12):
    ss = [(1 + mp.cos(mp.pi * (k + mp.mpf(1) / 2) / nodes)) / 2 for k in range(nodes)]
    fs = [target(to_x(s, a, b)) for s in ss]
    w = [mp.mpf(1)] * nodes
    p = q = None
    for _ in range(sweeps):
        rows, rhs = [], []
        for s, f, wk in zip(ss, fs, w):
            sc = 1 / (wk * f)
            row = [sc * s**i for i in range(n + 1)]
            row += [-sc * f * s**j for j in range(1, d + 1)]
            rows.append(row)
            rhs.append(sc * f)
        A = mp.matrix(rows)
        y = mp.matrix(rhs)
        sol = mp.lu_solve(A.T * A, A.T * y)
        p = [sol[i] for i in range(n + 1)]
        q = [mp.mpf(1)] + [sol[n + j] for j in range(1, d + 1)]
        w = [horner(q, s) for s in ss]
    return p, q


def max_rel(p, q, a, b, samples=3000):
    worst = mp.mpf(0)
    for k in range(samples + 1):
        s = mp.mpf(k) / samples
        f = target(to_x(s, a, b))
        worst = max(worst, abs(horner(p, s) / horner(q, s) / f - 1))
    return worst


if __name__ == "__main__":
    for a, b, n, d in SEGMENTS:
        p, q = fit(a, b, n, d)
        err = max_rel(p, q, a, b)
        print(f"// [{a}, {b}]  degree {n}/{d}  fit error {mp.nstr(err, 3)}")
        print("P: {" + ", ".join(mp.nstr(v, 20, min_fixed=1, max_fixed=0) for v in p) + "}")
        cond = sum(abs(v) for v in p) / abs(horner(p, 1)) + sum(abs(v) for v in q) / abs(horner(q, 1))
        print(f"// conditioning at t=1: {mp.nstr(cond, 3)}")
        print("Q: {" + ", ".join(mp.nstr(v, 20, min_fixed=1, max_fixed=0) for v in q) + "}")
