"""Standalone generator for the frozen reference integrals, derivative
moments, and error-law constants used in tests. Independent of src/.

Covers the built-in benchmark problems:

    logsing(d): f(x) = 1/(x+d) on [0,1]
    cos100:     f(x) = cos(100x/(x+1e-4)) on [0,1]
    exp:        f(x) = e^x on [0,1]

For a scheme with constants (alpha, beta, c_r) and derivative order r, the
error-law constants on [0,1] are

    C1 = c_r * sqrt(alpha^2 * int |f^(r)|^2 - beta^2 * (int f^(r))^2)
    C2 = c_r * sqrt(alpha^2 - beta^2) * (int |f^(r)|^(1/(r+1)))^(r+1)
    C3 = kstar * C2

Every closed-form moment is cross-checked against direct 30-digit quadrature
at a benign parameter value before being evaluated at the extreme ones, and
the oscillatory reference integral is computed by two unrelated routes that
must agree.

Run:  python3 tools/oracle_reference_integrals.py
"""

import os
import sys

import mpmath as mp

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from oracle_scheme_constants import constants_mp, equispaced  # noqa: E402
from oracle_kstar import kstar  # noqa: E402

mp.mp.dps = 30


# ---------------------------------------------------------------- logsing

def logsing_deriv(r, d, x):
    # d^r/dx^r of 1/(x+d)
    return (-1) ** r * mp.factorial(r) / (x + d) ** (r + 1)


def logsing_moments_closed(r, d):
    d = mp.mpf(d)
    sq = mp.factorial(r) ** 2 / (2 * r + 1) * (d ** (-(2 * r + 1)) - (1 + d) ** (-(2 * r + 1)))
    mean = (-1) ** r * mp.factorial(r - 1) * (d ** (-r) - (1 + d) ** (-r))
    frac = mp.factorial(r) ** (mp.mpf(1) / (r + 1)) * mp.log((1 + d) / d)
    return sq, mean, frac


def check_logsing_moments():
    r, d = 3, mp.mpf("0.37")
    sq, mean, frac = logsing_moments_closed(r, d)
    sq_q = mp.quad(lambda x: logsing_deriv(r, d, x) ** 2, [0, 1])
    mean_q = mp.quad(lambda x: logsing_deriv(r, d, x), [0, 1])
    frac_q = mp.quad(lambda x: abs(logsing_deriv(r, d, x)) ** (mp.mpf(1) / (r + 1)), [0, 1])
    assert abs(sq - sq_q) < abs(sq) * mp.mpf("1e-25"), (sq, sq_q)
    assert abs(mean - mean_q) < abs(mean) * mp.mpf("1e-25"), (mean, mean_q)
    assert abs(frac - frac_q) < abs(frac) * mp.mpf("1e-25"), (frac, frac_q)


# ---------------------------------------------------------------- exp

def exp_moments(r):
    sq = (mp.e ** 2 - 1) / 2
    mean = mp.e - 1
    frac = (r + 1) * (mp.exp(mp.mpf(1) / (r + 1)) - 1)
    return sq, mean, frac


def check_exp_moments():
    r = 2
    sq, mean, frac = exp_moments(r)
    assert abs(sq - mp.quad(lambda x: mp.exp(2 * x), [0, 1])) < mp.mpf("1e-25")
    assert abs(mean - mp.quad(mp.exp, [0, 1])) < mp.mpf("1e-25")
    frac_q = mp.quad(lambda x: mp.exp(x / (r + 1)), [0, 1])
    assert abs(frac - frac_q) < mp.mpf("1e-25")


# ---------------------------------------------------------------- cos100

def cos100_direct(d=mp.mpf("1e-4")):
    # direct quadrature with breakpoints graded toward the oscillation pileup
    # at the left endpoint
    f = lambda x: mp.cos(100 * x / (x + d))
    points = [mp.mpf(0)]
    points += [mp.mpf(10) ** e for e in mp.linspace(-8, 0, 129)]
    return mp.quad(f, points)


def cos100_phase(d=mp.mpf("1e-4")):
    # substitute u = 100x/(x+d): x = d u/(100-u), dx = 100 d/(100-u)^2 du,
    # turning the compressed oscillations into unit-frequency ones
    u_end = 100 / (1 + d)
    g = lambda u: mp.cos(u) * 100 * d / (100 - u) ** 2
    points = [k * mp.pi for k in range(32)]
    points = [p for p in points if p < u_end] + [u_end]
    return mp.quad(g, points)


# ---------------------------------------------------------------- report

def thm_constants(r, alpha2, beta, c_r, sq, mean, frac, ks):
    inner = alpha2 * sq - beta * beta * mean * mean
    c1 = c_r * mp.sqrt(inner)
    c2 = c_r * mp.sqrt(alpha2 - beta * beta) * frac ** (r + 1)
    return c1, c2, ks * c2


def main():
    check_logsing_moments()
    check_exp_moments()
    print("closed-form moment cross-checks passed (r=3, d=0.37 and exp)")
    print()

    direct = cos100_direct()
    phase = cos100_phase()
    assert abs(direct - phase) < mp.mpf("1e-20"), (direct, phase)
    print(f"cos100 reference       {mp.nstr(direct, 25)}")
    print(f"cos100 route agreement {mp.nstr(abs(direct - phase), 3)}")
    print()

    for r in (2, 4):
        cs = constants_mp(r, equispaced(r))
        _, ks = kstar(r, cs["alpha2"], cs["beta"])
        print(f"equispaced r={r}: c_r={mp.nstr(cs['c_r'], 20)} kstar={mp.nstr(ks, 20)}")

        sq, mean, frac = exp_moments(r)
        c1, c2, c3 = thm_constants(r, cs["alpha2"], cs["beta"], cs["c_r"], sq, mean, frac, ks)
        print(f"  exp: thm1={mp.nstr(c1, 20)} thm2={mp.nstr(c2, 20)} thm3={mp.nstr(c3, 20)}")

        for d in ("1e-4", "1e-8"):
            sq, mean, frac = logsing_moments_closed(r, mp.mpf(d))
            c1, c2, c3 = thm_constants(r, cs["alpha2"], cs["beta"], cs["c_r"], sq, mean, frac, ks)
            print(
                f"  logsing(d={d}): thm1={mp.nstr(c1, 20)} thm2={mp.nstr(c2, 20)} "
                f"thm3={mp.nstr(c3, 20)} ratio12={mp.nstr(c1 / c2, 20)}"
            )
        print()

    # large-m limit of the summed-priority functional for logsing, r=2:
    # (int |f''/2!|^(1/3) dx)^3 = log((1+d)/d)^3
    for d in ("1e-4", "1e-8"):
        lim = mp.log((1 + mp.mpf(d)) / mp.mpf(d)) ** 3
        print(f"logsing(d={d}) r=2 priority-sum limit {mp.nstr(lim, 20)}")


if __name__ == "__main__":
    main()
