"""Standalone high-precision generator for the frozen two-level partition
inflation constants used in tests.

For a scheme with constants alpha, beta the inflation factor is the maximum
over t in [0,1] of

    g(t) = sqrt(ka^2 (t R^2 + 1 - t) - kb^2 (t R + 1 - t)^2)
           / (t R^(1/(r+1)) + 1 - t)^(r+1)

with R = 2^(r+1), ka = alpha / sqrt(alpha^2 - beta^2), and
kb = beta / sqrt(alpha^2 - beta^2). Note g(0) = 1, so the maximum is >= 1.

Maximization: dense grid scan followed by golden-section refinement, all in
40-digit arithmetic. Independent of src/.

Run:  python3 tools/oracle_kstar.py
"""

import os
import sys

import mpmath as mp

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from oracle_scheme_constants import constants_mp, equispaced, gauss  # noqa: E402

mp.mp.dps = 40


def profile_value(r, alpha2, beta, t):
    R = mp.mpf(2) ** (r + 1)
    vr2 = alpha2 - beta * beta
    ka2 = alpha2 / vr2
    kb2 = beta * beta / vr2
    inner = ka2 * (t * R * R + 1 - t) - kb2 * (t * R + 1 - t) ** 2
    if inner < 0:
        inner = mp.mpf(0)
    return mp.sqrt(inner) / (t * R ** (mp.mpf(1) / (r + 1)) + 1 - t) ** (r + 1)


def golden_max(fun, lo, hi, iterations=200):
    phi = (mp.sqrt(5) - 1) / 2
    a, b = mp.mpf(lo), mp.mpf(hi)
    c = b - phi * (b - a)
    d = a + phi * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(iterations):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = fun(d)
    t = (a + b) / 2
    return t, fun(t)


def kstar(r, alpha2, beta):
    fun = lambda t: profile_value(r, alpha2, beta, t)
    grid = [mp.mpf(i) / 4096 for i in range(4097)]
    best_i = max(range(len(grid)), key=lambda i: fun(grid[i]))
    lo = grid[max(best_i - 1, 0)]
    hi = grid[min(best_i + 1, len(grid) - 1)]
    t, value = golden_max(fun, lo, hi)
    value = max(value, mp.mpf(1))
    return t, value


def main():
    for family, maker in (("equispaced", equispaced), ("gauss", gauss)):
        for r in range(2, 7):
            cs = constants_mp(r, maker(r))
            beta = cs["beta"]
            if abs(beta) < mp.mpf("1e-40"):
                beta = mp.mpf(0)
            t, value = kstar(r, cs["alpha2"], beta)
            print(f"{family} r={r}  kstar={mp.nstr(value, 20)}  argmax_t={mp.nstr(t, 12)}")


if __name__ == "__main__":
    main()
