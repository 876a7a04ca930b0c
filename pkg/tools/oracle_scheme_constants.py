"""Standalone generator for the frozen node-polynomial constants used in tests.

Computes alpha, beta, gamma, lambda, c_r, and c_hat for the equispaced and
Gauss-Legendre node families, r = 1..6. Deliberately independent of src/, so
the hard-coded expectations in the test suite cannot inherit a bug from the
implementation under test.

Definitions, with z_1 <= ... <= z_r the nodes on [0,1] and
P(z) = prod_s (z - z_s):

    alpha  = L2 norm of P on [0,1]
    beta   = integral of P on [0,1]
    gamma  = L1 norm of P on [0,1]
    lambda = sup norm of P on [0,1]
    c_r    = sqrt(2) * (r+1/2)^(r+1/2) / r!, with an extra (1-1/r)^r factor
             when the node set contains both endpoints (r >= 2)
    c_hat  = 2^(r+5/2) * lambda * c_r

The equispaced family is handled in exact rational arithmetic (sympy); the
Gauss family uses 50-digit mpmath, which is exact up to rounding because every
quantity reduces to closed monomial sums and polynomial root finding.

Run:  python3 tools/oracle_scheme_constants.py
"""

from fractions import Fraction

import mpmath as mp
import sympy as sp

DIGITS = 30
mp.mp.dps = 50


def equispaced(r):
    if r == 1:
        return [Fraction(1, 2)]
    return [Fraction(j, r - 1) for j in range(r)]


def gauss(r):
    # roots of the Legendre polynomial on [-1,1], mapped affinely to [0,1]
    x = sp.Symbol("x")
    roots = sp.Poly(sp.legendre(r, x), x).real_roots()
    return [mp.mpf(sp.N((root + 1) / 2, mp.mp.dps)) for root in roots]


def to_mpf(value):
    if isinstance(value, Fraction):
        return mp.mpf(value.numerator) / value.denominator
    return mp.mpf(value)


def poly_coeffs(nodes):
    # ascending coefficients of prod (z - z_s) by convolution
    coeffs = [mp.mpf(1)]
    for zs in nodes:
        zs = to_mpf(zs)
        nxt = [mp.mpf(0)] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            nxt[i] += -zs * c
            nxt[i + 1] += c
        coeffs = nxt
    return coeffs


def poly_eval(coeffs, z):
    acc = mp.mpf(0)
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def antiderivative_eval(coeffs, z):
    acc = mp.mpf(0)
    for i in reversed(range(len(coeffs))):
        acc = acc * z + coeffs[i] / (i + 1)
    return acc * z


def constants_mp(r, nodes):
    coeffs = poly_coeffs(nodes)
    alpha2 = mp.mpf(0)
    for i, ci in enumerate(coeffs):
        for j, cj in enumerate(coeffs):
            alpha2 += ci * cj / (i + j + 1)
    beta = sum(c / (i + 1) for i, c in enumerate(coeffs))

    # between consecutive sign-change points (the nodes) P keeps one sign
    cuts = sorted({mp.mpf(0), mp.mpf(1), *[to_mpf(z) for z in nodes]})
    gamma = mp.mpf(0)
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        if hi > lo:
            gamma += abs(antiderivative_eval(coeffs, hi) - antiderivative_eval(coeffs, lo))

    dcoeffs = [coeffs[i] * i for i in range(1, len(coeffs))]
    candidates = [mp.mpf(0), mp.mpf(1)]
    for root in mp.polyroots(list(reversed(dcoeffs))):
        if abs(mp.im(root)) < mp.mpf(10) ** (-30):
            root = mp.re(root)
            if 0 <= root <= 1:
                candidates.append(root)
    lam = max(abs(poly_eval(coeffs, c)) for c in candidates)

    sharing = (r >= 2) and (nodes[0] == 0) and (nodes[-1] == 1)
    c_r = mp.sqrt(2) * mp.mpf(2 * r + 1) ** (mp.mpf(2 * r + 1) / 2) / (
        mp.mpf(2) ** (mp.mpf(2 * r + 1) / 2) * mp.factorial(r)
    )
    if sharing:
        c_r = c_r * (1 - mp.mpf(1) / r) ** r
    c_hat = mp.mpf(2) ** (r + mp.mpf(5) / 2) * lam * c_r

    return {
        "alpha2": alpha2,
        "alpha": mp.sqrt(alpha2),
        "beta": beta,
        "gamma": gamma,
        "lambda": lam,
        "c_r": c_r,
        "c_hat": c_hat,
        "sharing": sharing,
    }


def exact_equispaced(r):
    # independent exact recomputation of the rational constants
    z = sp.Symbol("z")
    nodes = [sp.Rational(n) for n in equispaced(r)]
    P = sp.expand(sp.prod([z - zs for zs in nodes]))
    alpha2 = sp.integrate(P * P, (z, 0, 1))
    beta = sp.integrate(P, (z, 0, 1))
    cuts = sorted(set([sp.Integer(0)] + nodes + [sp.Integer(1)]))
    gamma = sum(
        sp.Abs(sp.integrate(P, (z, lo, hi))) for lo, hi in zip(cuts[:-1], cuts[1:]) if hi > lo
    )
    return alpha2, beta, sp.nsimplify(gamma)


def main():
    for family, maker in (("equispaced", equispaced), ("gauss", gauss)):
        for r in range(1, 7):
            nodes = maker(r)
            cs = constants_mp(r, nodes)
            print(f"{family} r={r}  sharing={cs['sharing']}")
            for key in ("alpha2", "alpha", "beta", "gamma", "lambda", "c_r", "c_hat"):
                print(f"  {key:<8} {mp.nstr(cs[key], DIGITS)}")
            if family == "equispaced":
                alpha2, beta, gamma = exact_equispaced(r)
                print(f"  exact rational check: alpha2={alpha2} beta={beta} gamma={gamma}")
                assert abs(cs["alpha2"] - mp.mpf(str(sp.Rational(alpha2)))) < mp.mpf("1e-45")
                assert abs(cs["beta"] - mp.mpf(str(sp.Rational(beta)))) < mp.mpf("1e-45")
                assert abs(cs["gamma"] - mp.mpf(str(sp.Rational(gamma)))) < mp.mpf("1e-45")
            print()


if __name__ == "__main__":
    main()
