"""Interpolation schemes on the unit cell.

A scheme of order r is a set of nodes 0 <= z_1 < ... < z_r <= 1 used to build
piecewise Lagrange interpolants of degree r - 1 on the cells of a partition.
All first-order behaviour of the resulting variance-reduced estimators is
controlled by a handful of norms of the nodal polynomial

    P(z) = (z - z_1) * ... * (z - z_r),

namely its L2, L1 and sup norms on [0, 1] and its mean.  Those constants are
computed here once per scheme, exactly where possible (rational arithmetic on
the expanded coefficients), and cached on the scheme object together with the
quadrature weights of the interpolant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

__all__ = [
    "InterpolationScheme",
    "make_scheme",
    "equispaced_nodes",
    "gauss_nodes",
    "divided_difference",
    "residual_eval",
    "interpolant_integral",
]


@dataclass(frozen=True)
class InterpolationScheme:
    """Nodes of one cell plus every derived constant the estimators need.

    Attributes
    ----------
    r : polynomial order (number of nodes per cell, degree r - 1).
    nodes : node positions in [0, 1], strictly increasing.
    alpha : L2 norm of the nodal polynomial P on [0, 1].
    beta : mean of P on [0, 1] (signed).
    gamma : L1 norm of P on [0, 1].
    lam : sup norm of P on [0, 1].
    c_r : leading constant of the N**-(r + 1/2) error asymptote.
    endpoint_sharing : True when z_1 = 0 and z_r = 1, so adjacent cells
        share one function value and the cost of m cells is (r-1)m + 1.
    quad_weights : weights w_s with integral of the cell interpolant equal
        to h * sum_s w_s * f(x_s); they sum to one exactly.
    bary_weights : barycentric weights for stable interpolant evaluation.
    alpha2 : alpha squared (kept separately; it is exact in floating point
        more often than alpha itself).
    nodes_exact : the nodes as exact rationals, used for cache keying.
    """

    r: int
    nodes: tuple[float, ...]
    alpha: float
    beta: float
    gamma: float
    lam: float
    c_r: float
    endpoint_sharing: bool
    quad_weights: tuple[float, ...]
    bary_weights: tuple[float, ...]
    alpha2: float
    nodes_exact: tuple[Fraction, ...]

    @property
    def vr_factor(self) -> float:
        """sqrt(alpha^2 - beta^2), the variance-reduction constant."""
        return math.sqrt(self.alpha2 - self.beta * self.beta)

    def cost_of(self, m: int, n: int) -> int:
        """Function evaluations charged for m cells and n samples."""
        if self.endpoint_sharing:
            return (self.r - 1) * m + 1 + n
        return self.r * m + n


def equispaced_nodes(r: int) -> tuple[Fraction, ...]:
    """Equispaced nodes; endpoints included for r >= 2, midpoint for r = 1."""
    if r == 1:
        return (Fraction(1, 2),)
    return tuple(Fraction(j, r - 1) for j in range(r))


def gauss_nodes(r: int) -> tuple[float, ...]:
    """Legendre nodes mapped to (0, 1); their nodal polynomial has zero mean."""
    x, _ = np.polynomial.legendre.leggauss(r)
    return tuple(float(0.5 * (xi + 1.0)) for xi in np.sort(x))


def _poly_mul(p: list[Fraction], q: list[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def _poly_eval(coeffs: Sequence[Fraction], z: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * z + c
    return acc


def _poly_integral(coeffs: Sequence[Fraction], lo: Fraction, hi: Fraction) -> Fraction:
    # antiderivative evaluated at both ends, exactly
    acc = Fraction(0)
    for k, c in enumerate(coeffs):
        acc += c * (hi ** (k + 1) - lo ** (k + 1)) / (k + 1)
    return acc


def _float_poly_eval(coeffs: np.ndarray, z: float) -> float:
    acc = 0.0
    for c in coeffs[::-1]:
        acc = acc * z + c
    return acc


def _sup_norm(nodes: list[Fraction], coeffs: list[Fraction]) -> float:
    """Max of |P| over [0, 1].

    P' has exactly one root strictly between consecutive nodes and no other
    real roots, so the candidates are those bracketed roots plus whichever of
    0 and 1 lies outside the node span.
    """
    cf = np.array([float(c) for c in coeffs])
    dcf = cf[1:] * np.arange(1, len(cf))

    def dp(z: float) -> float:
        return _float_poly_eval(dcf, z)

    candidates = [0.0, 1.0]
    zf = [float(z) for z in nodes]
    for a, b in zip(zf[:-1], zf[1:]):
        da, db = dp(a), dp(b)
        if da == 0.0:
            candidates.append(a)
        elif db == 0.0:
            candidates.append(b)
        elif da * db < 0.0:
            candidates.append(brentq(dp, a, b, xtol=1e-15, rtol=8.9e-16))
    return max(abs(_float_poly_eval(cf, z)) for z in candidates)


def _asymptote_constant(r: int, endpoint_sharing: bool) -> float:
    base = math.sqrt(2.0) * (r + 0.5) ** (r + 0.5) / math.factorial(r)
    if endpoint_sharing and r >= 2:
        base *= (1.0 - 1.0 / r) ** r
    return base


def make_scheme(r: int, nodes: Sequence | None = None) -> InterpolationScheme:
    """Build an interpolation scheme and its exact constants.

    Parameters
    ----------
    r : order, a positive integer.  r = 1 gives piecewise-constant control.
    nodes : r node positions in [0, 1], strictly increasing.  Defaults to
        the equispaced family.  Floats are converted to exact rationals, so
        every constant below is computed without rounding except the final
        cast and the sup norm.
    """
    if not isinstance(r, int) or r < 1:
        raise ValueError("order r must be a positive integer")
    if nodes is None:
        nodes = equispaced_nodes(r)
    zs = [Fraction(z) for z in nodes]
    if len(zs) != r:
        raise ValueError(f"expected {r} nodes, got {len(zs)}")
    for z in zs:
        if z < 0 or z > 1:
            raise ValueError("nodes must lie in [0, 1]")
    for a, b in zip(zs[:-1], zs[1:]):
        if b <= a:
            raise ValueError("nodes must be strictly increasing")

    # expand P(z) = prod (z - z_s) into exact monomial coefficients
    pcoef = [Fraction(1)]
    for z in zs:
        pcoef = _poly_mul(pcoef, [-z, Fraction(1)])

    beta_exact = _poly_integral(pcoef, Fraction(0), Fraction(1))
    alpha2_exact = _poly_integral(_poly_mul(pcoef, pcoef), Fraction(0), Fraction(1))

    # P is single-signed between consecutive roots, so the L1 norm is the
    # sum of |integral| over the segments cut by the nodes
    cuts = [Fraction(0)] + [z for z in zs if 0 < z < 1] + [Fraction(1)]
    gamma_exact = sum(
        abs(_poly_integral(pcoef, lo, hi)) for lo, hi in zip(cuts[:-1], cuts[1:])
    )

    lam = _sup_norm(zs, pcoef)

    endpoint_sharing = zs[0] == 0 and zs[-1] == 1

    # quadrature and barycentric weights of the Lagrange basis
    quad_w: list[Fraction] = []
    bary_w: list[Fraction] = []
    for s, z in enumerate(zs):
        num = [Fraction(1)]
        den = Fraction(1)
        for t, zt in enumerate(zs):
            if t == s:
                continue
            num = _poly_mul(num, [-zt, Fraction(1)])
            den *= z - zt
        quad_w.append(_poly_integral(num, Fraction(0), Fraction(1)) / den)
        bary_w.append(1 / den)
    assert sum(quad_w) == 1

    alpha2 = float(alpha2_exact)
    beta = float(beta_exact)
    gamma = float(gamma_exact)
    assert gamma_exact * gamma_exact <= alpha2_exact  # Cauchy-Schwarz
    assert abs(beta_exact) <= gamma_exact
    assert beta_exact * beta_exact < alpha2_exact
    assert alpha2 <= lam * lam * (1.0 + 1e-12)

    return InterpolationScheme(
        r=r,
        nodes=tuple(float(z) for z in zs),
        alpha=math.sqrt(alpha2),
        beta=beta,
        gamma=gamma,
        lam=lam,
        c_r=_asymptote_constant(r, endpoint_sharing),
        endpoint_sharing=endpoint_sharing,
        quad_weights=tuple(float(w) for w in quad_w),
        bary_weights=tuple(float(w) for w in bary_w),
        alpha2=alpha2,
        nodes_exact=tuple(zs),
    )


def divided_difference(f: Callable, points: Sequence[float]) -> float:
    """Newton divided difference of f over distinct points.

    The table is built in place; the result is symmetric in the points up to
    floating-point roundoff.  For r + 1 points it estimates f^(r) / r! on
    their span.
    """
    pts = [float(p) for p in points]
    if len(pts) < 1:
        raise ValueError("need at least one point")
    if len(set(pts)) != len(pts):
        raise ValueError("points must be pairwise distinct")
    vals = np.asarray(f(np.asarray(pts, dtype=float)), dtype=float)
    return dd_from_values(pts, [float(v) for v in vals])


def dd_from_values(points: Sequence[float], values: Sequence[float]) -> float:
    """Divided difference from precomputed function values."""
    n = len(points)
    if len(values) != n:
        raise ValueError("points and values must have equal length")
    coef = list(values)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (points[i] - points[i - j])
    return coef[-1]


def _mapped_nodes(scheme: InterpolationScheme, left: float, h: float) -> np.ndarray:
    return left + h * np.asarray(scheme.nodes)


def residual_eval(
    scheme: InterpolationScheme,
    interval: tuple[float, float],
    f: Callable,
    x,
):
    """f(x) minus the cell interpolant of f at x, evaluated stably.

    Uses the second barycentric form on the normalized coordinate; a query
    that coincides with a node returns exactly zero instead of dividing by
    zero.  x may be a scalar or an array; the return matches.
    """
    left, right = interval
    h = right - left
    if not h > 0:
        raise ValueError("interval must have positive width")
    xa = np.asarray(x, dtype=float)
    scalar = xa.ndim == 0
    xs = np.atleast_1d(xa)
    z = (xs - left) / h
    node_x = _mapped_nodes(scheme, left, h)
    fvals = np.asarray(f(node_x), dtype=float)
    fx = np.asarray(f(xs), dtype=float)
    dz = z[:, None] - np.asarray(scheme.nodes)[None, :]
    hit = (dz == 0.0).any(axis=1)
    w = np.asarray(scheme.bary_weights)[None, :] / np.where(dz == 0.0, 1.0, dz)
    den = np.where(hit, 1.0, w.sum(axis=1))
    res = fx - (w * fvals[None, :]).sum(axis=1) / den
    res[hit] = 0.0
    return float(res[0]) if scalar else res


def interpolant_integral(
    scheme: InterpolationScheme,
    interval: tuple[float, float],
    f_values: Sequence[float],
) -> float:
    """Integral over the cell of the interpolant through the node values."""
    left, right = interval
    h = right - left
    if not h > 0:
        raise ValueError("interval must have positive width")
    if len(f_values) != scheme.r:
        raise ValueError("need one value per node")
    return h * math.fsum(w * v for w, v in zip(scheme.quad_weights, f_values))
