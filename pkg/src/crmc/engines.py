"""Randomized integration engines.

Four estimators of the integral of f over [a, b], all unbiased (the
degenerate no-sampling cases excepted and flagged):

* crude: plain Monte Carlo averaging of f.
* nonadaptive: control variate by a piecewise interpolant on m equal cells,
  Monte Carlo only on the residual.
* stratified: the domain is cut into k strata, a divided-difference scan
  allocates interpolation cells and samples to strata in proportion to the
  local smoothness signal, then each stratum runs the nonadaptive engine.
* importance: an adaptive dyadic partition equalizes cell priorities, the
  residual is sampled with the piecewise density proportional to 1/(m h_i),
  optionally stratified over groups of consecutive cells.

Budget accounting distinguishes two numbers on every report.  N_consumed is
the evaluation budget the estimator is charged by its defining cost model
(nodes at the scheme's sharing rate plus samples) and never exceeds the
request by more than 2r.  evaluation_count is the number of integrand calls
actually issued, including the probe evaluations the adaptive engines spend
to learn the partition; probes are cached and shared where positions
coincide exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .partition import Partition, partition_fixed
from .schemes import InterpolationScheme

__all__ = [
    "NeumaierSum",
    "RngStream",
    "BudgetSplit",
    "EstimateReport",
    "split_budget",
    "default_group_count",
    "crude_mc",
    "nonadaptive_vr",
    "adaptive_stratified",
    "adaptive_importance",
    "FLAG_NO_SAMPLING",
    "FLAG_UNIFORM_FALLBACK",
    "FLAG_UNGROUPED_FALLBACK",
]

FLAG_NO_SAMPLING = "no-sampling-biased"
FLAG_UNIFORM_FALLBACK = "uniform-allocation-fallback"
FLAG_UNGROUPED_FALLBACK = "ungrouped-fallback"


class NeumaierSum:
    """Compensated running sum (Neumaier's improved Kahan summation).

    Keeps a correction term alongside the running total so that adding many
    small terms to a large total does not lose their contribution.
    """

    __slots__ = ("_s", "_c")

    def __init__(self) -> None:
        self._s = 0.0
        self._c = 0.0

    def add(self, x: float) -> None:
        s = self._s
        t = s + x
        if abs(s) >= abs(x):
            self._c += (s - t) + x
        else:
            self._c += (x - t) + s
        self._s = t

    def extend(self, xs) -> None:
        for x in xs:
            self.add(x)

    @property
    def total(self) -> float:
        return self._s + self._c


@dataclass(frozen=True)
class RngStream:
    """Counter-based random stream identified by (seed, stream_id).

    The generator is Philox keyed through numpy's SeedSequence with the
    stream id as spawn key, so distinct ids give statistically independent
    streams from one base seed and every consumer rebuilds the identical
    stream from the two integers alone.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self) -> None:
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")
        if not isinstance(self.stream_id, int) or self.stream_id < 0:
            raise ValueError("stream_id must be a nonnegative integer")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class BudgetSplit:
    """How a total budget N falls into m cells and n residual samples."""

    m: int
    n: int
    N: int
    branch: str
    leftover: int


@dataclass(frozen=True)
class EstimateReport:
    """Outcome of one estimator run.

    N_consumed is the budget-model cost, evaluation_count the actual number
    of integrand calls (probing included).  flags records degraded modes.
    """

    estimate: float
    N_requested: int
    N_consumed: int
    m: int
    n: int
    algorithm: str
    seed: int
    evaluation_count: int
    flags: tuple[str, ...] = ()


def split_budget(scheme: InterpolationScheme, N: int) -> BudgetSplit:
    """Split a budget N into cell count m and sample count n.

    The split equalizes, to first order, the deterministic and stochastic
    error contributions.  With endpoint sharing (and r >= 2) the cost model
    is (r-1)m + 1 + n and the optimum sits at m* = 2r(N-1)/((r-1)(2r+1)),
    n* = (N-1)/(2r+1); otherwise the cost is rm + n with m* = 2N/(2r+1),
    n* = N/(2r+1).  Both are floored, m at least 1; the unspent remainder
    is reported, never silently reallocated.
    """
    r = scheme.r
    if not isinstance(N, int) or N < r + 1:
        raise ValueError(f"budget N must be an integer >= r + 1 = {r + 1}")
    if scheme.endpoint_sharing and r >= 2:
        m = max(int(2 * r * (N - 1) / ((r - 1) * (2 * r + 1))), 1)
        n = int((N - 1) / (2 * r + 1))
        branch = "endpoint-sharing"
    else:
        m = max(int(2 * N / (2 * r + 1)), 1)
        n = int(N / (2 * r + 1))
        branch = "independent"
    return BudgetSplit(m=m, n=n, N=N, branch=branch, leftover=N - scheme.cost_of(m, n))


def default_group_count(m: int) -> int:
    """Largest divisor of m not exceeding ceil(sqrt(m))."""
    cap = math.isqrt(m)
    if cap * cap < m:
        cap += 1
    for k in range(min(cap, m), 0, -1):
        if m % k == 0:
            return k
    return 1


def _check_domain(a: float, b: float) -> None:
    if not (math.isfinite(a) and math.isfinite(b) and a < b):
        raise ValueError("domain must satisfy a < b with finite endpoints")


def _require_finite(vals: np.ndarray) -> None:
    if not np.all(np.isfinite(vals)):
        raise ValueError("integrand returned a non-finite value")


def _interp_bulk(
    scheme: InterpolationScheme, zeta: np.ndarray, node_vals: np.ndarray
) -> np.ndarray:
    """Interpolant values at normalized coordinates, one cell row per query.

    Second barycentric form; queries that hit a node exactly take the node
    value directly instead of dividing by zero.
    """
    nodes = np.asarray(scheme.nodes)
    w = np.asarray(scheme.bary_weights)
    diff = zeta[:, None] - nodes[None, :]
    hit = diff == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = w[None, :] / diff
        out = (ratio * node_vals).sum(axis=1) / ratio.sum(axis=1)
    rows = np.nonzero(hit.any(axis=1))[0]
    if rows.size:
        cols = hit[rows].argmax(axis=1)
        out[rows] = node_vals[rows, cols]
    return out


def _grouped_residual_estimate(
    f: Callable,
    scheme: InterpolationScheme,
    lefts: np.ndarray,
    widths: np.ndarray,
    node_vals: np.ndarray,
    n: int,
    k: int,
    gen: np.random.Generator,
) -> float:
    """Estimate the residual integral by grouped density sampling.

    Cell i is hit with probability proportional to 1: a draw u on [0, m)
    picks cell floor(u) and lands at the fractional position inside it, so
    the sampling density is 1/(m h_i) and each sample contributes
    m h_i (f - Lf)(x).  With k > 1 the draws are stratified over k groups of
    s = m / k consecutive cells, n/k samples each (remainder leftmost); k
    must divide m and satisfy k <= n.
    """
    m = len(lefts)
    s = m // k
    n_arr = np.full(k, n // k, dtype=np.int64)
    n_arr[: n % k] += 1
    xi = gen.random(n)
    g = np.repeat(np.arange(k), n_arr)
    u = (g + xi) * s
    idx = np.minimum(u.astype(np.int64), m - 1)
    zeta = np.clip(u - idx, 0.0, 1.0)
    t = lefts[idx] + zeta * widths[idx]
    fx = np.asarray(f(t), dtype=float)
    _require_finite(fx)
    resid = fx - _interp_bulk(scheme, zeta, node_vals[idx])
    return math.fsum((s / n_arr[g]) * widths[idx] * resid)


def crude_mc(
    f: Callable, a: float, b: float, N: int, rng: RngStream
) -> EstimateReport:
    """Plain Monte Carlo: (b - a) times the mean of f at N uniform points."""
    _check_domain(a, b)
    if not isinstance(N, int) or N < 1:
        raise ValueError("N must be a positive integer")
    gen = rng.generator()
    t = gen.uniform(a, b, N)
    vals = np.asarray(f(t), dtype=float)
    _require_finite(vals)
    estimate = (b - a) * math.fsum(vals) / N
    return EstimateReport(
        estimate=estimate,
        N_requested=N,
        N_consumed=N,
        m=0,
        n=N,
        algorithm="crude",
        seed=rng.seed,
        evaluation_count=N,
    )


def _uniform_node_values(
    f: Callable, scheme: InterpolationScheme, a: float, h: float, m: int
) -> tuple[np.ndarray, int]:
    """Node values on m equal cells of width h as an (m, r) matrix.

    With endpoint sharing the right node of one cell is the left node of the
    next, so only (r-1)m + 1 distinct points are evaluated and the matrix is
    a gather; otherwise all rm points are distinct.
    """
    r = scheme.r
    nodes = np.asarray(scheme.nodes)
    if scheme.endpoint_sharing:
        zpart = nodes[:-1]
        grid = (a + (np.arange(m)[:, None] + zpart[None, :]) * h).ravel()
        grid = np.append(grid, a + m * h)
        vals = np.asarray(f(grid), dtype=float)
        _require_finite(vals)
        idx = np.arange(m)[:, None] * (r - 1) + np.arange(r)[None, :]
        return vals[idx], grid.size
    grid = (a + (np.arange(m)[:, None] + nodes[None, :]) * h).ravel()
    vals = np.asarray(f(grid), dtype=float)
    _require_finite(vals)
    return vals.reshape(m, r), grid.size


def nonadaptive_vr(
    f: Callable,
    scheme: InterpolationScheme,
    a: float,
    b: float,
    N: int,
    rng: RngStream,
) -> EstimateReport:
    """Variance reduction on m equal cells plus n crude samples of the residual.

    The deterministic part integrates the piecewise interpolant exactly; the
    stochastic part applies crude Monte Carlo to f minus the interpolant.
    The estimator is unbiased whenever n > 0; n = 0 degrades to the
    deterministic part alone and is flagged as biased.
    """
    _check_domain(a, b)
    split = split_budget(scheme, N)
    m, n = split.m, split.n
    h = (b - a) / m
    node_vals, node_evals = _uniform_node_values(f, scheme, a, h, m)
    w = np.asarray(scheme.quad_weights)
    det = h * math.fsum(node_vals @ w)

    flags: tuple[str, ...] = ()
    stoch = 0.0
    if n > 0:
        gen = rng.generator()
        t = gen.uniform(a, b, n)
        idx = np.minimum(((t - a) / h).astype(np.int64), m - 1)
        left = a + idx * h
        zeta = np.clip((t - left) / h, 0.0, 1.0)
        fx = np.asarray(f(t), dtype=float)
        _require_finite(fx)
        resid = fx - _interp_bulk(scheme, zeta, node_vals[idx])
        stoch = (b - a) * math.fsum(resid) / n
    else:
        flags = (FLAG_NO_SAMPLING,)

    consumed = scheme.cost_of(m, n)
    assert consumed <= N + 2 * scheme.r
    return EstimateReport(
        estimate=det + stoch,
        N_requested=N,
        N_consumed=consumed,
        m=m,
        n=n,
        algorithm="nonadaptive",
        seed=rng.seed,
        evaluation_count=node_evals + n,
        flags=flags,
    )


def _cell_budget_split(scheme: InterpolationScheme, Ni: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized per-cell budget split; same formulas as split_budget."""
    r = scheme.r
    if scheme.endpoint_sharing and r >= 2:
        m = np.maximum((2 * r * (Ni - 1) // ((r - 1) * (2 * r + 1))), 1)
        n = (Ni - 1) // (2 * r + 1)
    else:
        m = np.maximum(2 * Ni // (2 * r + 1), 1)
        n = Ni // (2 * r + 1)
    return m.astype(np.int64), n.astype(np.int64)


def adaptive_stratified(
    f: Callable,
    scheme: InterpolationScheme,
    a: float,
    b: float,
    N: int,
    rng: RngStream,
    kappa: float = 0.8,
    delta_reg: float = 0.0,
) -> EstimateReport:
    """Stratified variance reduction with divided-difference allocation.

    [a, b] is cut into k = max(1, floor(N**kappa)) equal strata.  One divided
    difference per stratum (over r + 1 equispaced probes) estimates the local
    r-th derivative; stratum i receives a budget share proportional to
    Ctilde_i**(1/(r+1)) where

        Ctilde_i = h sqrt(alpha^2 - beta^2) |d_i| r!   if |d_i| r! >= delta_reg,
        Ctilde_i = h alpha delta_reg r!                otherwise,

    shrunk by the factor (1 - kr/N) and padded with + r so no stratum
    starves.  Each stratum then runs the nonadaptive engine on its share.
    With delta_reg = 0 and every divided difference exactly zero the
    allocation falls back to uniform and the report is flagged.
    """
    _check_domain(a, b)
    r = scheme.r
    if not (0.0 < kappa < 1.0):
        raise ValueError("kappa must lie in (0, 1)")
    if not (math.isfinite(delta_reg) and delta_reg >= 0.0):
        raise ValueError("delta_reg must be finite and nonnegative")
    if not isinstance(N, int) or N < 1:
        raise ValueError("N must be a positive integer")
    k = max(1, int(math.floor(N**kappa)))
    if N < (2 * r + 1) * k:
        raise ValueError(
            f"budget N={N} too small for k={k} strata: need N >= (2r+1)k = {(2 * r + 1) * k}"
        )
    w = (b - a) / k
    rfact = math.factorial(r)

    # one probe grid for all strata; stratum i owns points i*r .. (i+1)*r
    grid = np.linspace(a, b, k * r + 1)
    gv = np.asarray(f(grid), dtype=float)
    _require_finite(gv)
    T = gv[np.arange(k)[:, None] * r + np.arange(r + 1)[None, :]].copy()
    step = w / r
    for j in range(1, r + 1):
        T[:, j:] = (T[:, j:] - T[:, j - 1 : -1]) / (j * step)
    d = T[:, r]

    dscale = np.abs(d) * rfact
    ctilde = np.where(
        dscale >= delta_reg,
        w * scheme.vr_factor * dscale,
        w * scheme.alpha * delta_reg * rfact,
    )
    flags: tuple[str, ...] = ()
    weights = ctilde ** (1.0 / (r + 1))
    total = weights.sum()
    if total == 0.0:
        Ni_star = np.full(k, N / k)
        flags = (FLAG_UNIFORM_FALLBACK,)
    else:
        Ni_star = weights / total * N
    Ni = np.floor(Ni_star * (1.0 - k * r / N) + r).astype(np.int64)
    mi, ni = _cell_budget_split(scheme, Ni)

    # deterministic parts of all strata at once; the flattened node grid of
    # consecutive equal subcells is globally contiguous under endpoint
    # sharing, so a single trailing point closes it
    M = int(mi.sum())
    cell_idx = np.repeat(np.arange(k), mi)
    offsets = np.concatenate([[0], np.cumsum(mi)[:-1]])
    within = np.arange(M) - np.repeat(offsets, mi)
    sub_h = w / mi
    sub_left = a + cell_idx * w + within * sub_h[cell_idx]
    nodes = np.asarray(scheme.nodes)
    if scheme.endpoint_sharing:
        zpart = nodes[:-1]
        pts = sub_left[:, None] + zpart[None, :] * sub_h[cell_idx][:, None]
        flat = np.append(np.asarray(f(pts.ravel()), dtype=float), np.asarray(f(np.array([b])), dtype=float))
        _require_finite(flat)
        gather = np.arange(M)[:, None] * (r - 1) + np.arange(r)[None, :]
        node_vals = flat[gather]
        node_evals = flat.size
    else:
        pts = sub_left[:, None] + nodes[None, :] * sub_h[cell_idx][:, None]
        node_vals = np.asarray(f(pts.ravel()), dtype=float).reshape(M, r)
        _require_finite(node_vals)
        node_evals = M * r
    qw = np.asarray(scheme.quad_weights)
    det = math.fsum(sub_h[cell_idx] * (node_vals @ qw))

    # residual sampling, stratum-major order
    n_tot = int(ni.sum())
    stoch = 0.0
    if n_tot > 0:
        gen = rng.generator()
        xi = gen.random(n_tot)
        sc = np.repeat(np.arange(k), ni)
        pos = xi * mi[sc]
        sub = np.minimum(pos.astype(np.int64), mi[sc] - 1)
        zeta = np.clip(pos - sub, 0.0, 1.0)
        row = offsets[sc] + sub
        t = sub_left[row] + zeta * sub_h[sc]
        fx = np.asarray(f(t), dtype=float)
        _require_finite(fx)
        resid = fx - _interp_bulk(scheme, zeta, node_vals[row])
        stoch = math.fsum(w / ni[sc] * resid)

    consumed = int(
        sum(scheme.cost_of(int(mm), int(nn)) for mm, nn in zip(mi, ni))
    )
    assert consumed <= N + 2 * r
    return EstimateReport(
        estimate=det + stoch,
        N_requested=N,
        N_consumed=consumed,
        m=M,
        n=n_tot,
        algorithm="strata",
        seed=rng.seed,
        evaluation_count=(k * r + 1) + node_evals + n_tot,
        flags=flags,
    )


def adaptive_importance(
    f: Callable,
    scheme: InterpolationScheme,
    a: float,
    b: float,
    N: int,
    rng: RngStream,
    delta_reg: float = 0.0,
    group_count: Optional[int] = None,
    partition: Optional[Partition] = None,
) -> EstimateReport:
    """Adaptive partition plus importance sampling of the residual.

    The budget split gives m cells and n samples.  A greedy priority
    partition places the m cells, the interpolant over them is integrated
    exactly, and the residual is sampled with density 1/(m h_i) on cell i:
    a uniform draw u on [0, m) selects cell floor(u), the fractional part
    is the position inside the cell, and each sample contributes
    m h_i (f - Lf)(x).

    Sampling is additionally stratified over k groups of s = m/k consecutive
    cells with n/k samples each (remainder to the leftmost groups), which
    suppresses the mean-cancellation penalty when the r-th derivative
    changes sign; grouping leaves the expectation unchanged.  By default k
    is the largest divisor of m at most ceil(sqrt(m)); if k exceeds n the
    engine falls back to a single group and flags it.

    An externally built partition over the same scheme and domain with
    exactly the split's m cells may be passed in to share probe work across
    repetitions; evaluation counts then still report the cost of building it.
    """
    _check_domain(a, b)
    if not (math.isfinite(delta_reg) and delta_reg >= 0.0):
        raise ValueError("delta_reg must be finite and nonnegative")
    split = split_budget(scheme, N)
    m, n = split.m, split.n

    if partition is None:
        part = partition_fixed(f, scheme, a, b, m, delta_reg)
    else:
        part = partition
        if part.m != m:
            raise ValueError(f"supplied partition has {part.m} cells, budget wants {m}")
        if part.scheme.r != scheme.r or part.scheme.nodes != scheme.nodes:
            raise ValueError("supplied partition was built for a different scheme")
        if not (part.a == a and part.b == b):
            raise ValueError("supplied partition covers a different domain")

    node_vals = part.node_matrix()
    widths = part.widths()
    lefts = part.lefts()
    qw = np.asarray(scheme.quad_weights)
    det = math.fsum(widths * (node_vals @ qw))

    flags: tuple[str, ...] = ()
    if group_count is None:
        k = default_group_count(m)
    else:
        if not isinstance(group_count, int) or group_count < 1:
            raise ValueError("group_count must be a positive integer")
        if m % group_count != 0:
            raise ValueError(f"group_count must divide m={m}")
        k = group_count
    if k > n:
        # cannot put a sample in every group; degrade to plain density sampling
        if n > 0:
            flags += (FLAG_UNGROUPED_FALLBACK,)
        k = 1

    stoch = 0.0
    if n > 0:
        stoch = _grouped_residual_estimate(
            f, scheme, lefts, widths, node_vals, n, k, rng.generator()
        )
    else:
        flags += (FLAG_NO_SAMPLING,)

    consumed = scheme.cost_of(m, n)
    assert consumed <= N + 2 * scheme.r
    return EstimateReport(
        estimate=det + stoch,
        N_requested=N,
        N_consumed=consumed,
        m=m,
        n=n,
        algorithm="importance",
        seed=rng.seed,
        evaluation_count=part.evaluations + n,
        flags=flags,
    )
