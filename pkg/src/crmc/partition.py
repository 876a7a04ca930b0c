"""Adaptive dyadic partitioning driven by divided differences.

Each interval carries a priority

    p = h**(r+1) * max(|d|, delta_reg / r!)

where h is the width and d the divided difference of the integrand over r + 1
equispaced probe points including the endpoints.  Splitting always happens at
the midpoint, so every breakpoint is dyadic within [a, b]; probe positions are
kept as exact rationals and probe values are cached, which lets a child reuse
the parent's endpoint and midpoint evaluations and lets later passes resume a
partition without re-probing.

Two drivers are provided: a fixed-size one that performs m - 1 greedy
highest-priority splits (ties broken first-in-first-out), and a threshold one
that splits every interval with priority above a given level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from heapq import heappop, heappush
from typing import Callable, Sequence, TextIO

import numpy as np

from .schemes import InterpolationScheme, dd_from_values

__all__ = [
    "IntervalRecord",
    "Partition",
    "DepthLimitError",
    "partition_fixed",
    "partition_auto",
    "refine_auto",
    "refine_fixed",
    "l_tilde",
]

MAX_DEPTH = 60


class DepthLimitError(RuntimeError):
    """Raised when threshold refinement exceeds the bisection depth guard."""


class _ProbeCache:
    """Exact-position value cache with a count of actual integrand calls."""

    __slots__ = ("values", "misses")

    def __init__(self) -> None:
        self.values: dict[Fraction, float] = {}
        self.misses = 0

    def gather(self, f: Callable, keys: Sequence[Fraction]) -> list[float]:
        missing = [k for k in dict.fromkeys(keys) if k not in self.values]
        if missing:
            xs = np.array([float(k) for k in missing], dtype=float)
            vals = np.asarray(f(xs), dtype=float)
            if not np.all(np.isfinite(vals)):
                bad = xs[~np.isfinite(vals)][0]
                raise ValueError(f"integrand returned a non-finite value at x={bad!r}")
            self.misses += len(missing)
            for k, v in zip(missing, vals):
                self.values[k] = float(v)
        return [self.values[k] for k in keys]


@dataclass(frozen=True)
class IntervalRecord:
    """One partition cell: geometry, divided difference, and priority."""

    left: float
    right: float
    h: float
    d: float
    priority: float
    left_key: Fraction
    right_key: Fraction
    depth: int


@dataclass(frozen=True)
class Partition:
    """An ordered set of cells covering [a, b], plus the shared probe cache.

    Instances are immutable; refinement returns a new Partition that shares
    the cache (and therefore the cumulative evaluation count) with its
    ancestors.
    """

    scheme: InterpolationScheme
    records: tuple[IntervalRecord, ...]
    a: float
    b: float
    delta_reg: float
    f: Callable
    cache: _ProbeCache

    @property
    def m(self) -> int:
        return len(self.records)

    @property
    def evaluations(self) -> int:
        """Distinct integrand calls made while building and reusing this tree."""
        return self.cache.misses

    def breakpoints(self) -> np.ndarray:
        pts = [rec.left for rec in self.records]
        pts.append(self.records[-1].right)
        return np.array(pts, dtype=float)

    def widths(self) -> np.ndarray:
        return np.array([rec.h for rec in self.records], dtype=float)

    def lefts(self) -> np.ndarray:
        return np.array([rec.left for rec in self.records], dtype=float)

    def priorities(self) -> np.ndarray:
        return np.array([rec.priority for rec in self.records], dtype=float)

    def node_matrix(self) -> np.ndarray:
        """Integrand values at the mapped scheme nodes of every cell, (m, r).

        Node positions are formed in exact arithmetic, so values already seen
        as probes (always the case for schemes whose nodes are a subset of the
        probe grid, such as order 2 with endpoint nodes) are not re-evaluated.
        """
        keys: list[Fraction] = []
        for rec in self.records:
            wk = rec.right_key - rec.left_key
            for z in self.scheme.nodes_exact:
                keys.append(rec.left_key + z * wk)
        vals = self.cache.gather(self.f, keys)
        return np.array(vals, dtype=float).reshape(self.m, self.scheme.r)

    def dump(self, stream: TextIO) -> None:
        """Write one line per cell: left, right, d, priority; tab-separated."""
        for rec in self.records:
            stream.write(
                f"{rec.left:.17g}\t{rec.right:.17g}\t{rec.d:.17g}\t{rec.priority:.17g}\n"
            )


def _build_record(
    f: Callable,
    scheme: InterpolationScheme,
    cache: _ProbeCache,
    lk: Fraction,
    rk: Fraction,
    depth: int,
    delta_reg: float,
) -> IntervalRecord:
    r = scheme.r
    wk = rk - lk
    keys = [lk + wk * Fraction(j, r) for j in range(r + 1)]
    vals = cache.gather(f, keys)
    pts = [float(k) for k in keys]
    d = dd_from_values(pts, vals)
    h = float(wk)
    p = h ** (r + 1) * max(abs(d), delta_reg / math.factorial(r))
    return IntervalRecord(
        left=float(lk),
        right=float(rk),
        h=h,
        d=d,
        priority=p,
        left_key=lk,
        right_key=rk,
        depth=depth,
    )


def _split(
    f: Callable,
    scheme: InterpolationScheme,
    cache: _ProbeCache,
    rec: IntervalRecord,
    delta_reg: float,
) -> tuple[IntervalRecord, IntervalRecord]:
    mid = (rec.left_key + rec.right_key) / 2
    lo = _build_record(f, scheme, cache, rec.left_key, mid, rec.depth + 1, delta_reg)
    hi = _build_record(f, scheme, cache, mid, rec.right_key, rec.depth + 1, delta_reg)
    return lo, hi


def _check_domain(a: float, b: float, delta_reg: float) -> None:
    if not (math.isfinite(a) and math.isfinite(b) and a < b):
        raise ValueError("domain must satisfy a < b with finite endpoints")
    if not (math.isfinite(delta_reg) and delta_reg >= 0.0):
        raise ValueError("delta_reg must be finite and nonnegative")


def partition_fixed(
    f: Callable,
    scheme: InterpolationScheme,
    a: float,
    b: float,
    m: int,
    delta_reg: float = 0.0,
) -> Partition:
    """Partition [a, b] into exactly m cells by greedy priority halving.

    Performs m - 1 splits, always halving a cell of maximal priority; among
    equal priorities the one inserted earliest is split first, so a constant
    priority profile yields breadth-first (uniform dyadic) refinement.
    """
    if not isinstance(m, int) or m < 1:
        raise ValueError("m must be a positive integer")
    _check_domain(a, b, delta_reg)
    cache = _ProbeCache()
    root = _build_record(f, scheme, cache, Fraction(a), Fraction(b), 0, delta_reg)
    heap: list[tuple[float, int, IntervalRecord]] = [(-root.priority, 0, root)]
    seq = 1
    for _ in range(m - 1):
        _, _, rec = heappop(heap)
        for child in _split(f, scheme, cache, rec, delta_reg):
            heappush(heap, (-child.priority, seq, child))
            seq += 1
    records = sorted((item[2] for item in heap), key=lambda rec: rec.left_key)
    return Partition(scheme, tuple(records), a, b, delta_reg, f, cache)


def refine_fixed(partition: Partition, m: int) -> Partition:
    """Continue greedy halving of an existing partition until it has m cells."""
    if not isinstance(m, int) or m < 1:
        raise ValueError("m must be a positive integer")
    if m <= partition.m:
        return partition
    cache = partition.cache
    f = partition.f
    heap: list[tuple[float, int, IntervalRecord]] = []
    for seq, rec in enumerate(partition.records):
        heappush(heap, (-rec.priority, seq, rec))
    seq = partition.m
    for _ in range(m - partition.m):
        _, _, rec = heappop(heap)
        for child in _split(f, partition.scheme, cache, rec, partition.delta_reg):
            heappush(heap, (-child.priority, seq, child))
            seq += 1
    records = sorted((item[2] for item in heap), key=lambda rec: rec.left_key)
    return Partition(
        partition.scheme, tuple(records), partition.a, partition.b,
        partition.delta_reg, f, cache,
    )


def partition_auto(
    f: Callable,
    scheme: InterpolationScheme,
    a: float,
    b: float,
    threshold: float,
    delta_reg: float = 0.0,
    max_depth: int = MAX_DEPTH,
) -> Partition:
    """Split every cell whose priority exceeds the threshold.

    The result is minimal: a cell is split if and only if its priority is
    strictly above the threshold, so it coincides with greedy halving stopped
    as soon as the maximal priority falls to the threshold or below.  A cell
    that would be bisected past max_depth raises DepthLimitError, which
    distinguishes a threshold that is unreachable (for example 0 with a
    regularization floor) from ordinary convergence.
    """
    _check_domain(a, b, delta_reg)
    if not (math.isfinite(threshold) and threshold >= 0.0):
        raise ValueError("threshold must be finite and nonnegative")
    cache = _ProbeCache()
    root = _build_record(f, scheme, cache, Fraction(a), Fraction(b), 0, delta_reg)
    seed = Partition(scheme, (root,), a, b, delta_reg, f, cache)
    return refine_auto(seed, threshold, max_depth=max_depth)


def refine_auto(
    partition: Partition, threshold: float, max_depth: int = MAX_DEPTH
) -> Partition:
    """Drive an existing partition down to the given priority threshold."""
    if not (math.isfinite(threshold) and threshold >= 0.0):
        raise ValueError("threshold must be finite and nonnegative")
    cache = partition.cache
    f = partition.f
    scheme = partition.scheme
    leaves: list[IntervalRecord] = []
    stack = list(reversed(partition.records))
    while stack:
        rec = stack.pop()
        if rec.priority > threshold:
            if rec.depth >= max_depth:
                raise DepthLimitError(
                    f"bisection depth {max_depth} reached on "
                    f"[{rec.left!r}, {rec.right!r}] with priority {rec.priority!r} "
                    f"still above threshold {threshold!r}"
                )
            lo, hi = _split(f, scheme, cache, rec, partition.delta_reg)
            stack.append(hi)
            stack.append(lo)
        else:
            leaves.append(rec)
    leaves.sort(key=lambda rec: rec.left_key)
    return Partition(
        scheme, tuple(leaves), partition.a, partition.b,
        partition.delta_reg, f, cache,
    )


def l_tilde(partition: Partition) -> float:
    """Aggregate priority functional (sum of p**(1/(r+1)))**(r+1).

    For threshold partitions of a smooth integrand this converges, as the
    threshold decreases, to the corresponding smoothness functional of the
    integrand; it is the quantity the automatic driver uses to size its
    sample budget.
    """
    rp1 = partition.scheme.r + 1
    s = math.fsum(rec.priority ** (1.0 / rp1) for rec in partition.records)
    return s ** rp1
