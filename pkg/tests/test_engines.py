import math

import numpy as np
import pytest

from crmc import (
    FLAG_NO_SAMPLING,
    FLAG_UNGROUPED_FALLBACK,
    FLAG_UNIFORM_FALLBACK,
    NeumaierSum,
    RngStream,
    adaptive_importance,
    adaptive_stratified,
    crude_mc,
    default_group_count,
    logsing,
    nonadaptive_vr,
    partition_fixed,
    split_budget,
)


# ------------------------------------------------------------- accumulators

def test_neumaier_repeated_small():
    acc = NeumaierSum()
    for _ in range(10_000_000):
        acc.add(0.1)
    assert acc.total == pytest.approx(1_000_000.0, rel=1e-12)


def test_neumaier_cancellation():
    acc = NeumaierSum()
    acc.extend([1e16, 1.0, -1e16])
    assert acc.total == 1.0


def test_neumaier_extend_matches_add():
    xs = np.random.default_rng(3).uniform(-1, 1, 1000)
    a1, a2 = NeumaierSum(), NeumaierSum()
    a1.extend(xs)
    for x in xs:
        a2.add(float(x))
    assert a1.total == a2.total


# ------------------------------------------------------------- rng streams

def test_rng_determinism_and_separation():
    g1 = RngStream(42, 0).generator()
    g2 = RngStream(42, 0).generator()
    g3 = RngStream(42, 1).generator()
    x1, x2, x3 = (g.uniform(size=8) for g in (g1, g2, g3))
    assert np.array_equal(x1, x2)
    assert not np.array_equal(x1, x3)


def test_rng_validation():
    with pytest.raises(ValueError):
        RngStream(-1, 0)
    with pytest.raises(ValueError):
        RngStream(1, -2)
    with pytest.raises(ValueError):
        RngStream(1.5, 0)


# ------------------------------------------------------------- budget split

def test_split_budget_pinned_examples(scheme_r1, scheme_r2, scheme_r4, scheme_r2_gauss):
    bs = split_budget(scheme_r2, 500)
    assert (bs.m, bs.n, bs.branch) == (399, 99, "endpoint-sharing")
    assert bs.leftover == 500 - (399 + 1 + 99) == 1

    bs = split_budget(scheme_r4, 500)
    assert (bs.m, bs.n) == (147, 55)
    assert bs.leftover == 500 - (3 * 147 + 1 + 55)

    bs = split_budget(scheme_r2_gauss, 500)
    assert (bs.m, bs.n, bs.branch) == (200, 100, "independent")
    assert bs.leftover == 0

    bs = split_budget(scheme_r1, 10)
    assert (bs.m, bs.n) == (6, 3)

    bs = split_budget(scheme_r2, 3)
    assert (bs.m, bs.n) == (1, 0)


def test_split_budget_never_overspends(scheme_r2, scheme_r4, scheme_r2_gauss):
    for s in (scheme_r2, scheme_r4, scheme_r2_gauss):
        for N in range(s.r + 1, 400, 7):
            bs = split_budget(s, N)
            assert s.cost_of(bs.m, bs.n) <= N
            assert bs.leftover >= 0


def test_split_budget_validation(scheme_r2):
    with pytest.raises(ValueError):
        split_budget(scheme_r2, 2)
    with pytest.raises(ValueError):
        split_budget(scheme_r2, 10.0)


def test_default_group_count():
    assert default_group_count(16) == 4
    assert default_group_count(36) == 6
    assert default_group_count(17) == 1
    assert default_group_count(1599) == 39
    assert default_group_count(1) == 1


# ------------------------------------------------------------- crude

def test_crude_constant_is_exact(scheme_r2):
    rep = crude_mc(lambda x: np.full_like(np.asarray(x, float), 3.5), 0.0, 2.0, 64, RngStream(1))
    assert rep.estimate == pytest.approx(7.0, abs=1e-12)
    assert rep.algorithm == "crude"
    assert rep.N_consumed == rep.evaluation_count == 64


def test_crude_mean_within_3_sigma():
    reps = 800
    errs = np.array(
        [
            crude_mc(np.exp, 0.0, 1.0, 100, RngStream(11, k)).estimate - (math.e - 1)
            for k in range(reps)
        ]
    )
    z = errs.mean() / (errs.std(ddof=1) / math.sqrt(reps))
    assert abs(z) < 3.0


def test_crude_validation():
    with pytest.raises(ValueError):
        crude_mc(np.exp, 0.0, 1.0, 0, RngStream(1))
    with pytest.raises(ValueError):
        crude_mc(np.exp, 1.0, 1.0, 10, RngStream(1))
    with pytest.raises(ValueError, match="finite"):
        crude_mc(lambda x: np.asarray(x) * np.nan, 0.0, 1.0, 10, RngStream(1))


# ------------------------------------------------------------- nonadaptive

def test_nonadaptive_exact_on_low_degree(scheme_r2, scheme_r3):
    for s, f, exact in (
        (scheme_r2, lambda x: 2.0 * np.asarray(x) - 1.0, 0.0),
        (scheme_r3, lambda x: np.asarray(x) ** 2, 1 / 3),
    ):
        vals = [
            nonadaptive_vr(f, s, 0.0, 1.0, 200, RngStream(5, k)).estimate
            for k in range(4)
        ]
        assert vals[0] == pytest.approx(exact, abs=1e-13)
        assert max(vals) - min(vals) < 1e-13


def test_nonadaptive_flags_when_budget_has_no_samples(scheme_r2):
    rep = nonadaptive_vr(np.exp, scheme_r2, 0.0, 1.0, 3, RngStream(2))
    assert rep.n == 0
    assert FLAG_NO_SAMPLING in rep.flags


def test_nonadaptive_deterministic(scheme_r2):
    r1 = nonadaptive_vr(np.exp, scheme_r2, 0.0, 1.0, 300, RngStream(9, 4))
    r2 = nonadaptive_vr(np.exp, scheme_r2, 0.0, 1.0, 300, RngStream(9, 4))
    assert r1.estimate == r2.estimate


def test_nonadaptive_accounting(scheme_r2):
    rep = nonadaptive_vr(np.exp, scheme_r2, 0.0, 1.0, 500, RngStream(1))
    # m + 1 shared nodes plus n samples
    assert rep.m == 399 and rep.n == 99
    assert rep.evaluation_count == 400 + 99
    assert rep.N_consumed == 499


def test_nonadaptive_close_on_smooth(scheme_r2):
    rep = nonadaptive_vr(np.exp, scheme_r2, 0.0, 1.0, 2000, RngStream(7))
    assert rep.estimate == pytest.approx(math.e - 1, abs=1e-7)


# ------------------------------------------------------------- stratified

def test_strata_needs_room_for_probes(scheme_r2):
    # k = floor(N^kappa) strata need (2r+1)k <= N
    with pytest.raises(ValueError, match="budget"):
        adaptive_stratified(np.exp, scheme_r2, 0.0, 1.0, 1000, RngStream(1), kappa=0.8)


def test_strata_runs_and_is_close(scheme_r2):
    rep = adaptive_stratified(np.exp, scheme_r2, 0.0, 1.0, 5000, RngStream(3), kappa=0.8)
    assert rep.algorithm == "strata"
    assert rep.estimate == pytest.approx(math.e - 1, abs=1e-6)
    assert rep.N_consumed <= 5000


def test_strata_uniform_fallback_flag(scheme_r2):
    # constant integrand: every divided difference is exactly zero, the
    # allocation rule has nothing to weight and falls back to uniform shares
    f = lambda x: np.full_like(np.asarray(x, dtype=float), 2.5)
    rep = adaptive_stratified(f, scheme_r2, 0.0, 1.0, 200, RngStream(4), kappa=0.5)
    assert FLAG_UNIFORM_FALLBACK in rep.flags
    assert rep.estimate == pytest.approx(2.5, abs=1e-12)


def test_strata_exact_on_linear(scheme_r2):
    f = lambda x: np.asarray(x, dtype=float)
    rep = adaptive_stratified(f, scheme_r2, 0.0, 1.0, 200, RngStream(4), kappa=0.5)
    assert rep.estimate == pytest.approx(0.5, abs=1e-12)


def test_strata_deterministic(scheme_r2):
    a = adaptive_stratified(logsing().f, scheme_r2, 0.0, 1.0, 4000, RngStream(6, 2), kappa=0.7)
    b = adaptive_stratified(logsing().f, scheme_r2, 0.0, 1.0, 4000, RngStream(6, 2), kappa=0.7)
    assert a.estimate == b.estimate


# ------------------------------------------------------------- importance

def test_importance_close_and_accounted(scheme_r2):
    prob = logsing()
    rep = adaptive_importance(prob.f, scheme_r2, 0.0, 1.0, 500, RngStream(12))
    assert rep.algorithm == "importance"
    assert (rep.m, rep.n) == (399, 99)
    assert rep.estimate == pytest.approx(prob.exact, abs=5e-3)
    assert rep.N_consumed == 499


def test_importance_partition_reuse_identical(scheme_r2):
    prob = logsing()
    part = partition_fixed(prob.f, scheme_r2, 0.0, 1.0, 399)
    direct = adaptive_importance(prob.f, scheme_r2, 0.0, 1.0, 500, RngStream(13, 5))
    reused = adaptive_importance(
        prob.f, scheme_r2, 0.0, 1.0, 500, RngStream(13, 5), partition=part
    )
    assert direct.estimate == reused.estimate
    assert direct.evaluation_count == reused.evaluation_count


def test_importance_partition_mismatch_errors(scheme_r2, scheme_r2_gauss):
    prob = logsing()
    part = partition_fixed(prob.f, scheme_r2, 0.0, 1.0, 399)
    with pytest.raises(ValueError, match="cells"):
        adaptive_importance(prob.f, scheme_r2, 0.0, 1.0, 600, RngStream(1), partition=part)
    # N=998 makes the disjoint-node split want 399 cells too, so the scheme
    # comparison is what trips
    with pytest.raises(ValueError, match="scheme"):
        adaptive_importance(prob.f, scheme_r2_gauss, 0.0, 1.0, 998, RngStream(1), partition=part)
    part01 = partition_fixed(np.exp, scheme_r2, 0.0, 1.0, 399)
    with pytest.raises(ValueError, match="domain"):
        adaptive_importance(np.exp, scheme_r2, 0.0, 2.0, 500, RngStream(1), partition=part01)


def test_importance_group_count_must_divide(scheme_r2):
    # the 500-point budget yields m=399 cells; 8 does not divide 399
    with pytest.raises(ValueError, match="divide"):
        adaptive_importance(np.exp, scheme_r2, 0.0, 1.0, 500, RngStream(1), group_count=8)


def test_importance_ungrouped_fallback(scheme_r2):
    # N=13 gives m=9, n=2; the default 3 groups cannot be filled
    rep = adaptive_importance(np.exp, scheme_r2, 0.0, 1.0, 13, RngStream(8))
    assert FLAG_UNGROUPED_FALLBACK in rep.flags


def test_importance_exact_on_low_degree(scheme_r2):
    f = lambda x: 4.0 * np.asarray(x) + 0.5
    vals = [
        adaptive_importance(f, scheme_r2, 0.0, 1.0, 120, RngStream(21, k)).estimate
        for k in range(4)
    ]
    assert vals[0] == pytest.approx(2.5, abs=1e-12)
    assert max(vals) - min(vals) < 1e-12


def test_grouped_sampling_does_not_hurt(scheme_r2):
    # stratifying the sample indices over consecutive cell groups should not
    # increase variance measurably on a one-signed derivative
    prob = logsing()
    part = partition_fixed(prob.f, scheme_r2, 0.0, 1.0, 1599)
    est_g, est_u = [], []
    for k in range(200):
        est_g.append(
            adaptive_importance(
                prob.f, scheme_r2, 0.0, 1.0, 2000, RngStream(17, k), partition=part
            ).estimate
        )
        est_u.append(
            adaptive_importance(
                prob.f, scheme_r2, 0.0, 1.0, 2000, RngStream(17, 1000 + k),
                partition=part, group_count=1,
            ).estimate
        )
    var_g = np.var(np.array(est_g) - prob.exact)
    var_u = np.var(np.array(est_u) - prob.exact)
    assert var_g <= var_u * 1.15


def test_importance_mean_within_3_sigma(scheme_r2):
    prob = logsing()
    part = partition_fixed(prob.f, scheme_r2, 0.0, 1.0, 399)
    reps = 600
    errs = np.array(
        [
            adaptive_importance(
                prob.f, scheme_r2, 0.0, 1.0, 500, RngStream(23, k), partition=part
            ).estimate
            - prob.exact
            for k in range(reps)
        ]
    )
    z = errs.mean() / (errs.std(ddof=1) / math.sqrt(reps))
    assert abs(z) < 3.0
