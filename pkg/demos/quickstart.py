"""
First steps: schemes, fixed partitions, and two ways to integrate
=================================================================

Run with: python3 demos/quickstart.py
"""

import numpy as np

from crmc import (
    RngStream,
    crude_mc,
    l_tilde,
    make_scheme,
    nonadaptive_vr,
    partition_fixed,
)


def check(name, cond):
    print(f"  [{'PASS' if cond else 'FAIL'}] {name}")
    return cond


# A scheme bundles the smoothness order r with the interpolation nodes used
# on every cell. The default nodes are equispaced including both endpoints,
# which lets neighbouring cells share function values.
scheme = make_scheme(2)
print("scheme:", scheme)
print("node polynomial constants:",
      f"alpha={scheme.alpha:.6f} beta={scheme.beta:+.6f} lam={scheme.lam}")

# Integrate exp over [0,1]. Plain Monte Carlo averages f at uniform points;
# the variance-reduced estimator subtracts a piecewise interpolant first and
# only samples the leftover. Streams are (seed, stream_id) pairs.
exact = np.e - 1
budget = 2000

r_crude = crude_mc(np.exp, 0.0, 1.0, budget, RngStream(12345, 0))
r_vr = nonadaptive_vr(np.exp, scheme, 0.0, 1.0, budget, RngStream(12345, 1))

print(f"\nexact            {exact:.12f}")
print(f"crude MC         {r_crude.estimate:.12f}  err {r_crude.estimate-exact:+.2e}")
print(f"variance-reduced {r_vr.estimate:.12f}  err {r_vr.estimate-exact:+.2e}")

# The budget ledger: every f evaluation is counted, deterministic and random.
print(f"\nevaluations used: crude {r_crude.evaluation_count},",
      f"vr {r_vr.evaluation_count} (N={budget})")

ok = True
ok &= check("crude error near its sigma/sqrt(N) scale",
            abs(r_crude.estimate - exact) < 3e-2)
ok &= check("vr error below 1e-6", abs(r_vr.estimate - exact) < 1e-6)
ok &= check("vr error at least 100x smaller here",
            abs(r_vr.estimate - exact) * 100 < abs(r_crude.estimate - exact))
ok &= check("neither overspends the budget",
            r_crude.evaluation_count <= budget and r_vr.evaluation_count <= budget)

# Partitions can also be built directly. partition_fixed splits [a,b] into m
# cells by always halving the cell with the largest error indicator, so the
# same call is also the doorway to adaptive refinement.
part = partition_fixed(np.exp, scheme, 0.0, 1.0, 8)
print("\nfixed 8-cell partition of exp:", np.round(part.breakpoints(), 4))
print("regularity functional l_tilde:", l_tilde(part))
ok &= check("smooth integrand gives a uniform partition",
            np.allclose(part.breakpoints(), np.arange(9) / 8))

raise SystemExit(0 if ok else 1)
