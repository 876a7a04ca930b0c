"""
Measuring convergence rates with the benchmark harness
======================================================

run_sweep drives one estimator over a grid of budgets and returns CSV rows,
the same ones the command line tool writes. Here we sweep two estimators on
exp, fit the error decay, and compare with the predicted N^-(r+1/2).

Run with: python3 demos/convergence_study.py
"""

import math

import numpy as np

from crmc import CSV_HEADER, constant_thm1, exp_problem, make_scheme, run_sweep


def check(name, cond):
    print(f"  [{'PASS' if cond else 'FAIL'}] {name}")
    return cond


scheme = make_scheme(2)
n_grid = [250, 500, 1000, 2000, 4000, 8000]
reps = 30

print("columns:", CSV_HEADER)

# data rows carry algo,problem,r,N,rep,seed,estimate,abs_error,eval_count;
# the first line is the header and "#" lines are per-N summaries
def sweep_rms(algo):
    out = run_sweep(algo, "exp", scheme, n_grid, reps=reps, seed=3)
    err = {}
    for row in out[1:]:
        if row.startswith("#"):
            continue
        parts = row.split(",")
        err.setdefault(int(parts[3]), []).append(float(parts[7]))
    return [math.sqrt(np.mean(np.square(err[N]))) for N in n_grid]


rms_crude = sweep_rms("crude")
rms_vr = sweep_rms("nonadaptive")

print(f"\n{'N':>6} {'crude rms':>12} {'vr rms':>12}")
for N, rc, rv in zip(n_grid, rms_crude, rms_vr):
    print(f"{N:>6} {rc:>12.3e} {rv:>12.3e}")

slope_crude = np.polyfit(np.log(n_grid), np.log(rms_crude), 1)[0]
slope_vr = np.polyfit(np.log(n_grid), np.log(rms_vr), 1)[0]
print(f"\nfitted slopes: crude {slope_crude:.2f} (theory -0.5),"
      f" vr {slope_vr:.2f} (theory {-(scheme.r + 0.5)})")

ok = True
ok &= check("crude decays like N^-1/2", abs(slope_crude + 0.5) < 0.15)
ok &= check("vr decays like N^-5/2", abs(slope_vr + 2.5) < 0.25)

# The vr errors should also sit near their asymptote C * N^-5/2.
C = constant_thm1(scheme, exp_problem())
ratios = [rv / (C * N ** -2.5) for N, rv in zip(n_grid, rms_vr)]
print("rms over asymptote:", np.round(ratios, 2))
ok &= check("constant matches within 2x", all(0.5 < q < 2 for q in ratios))

raise SystemExit(0 if ok else 1)
