"""Benchmark command line.

Subcommands:

* sweep: repeated runs of one estimator over a single budget or a log-spaced
  budget grid, emitting one CSV row per repetition plus a commented summary
  block per budget with the empirical RMS error and the predicted asymptote
  overlays.
* auto: repeated runs of the automatic driver at a fixed accuracy and
  confidence, with a breach-count summary.
* constants: the exact scheme constants and per-problem asymptote constants,
  12 significant digits.
* partition: build one adaptive partition and print or dump it.

All randomness is derived from --seed through per-repetition stream ids, so
a rerun with the same arguments writes byte-identical output.
"""

from __future__ import annotations

import argparse
import io
import math
import sys
from typing import Optional, Sequence

import numpy as np

from .analysis import (
    TestProblem,
    constant_thm1,
    constant_thm2,
    estimate_kstar,
    make_problem,
    reference_integral,
)
from .auto import AutoConfig, auto_integrate, c_hat_for, prepare_phase1
from .engines import (
    RngStream,
    adaptive_importance,
    adaptive_stratified,
    crude_mc,
    nonadaptive_vr,
    split_budget,
)
from .partition import l_tilde, partition_auto, partition_fixed
from .schemes import InterpolationScheme, gauss_nodes, make_scheme

__all__ = ["run_sweep", "run_auto_trial", "print_constants", "main"]

CSV_HEADER = "algo,problem,r,N,rep,seed,estimate,abs_error,eval_count"
ALGOS = ("crude", "nonadaptive", "strata", "importance")


def make_scheme_from_text(r: int, nodes_text: str) -> InterpolationScheme:
    text = nodes_text.strip()
    if text == "equispaced":
        return make_scheme(r)
    if text == "gauss":
        return make_scheme(r, gauss_nodes(r))
    nodes = [float(tok) for tok in text.split(",") if tok.strip()]
    return make_scheme(r, nodes)


def _overlay_constants(
    scheme: InterpolationScheme, problem: TestProblem
) -> tuple[float, float, float]:
    try:
        c1 = constant_thm1(scheme, problem)
        c2 = constant_thm2(scheme, problem)
        c3 = estimate_kstar(scheme, cross_check=False) * c2
    except ValueError:
        return math.nan, math.nan, math.nan
    return c1, c2, c3


def run_sweep(
    algo: str,
    problem: str | TestProblem,
    scheme: InterpolationScheme,
    N_values: Sequence[int],
    reps: int,
    seed: int,
    kappa: float = 0.8,
    delta_reg: float = 0.0,
) -> list[str]:
    """One estimator over a budget grid; returns the CSV lines."""
    if algo not in ALGOS:
        raise ValueError(f"unknown algorithm {algo!r}; choose from {ALGOS}")
    prob = make_problem(problem) if isinstance(problem, str) else problem
    if reps < 1:
        raise ValueError("reps must be at least 1")
    ref = reference_integral(prob)
    r = scheme.r
    c1, c2, c3 = _overlay_constants(scheme, prob)

    lines = [CSV_HEADER]
    for i_n, N in enumerate(N_values):
        part = None
        if algo == "importance":
            split = split_budget(scheme, N)
            part = partition_fixed(prob.f, scheme, prob.a, prob.b, split.m, delta_reg)
        errors = []
        for rep in range(reps):
            rng = RngStream(seed, i_n * reps + rep)
            if algo == "crude":
                rep_out = crude_mc(prob.f, prob.a, prob.b, N, rng)
            elif algo == "nonadaptive":
                rep_out = nonadaptive_vr(prob.f, scheme, prob.a, prob.b, N, rng)
            elif algo == "strata":
                rep_out = adaptive_stratified(
                    prob.f, scheme, prob.a, prob.b, N, rng,
                    kappa=kappa, delta_reg=delta_reg,
                )
            else:
                rep_out = adaptive_importance(
                    prob.f, scheme, prob.a, prob.b, N, rng,
                    delta_reg=delta_reg, partition=part,
                )
            err = rep_out.estimate - ref
            errors.append(err)
            lines.append(
                f"{algo},{prob.name},{r},{N},{rep},{seed},"
                f"{rep_out.estimate!r},{abs(err)!r},{rep_out.evaluation_count}"
            )
        errs = np.array(errors)
        rms = float(np.sqrt(np.mean(errs * errs)))
        mean_err = float(np.mean(errs))
        decay = float(N) ** -(r + 0.5)
        lines.append(
            f"# summary algo={algo} problem={prob.name} r={r} N={N} reps={reps} "
            f"rms={rms!r} mean_error={mean_err!r} "
            f"thm1={c1 * decay!r} thm2={c2 * decay!r} thm3={c3 * decay!r}"
        )
    return lines


def run_auto_trial(
    problem: str | TestProblem,
    scheme: InterpolationScheme,
    epsilon: float,
    delta: float,
    reps: int,
    seed: int,
    kappa: float = 0.5,
    delta_reg: float = 0.0,
) -> list[str]:
    """Repeated automatic runs at one accuracy target; returns the CSV lines."""
    prob = make_problem(problem) if isinstance(problem, str) else problem
    if reps < 1:
        raise ValueError("reps must be at least 1")
    ref = reference_integral(prob)
    config = AutoConfig(
        epsilon=epsilon, delta=delta, kappa=kappa, delta_reg=delta_reg
    )
    phase1 = prepare_phase1(prob.f, scheme, prob.a, prob.b, config)

    lines = [CSV_HEADER]
    errors = []
    last = None
    for rep in range(reps):
        rng = RngStream(seed, rep)
        rep_out = auto_integrate(
            prob.f, scheme, prob.a, prob.b, config, rng, phase1=phase1
        )
        last = rep_out
        err = rep_out.estimate - ref
        errors.append(err)
        lines.append(
            f"auto,{prob.name},{scheme.r},{rep_out.N_epsilon},{rep},{seed},"
            f"{rep_out.estimate!r},{abs(err)!r},{rep_out.evaluation_count}"
        )
    abs_errs = np.abs(np.array(errors))
    breaches = int(np.sum(abs_errs > epsilon))
    lines.append(
        f"# summary algo=auto problem={prob.name} r={scheme.r} "
        f"eps={epsilon!r} delta={delta!r} N_epsilon={last.N_epsilon} "
        f"m_phase1={last.m_phase1} m_final={last.m_final} "
        f"l_tilde={last.l_tilde_value!r} reps={reps} breaches={breaches} "
        f"breach_fraction={breaches / reps!r} e_max={float(abs_errs.max())!r}"
    )
    return lines


def print_constants(
    r: int, nodes_text: str = "equispaced", problem: Optional[str] = None
) -> list[str]:
    """Scheme constants, and asymptote constants for an optional problem."""
    scheme = make_scheme_from_text(r, nodes_text)
    fmt = "{}\t{:.12g}"
    lines = [
        f"scheme\tr={r} nodes={nodes_text}",
        fmt.format("alpha", scheme.alpha),
        fmt.format("beta", scheme.beta),
        fmt.format("gamma", scheme.gamma),
        fmt.format("lambda", scheme.lam),
        fmt.format("c_r", scheme.c_r),
        fmt.format("c_hat", c_hat_for(scheme)),
        fmt.format("kstar", estimate_kstar(scheme)),
    ]
    if problem is not None:
        prob = make_problem(problem)
        lines.append(f"problem\t{prob.name}")
        lines.append(fmt.format("reference", reference_integral(prob)))
        c1 = constant_thm1(scheme, prob)
        c2 = constant_thm2(scheme, prob)
        c3 = estimate_kstar(scheme, cross_check=False) * c2
        lines.append(fmt.format("thm1", c1))
        lines.append(fmt.format("thm2", c2))
        lines.append(fmt.format("thm3", c3))
        lines.append(fmt.format("ratio_thm1_thm2", c1 / c2 if c2 else math.inf))
    return lines


def _parse_n_grid(text: str) -> list[int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError("--n-grid must look like lo:hi:count")
    lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    if not (0 < lo <= hi and count >= 1):
        raise ValueError("--n-grid needs 0 < lo <= hi and count >= 1")
    raw = np.geomspace(lo, hi, count)
    out: list[int] = []
    for v in raw:
        n = int(round(v))
        if not out or n > out[-1]:
            out.append(n)
    return out


def _problem_text(args: argparse.Namespace) -> str:
    text = args.problem
    if getattr(args, "d", None) is not None:
        if text != "logsing":
            raise ValueError("--d only applies to the bare logsing problem")
        text = f"logsing({args.d!r})"
    return text


def _add_common(p: argparse.ArgumentParser, kappa_default: float) -> None:
    p.add_argument("--r", type=int, default=2, help="interpolation order")
    p.add_argument(
        "--nodes", default="equispaced",
        help="node family: equispaced, gauss, or a comma list in [0,1]",
    )
    p.add_argument("--problem", default="logsing", help="integrand name")
    p.add_argument("--d", type=float, default=None, help="logsing offset parameter")
    p.add_argument("--seed", type=int, default=0, help="base seed")
    p.add_argument("--kappa", type=float, default=kappa_default)
    p.add_argument("--delta-reg", type=float, default=0.0, dest="delta_reg")
    p.add_argument("--out", default=None, help="output path (default stdout)")


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="crmc", description="randomized integration benchmarks"
    )
    sub = ap.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", help="estimator error sweep over budgets")
    sw.add_argument("--algo", required=True, choices=ALGOS)
    sw.add_argument("--N", type=int, default=None, help="single budget")
    sw.add_argument("--n-grid", default=None, dest="n_grid",
                    help="log-spaced budgets lo:hi:count")
    sw.add_argument("--reps", type=int, default=1)
    _add_common(sw, kappa_default=0.8)

    au = sub.add_parser("auto", help="automatic (epsilon, delta) trials")
    au.add_argument("--eps", type=float, required=True)
    au.add_argument("--delta", type=float, required=True)
    au.add_argument("--reps", type=int, default=1)
    _add_common(au, kappa_default=0.5)

    co = sub.add_parser("constants", help="scheme and asymptote constants")
    _add_common(co, kappa_default=0.5)
    co.set_defaults(problem=None)

    pa = sub.add_parser("partition", help="build one adaptive partition")
    pa.add_argument("--N", type=int, default=None, help="cell count")
    pa.add_argument("--eps", type=float, default=None, help="priority threshold")
    pa.add_argument("--dump", action="store_true",
                    help="write one line per cell: left, right, d, priority")
    _add_common(pa, kappa_default=0.5)

    return ap


def _emit(lines: list[str], out: Optional[str]) -> None:
    text = "\n".join(lines) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "sweep":
            if (args.N is None) == (args.n_grid is None):
                raise ValueError("sweep needs exactly one of --N and --n-grid")
            N_values = [args.N] if args.N is not None else _parse_n_grid(args.n_grid)
            scheme = make_scheme_from_text(args.r, args.nodes)
            lines = run_sweep(
                args.algo, _problem_text(args), scheme, N_values,
                reps=args.reps, seed=args.seed, kappa=args.kappa,
                delta_reg=args.delta_reg,
            )
        elif args.command == "auto":
            scheme = make_scheme_from_text(args.r, args.nodes)
            lines = run_auto_trial(
                _problem_text(args), scheme, args.eps, args.delta,
                reps=args.reps, seed=args.seed, kappa=args.kappa,
                delta_reg=args.delta_reg,
            )
        elif args.command == "constants":
            problem = None
            if args.problem is not None or args.d is not None:
                if args.problem is None:
                    args.problem = "logsing"
                problem = _problem_text(args)
            lines = print_constants(args.r, args.nodes, problem)
        else:  # partition
            if (args.N is None) == (args.eps is None):
                raise ValueError("partition needs exactly one of --N and --eps")
            scheme = make_scheme_from_text(args.r, args.nodes)
            prob = make_problem(_problem_text(args))
            if args.N is not None:
                part = partition_fixed(
                    prob.f, scheme, prob.a, prob.b, args.N, args.delta_reg
                )
            else:
                part = partition_auto(
                    prob.f, scheme, prob.a, prob.b, args.eps, args.delta_reg
                )
            if args.dump:
                buf = io.StringIO()
                part.dump(buf)
                lines = buf.getvalue().splitlines()
            else:
                lines = [
                    f"m\t{part.m}",
                    f"l_tilde\t{l_tilde(part)!r}",
                    f"evaluations\t{part.evaluations}",
                ]
        _emit(lines, args.out)
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
