import filecmp
import math

import pytest

from crmc import CSV_HEADER, make_scheme
from crmc.bench import (
    _parse_n_grid,
    main,
    make_scheme_from_text,
    print_constants,
    run_auto_trial,
    run_sweep,
)


def rows_of(lines):
    return [ln for ln in lines[1:] if not ln.startswith("#")]


def test_header_schema():
    assert CSV_HEADER == "algo,problem,r,N,rep,seed,estimate,abs_error,eval_count"


def test_make_scheme_from_text():
    assert make_scheme_from_text(2, "equispaced").nodes == (0.0, 1.0)
    g = make_scheme_from_text(2, "gauss")
    assert not g.endpoint_sharing
    c = make_scheme_from_text(2, "0.25,0.75")
    assert c.nodes == (0.25, 0.75)
    with pytest.raises(ValueError):
        make_scheme_from_text(2, "nonsense")


def test_parse_n_grid():
    grid = _parse_n_grid("100:10000:5")
    assert grid[0] == 100 and grid[-1] == 10000
    assert list(grid) == sorted(set(grid))
    with pytest.raises(ValueError):
        _parse_n_grid("100:10")


def test_run_sweep_shape_and_parse():
    s = make_scheme(2)
    lines = run_sweep("nonadaptive", "exp", s, [100, 200], reps=3, seed=7)
    assert lines[0] == CSV_HEADER
    body = rows_of(lines)
    assert len(body) == 6
    for row in body:
        algo, prob, r, N, rep, seed, est, err, evals = row.split(",")
        assert algo == "nonadaptive" and prob == "exp"
        assert int(r) == 2 and int(N) in (100, 200)
        assert 0 <= int(rep) < 3 and int(seed) == 7
        assert math.isfinite(float(est)) and float(err) >= 0.0
        assert int(evals) > 0
    summaries = [ln for ln in lines if ln.startswith("# summary")]
    assert len(summaries) == 2
    assert "rms=" in summaries[0] and "thm1=" in summaries[0]


def test_run_sweep_replications_differ():
    s = make_scheme(2)
    lines = run_sweep("crude", "exp", s, [400], reps=4, seed=1)
    ests = [row.split(",")[6] for row in rows_of(lines)]
    assert len(set(ests)) == 4


def test_run_sweep_reproducible():
    s = make_scheme(2)
    a = run_sweep("importance", "logsing", s, [200, 500], reps=2, seed=5)
    b = run_sweep("importance", "logsing", s, [200, 500], reps=2, seed=5)
    assert a == b
    c = run_sweep("importance", "logsing", s, [200, 500], reps=2, seed=6)
    assert a != c


def test_run_sweep_overlay_nan_without_derivative():
    s = make_scheme(2)
    lines = run_sweep("crude", "cos100", s, [100], reps=2, seed=3)
    summary = [ln for ln in lines if ln.startswith("# summary")][0]
    assert "thm1=nan" in summary


def test_run_sweep_validation():
    s = make_scheme(2)
    with pytest.raises(ValueError):
        run_sweep("unknown", "exp", s, [100], 1, 0)
    with pytest.raises(ValueError):
        run_sweep("crude", "exp", s, [100], 0, 0)


def test_run_auto_trial_summary():
    s = make_scheme(2)
    lines = run_auto_trial("exp", s, epsilon=1e-2, delta=0.1, reps=5, seed=11)
    assert lines[0] == CSV_HEADER
    assert len(rows_of(lines)) == 5
    summary = lines[-1]
    assert summary.startswith("# summary algo=auto")
    assert "breaches=0" in summary
    assert "N_epsilon=" in summary and "l_tilde=" in summary


def test_print_constants_table():
    lines = print_constants(2)
    text = "\n".join(lines)
    assert "alpha\t0.182574185835" in text
    assert "kstar\t4.2500918995" in text
    lines = print_constants(2, "gauss")
    beta_line = [ln for ln in lines if ln.startswith("beta")][0]
    assert abs(float(beta_line.split("\t")[1])) < 1e-15


def test_print_constants_problem_block():
    lines = print_constants(4, "equispaced", problem="logsing")
    text = "\n".join(lines)
    assert "reference\t" in text
    assert "ratio_thm1_thm2\t5.7434207022" in text


# ------------------------------------------------------------------ CLI

def test_cli_sweep_writes_identical_files(tmp_path):
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = [
        "sweep", "--algo", "importance", "--problem", "logsing", "--r", "2",
        "--N", "300", "--reps", "3", "--seed", "9",
    ]
    assert main(argv + ["--out", str(out1)]) == 0
    assert main(argv + ["--out", str(out2)]) == 0
    assert filecmp.cmp(out1, out2, shallow=False)
    assert out1.read_text().splitlines()[0] == CSV_HEADER


def test_cli_sweep_stdout(capsys):
    rc = main(["sweep", "--algo", "crude", "--problem", "poly(3)", "--r", "2",
               "--N", "50", "--reps", "2", "--seed", "0"])
    assert rc == 0
    out = capsys.readouterr().out
    assert out.startswith(CSV_HEADER)


def test_cli_rejects_unknown_problem(capsys):
    rc = main(["sweep", "--algo", "crude", "--problem", "nope", "--r", "2",
               "--N", "50", "--reps", "1", "--seed", "0"])
    assert rc == 2
    assert "error:" in capsys.readouterr().err


def test_cli_sweep_needs_one_budget_flag(capsys):
    rc = main(["sweep", "--algo", "crude", "--problem", "exp", "--r", "2",
               "--reps", "1", "--seed", "0"])
    assert rc == 2
    rc = main(["sweep", "--algo", "crude", "--problem", "exp", "--r", "2",
               "--N", "50", "--n-grid", "10:100:3", "--reps", "1", "--seed", "0"])
    assert rc == 2


def test_cli_auto(capsys):
    rc = main(["auto", "--problem", "exp", "--r", "2", "--eps", "1e-2",
               "--delta", "0.1", "--reps", "3", "--seed", "5"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "algo=auto" in out and "breaches=" in out


def test_cli_constants(capsys):
    rc = main(["constants", "--r", "2"])
    assert rc == 0
    assert "alpha" in capsys.readouterr().out


def test_cli_partition_dump(capsys):
    rc = main(["partition", "--problem", "logsing", "--r", "2", "--N", "8", "--dump"])
    assert rc == 0
    data = capsys.readouterr().out.splitlines()
    assert len(data) == 8
    for ln in data:
        left, right, d, prio = (float(t) for t in ln.split("\t"))
        assert left < right


def test_cli_partition_threshold(capsys):
    rc = main(["partition", "--problem", "exp", "--r", "2", "--eps", "1e-4"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "m\t" in out and "l_tilde\t" in out and "evaluations\t" in out


def test_cli_partition_budget_flags_exclusive(capsys):
    rc = main(["partition", "--problem", "exp", "--r", "2"])
    assert rc == 2
    rc = main(["partition", "--problem", "exp", "--r", "2", "--N", "8", "--eps", "0.1"])
    assert rc == 2


def test_cli_scientific_notation_accepted(tmp_path):
    out = tmp_path / "c.csv"
    rc = main(["sweep", "--algo", "crude", "--problem", "exp", "--r", "2",
               "--N", "100", "--reps", "1", "--seed", "0", "--delta-reg", "1e-6",
               "--out", str(out)])
    assert rc == 0
