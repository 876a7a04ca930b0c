"""Randomized integration of smooth univariate functions.

Variance-reduced Monte Carlo estimators built on piecewise Lagrange
interpolation: a nonadaptive control-variate scheme, two adaptive schemes
(stratified allocation and importance sampling on a priority-driven dyadic
partition), and an automatic driver that meets a requested accuracy with a
requested confidence.  Exact scheme constants and error-asymptote constants
come with the package, together with a benchmark command line (crmc).
"""

from .bench import CSV_HEADER, main as bench_main, run_auto_trial, run_sweep
from .analysis import (
    TestProblem,
    built_in_problem_names,
    check_sign_definite,
    constant_thm1,
    constant_thm2,
    constant_thm3,
    cos100,
    estimate_kstar,
    exp_problem,
    logsing,
    make_problem,
    poly,
    reference_integral,
)
from .auto import (
    FLAG_EPSILON_ORDER,
    FLAG_EXACT_MODE,
    FLAG_MIN_BUDGET,
    AutoConfig,
    AutoReport,
    auto_integrate,
    auto_integrate_queue,
    c_hat_for,
    prepare_phase1,
    required_samples,
)
from .engines import (
    FLAG_NO_SAMPLING,
    FLAG_UNGROUPED_FALLBACK,
    FLAG_UNIFORM_FALLBACK,
    BudgetSplit,
    EstimateReport,
    NeumaierSum,
    RngStream,
    adaptive_importance,
    adaptive_stratified,
    crude_mc,
    default_group_count,
    nonadaptive_vr,
    split_budget,
)
from .partition import (
    MAX_DEPTH,
    DepthLimitError,
    IntervalRecord,
    Partition,
    l_tilde,
    partition_auto,
    partition_fixed,
    refine_auto,
    refine_fixed,
)
from .schemes import (
    InterpolationScheme,
    dd_from_values,
    divided_difference,
    equispaced_nodes,
    gauss_nodes,
    interpolant_integral,
    make_scheme,
    residual_eval,
)

__version__ = "0.1.0"
