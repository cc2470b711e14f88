"""Seeded instance generation, Monte Carlo sweeps, and recovery metrics.

A trial is keyed by (master seed, trial index, n, m, k), so any worker can
regenerate it independently and results never depend on scheduling.  Every
method sees the identical instance at a given key, which makes success-rate
comparisons paired rather than merely distributionally matched.
"""

import math
import multiprocessing
import time
from dataclasses import dataclass

import numpy as np

from . import baselines, solvers
from .errors import NumericalError
from .rng import make_generator, trial_entropy

METHOD_NAMES = ("np0", "np1", "sbl", "irls", "bp")

SUCCESS_THRESHOLD = 1e-3
MSE_DB_FLOOR = -320.0

_SOLVER_FUNCS = {
    "np0": solvers.run_np0,
    "np1": solvers.run_np1,
    "sbl": baselines.sbl_recover,
    "irls": baselines.irls_recover,
    "bp": baselines.bp_recover,
}


@dataclass(frozen=True)
class ProblemInstance:
    """One noise-free recovery problem: y = A @ x0 with k-sparse x0."""

    a: np.ndarray
    y: np.ndarray
    x0: np.ndarray
    k: int
    seed: tuple


@dataclass(frozen=True)
class TrialRecord:
    """Outcome of one (instance, method) pair."""

    trial_index: int
    sweep_value: int
    method: str
    seed: tuple
    rel_error: float
    success: bool
    iterations: int
    seconds: float
    mse_db: float
    termination: str


@dataclass(frozen=True)
class GridPoint:
    """Aggregates over the trials of one (sweep value, method) cell."""

    sweep_value: int
    method: str
    success_rate: float
    mean_mse_db: float
    mean_iterations: float
    mean_seconds: float


@dataclass(frozen=True)
class AxisSpec:
    """The axis held fixed during a sweep: name 'k' or 'm' plus its value."""

    name: str
    value: int

    def __post_init__(self):
        if self.name not in ("k", "m"):
            raise ValueError(f"axis name must be 'k' or 'm', got {self.name!r}")
        if int(self.value) < 1:
            raise ValueError(f"axis value must be >= 1, got {self.value}")
        object.__setattr__(self, "value", int(self.value))


@dataclass(frozen=True)
class ExperimentGrid:
    """Full sweep output: per-cell aggregates plus every trial record."""

    n: int
    fixed_axis: str
    fixed_value: int
    sweep_axis: str
    sweep_values: tuple
    methods: tuple
    trials: int
    master_seed: int
    points: tuple
    records: tuple


@dataclass(frozen=True)
class TraceTable:
    """Per-method convergence traces on one shared instance.

    rows hold (method, iteration, rel_change, mse_db, cumulative seconds);
    results maps method name to the full RecoveryResult.
    """

    n: int
    m: int
    k: int
    seed: int
    methods: tuple
    rows: tuple
    results: dict


def generate_instance(n, m, k, seed):
    """Draw a standard-normal A, a k-sparse standard-normal x0, and y = A x0.

    Support indices are uniform without replacement.  The draw order (A,
    then support, then values) is fixed so a seed pins the instance forever.
    """
    n, m, k = int(n), int(m), int(k)
    if not 1 <= k <= m <= n:
        raise ValueError(f"need 1 <= k <= m <= n, got k={k}, m={m}, n={n}")
    rng = make_generator(seed)
    a = rng.standard_normal((m, n))
    support = rng.choice(n, size=k, replace=False)
    values = rng.standard_normal(k)
    while np.any(values == 0.0):
        zeros = values == 0.0
        values[zeros] = rng.standard_normal(int(np.count_nonzero(zeros)))
    x0 = np.zeros(n)
    x0[support] = values
    y = a @ x0
    stored = seed if isinstance(seed, tuple) else (int(seed),)
    return ProblemInstance(a=a, y=y, x0=x0, k=k, seed=stored)


def relative_error(x_hat, x0):
    """Euclidean relative error ||x_hat - x0|| / ||x0||."""
    x_hat = np.asarray(x_hat, dtype=np.float64)
    x0 = np.asarray(x0, dtype=np.float64)
    denom = float(np.linalg.norm(x0))
    if denom == 0.0:
        raise ValueError("ground truth must be nonzero")
    return float(np.linalg.norm(x_hat - x0)) / denom


def _mse_db_from_rel(rel):
    if rel <= 0.0:
        return MSE_DB_FLOOR
    return max(20.0 * math.log10(rel), MSE_DB_FLOOR)


def mse_db(x_hat, x0):
    """Recovery error in decibels, 20 log10 of the relative error, floored
    at -320 dB so an exact hit stays finite."""
    return _mse_db_from_rel(relative_error(x_hat, x0))


def default_method_config(method):
    """The config each method runs with when none is supplied.

    Experiments measure each method at its own fixed point, so the stop
    threshold here is tighter than the SolverConfig default: near the
    recovery boundary the alternating updates contract slowly and a 1e-3
    relative-change stop fires well before the iterate settles.
    """
    if method in ("np0", "np1"):
        return solvers.SolverConfig(epsilon=1e-6)
    return baselines.default_config(method)


def run_method(method, a, y, config=None, x_true=None):
    """Dispatch one recovery by method name."""
    try:
        func = _SOLVER_FUNCS[method]
    except KeyError:
        raise ValueError(
            f"unknown method {method!r}, expected one of {METHOD_NAMES}"
        ) from None
    if config is None:
        config = default_method_config(method)
    return func(a, y, config=config, x_true=x_true)


def _check_methods(methods):
    methods = tuple(methods)
    if not methods:
        raise ValueError("at least one method is required")
    for name in methods:
        if name not in _SOLVER_FUNCS:
            raise ValueError(
                f"unknown method {name!r}, expected one of {METHOD_NAMES}"
            )
    if len(set(methods)) != len(methods):
        raise ValueError(f"duplicate method in {methods}")
    return methods


def _run_sweep_item(args):
    # One work unit: a single (sweep value, trial index) instance pushed
    # through every method.  Self-contained so it can run in any process.
    (master_seed, trial_index, n, m, k, sweep_value,
     methods, configs, measure_time) = args
    entropy = trial_entropy(master_seed, trial_index, n, m, k)
    inst = generate_instance(n, m, k, entropy)
    records = []
    for method in methods:
        start = time.monotonic()
        try:
            result = run_method(method, inst.a, inst.y, config=configs[method])
            x_hat = result.x_hat
            iterations = result.iterations
            termination = result.termination
        except NumericalError:
            # A pre-loop breakdown still counts as an ordinary failed trial.
            x_hat = np.zeros(n)
            iterations = 0
            termination = solvers.NUMERICAL_FAILURE
        seconds = time.monotonic() - start if measure_time else 0.0
        rel = relative_error(x_hat, inst.x0)
        records.append(TrialRecord(
            trial_index=trial_index,
            sweep_value=sweep_value,
            method=method,
            seed=entropy,
            rel_error=rel,
            success=rel < SUCCESS_THRESHOLD,
            iterations=iterations,
            seconds=seconds,
            mse_db=_mse_db_from_rel(rel),
            termination=termination,
        ))
    return records


def run_phase_sweep(fixed, sweep_values, methods, trials=300, master_seed=0,
                    n=100, configs=None, workers=1, measure_time=False):
    """Paired Monte Carlo sweep along one problem axis.

    ``fixed`` pins k or m; ``sweep_values`` enumerate the other axis.  Each
    (sweep value, trial index) pair seeds one instance that every method
    solves, and per-cell success rates aggregate over ``trials`` instances.
    With ``measure_time`` off (the default), recorded seconds are 0.0 so the
    returned grid is bit-identical across runs and worker counts; turn it on
    only for wall-time studies.  A trial that ends in numerical failure
    counts as an ordinary non-success.
    """
    if not isinstance(fixed, AxisSpec):
        raise TypeError("fixed must be an AxisSpec")
    methods = _check_methods(methods)
    trials = int(trials)
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    n = int(n)
    workers = int(workers)
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    master_seed = int(master_seed)
    sweep_values = tuple(int(v) for v in sweep_values)
    if not sweep_values:
        raise ValueError("sweep_values must be non-empty")
    full_configs = {}
    for method in methods:
        if configs is not None and method in configs:
            full_configs[method] = configs[method]
        else:
            full_configs[method] = default_method_config(method)
    sweep_axis = "m" if fixed.name == "k" else "k"
    cells = []
    for value in sweep_values:
        m = value if sweep_axis == "m" else fixed.value
        k = value if sweep_axis == "k" else fixed.value
        if not 1 <= k <= m <= n:
            raise ValueError(
                f"sweep point k={k}, m={m} violates 1 <= k <= m <= n={n}"
            )
        cells.append((value, m, k))
    items = [
        (master_seed, trial_index, n, m, k, value, methods, full_configs,
         measure_time)
        for value, m, k in cells
        for trial_index in range(trials)
    ]
    if workers == 1:
        grouped = [_run_sweep_item(item) for item in items]
    else:
        with multiprocessing.Pool(workers) as pool:
            grouped = pool.map(_run_sweep_item, items)
    records = tuple(rec for group in grouped for rec in group)
    points = []
    for value, _, _ in cells:
        for method in methods:
            cell = [r for r in records
                    if r.sweep_value == value and r.method == method]
            successes = sum(1 for r in cell if r.success)
            points.append(GridPoint(
                sweep_value=value,
                method=method,
                success_rate=successes / trials,
                mean_mse_db=sum(r.mse_db for r in cell) / trials,
                mean_iterations=sum(r.iterations for r in cell) / trials,
                mean_seconds=sum(r.seconds for r in cell) / trials,
            ))
    return ExperimentGrid(
        n=n,
        fixed_axis=fixed.name,
        fixed_value=fixed.value,
        sweep_axis=sweep_axis,
        sweep_values=sweep_values,
        methods=methods,
        trials=trials,
        master_seed=master_seed,
        points=tuple(points),
        records=records,
    )


def run_convergence_trace(n, m, k, methods, seed, configs=None):
    """Run every method on one shared seeded instance, tracking per-iteration
    error against the ground truth.  Trace seconds are real (monotonic clock
    around each solver's own loop)."""
    methods = _check_methods(methods)
    n, m, k, seed = int(n), int(m), int(k), int(seed)
    entropy = trial_entropy(seed, 0, n, m, k)
    inst = generate_instance(n, m, k, entropy)
    rows = []
    results = {}
    for method in methods:
        config = None if configs is None else configs.get(method)
        result = run_method(method, inst.a, inst.y, config=config,
                            x_true=inst.x0)
        results[method] = result
        for row in result.trace:
            rows.append((method, row.iteration, row.rel_change,
                         _mse_db_from_rel(row.rel_error), row.seconds))
    return TraceTable(n=n, m=m, k=k, seed=seed, methods=methods,
                      rows=tuple(rows), results=results)
