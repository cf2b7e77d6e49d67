"""Error metrics, convergence sweeps and the accuracy/cost benchmark."""

from __future__ import annotations

import enum
import io
import logging
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence, TextIO

import numpy as np

from .ivp import ExampleProblem
from .solver import collocation_eval, collocation_solve, nystrom_eval, nystrom_solve
from .transform import Interval, TransformKind, build_grid

__all__ = [
    "MethodId",
    "ConvergenceRecord",
    "ConvergenceReport",
    "BenchmarkResult",
    "MeshEvaluationError",
    "evaluation_mesh",
    "max_error",
    "run_method",
    "convergence_sweep",
    "accuracy_benchmark",
    "emit_csv",
    "emit_benchmark_csv",
    "CSV_HEADER",
    "MESH_NOTE",
]

log = logging.getLogger(__name__)

DEFAULT_POINTS = 999
CSV_HEADER = "method,N,h,max_error,solve_time_s,eval_time_s"
BENCH_HEADER = "method,N_needed,h,max_error,solve_time_s,eval_time_s,total_time_s,saturated"
MESH_NOTE = "mesh: 999 interior points t_l = a + l*(b-a)/1000, l = 1..999"

# Errors a single (method, N) cell may raise without aborting a sweep:
# bad step-size parameters, singular systems, non-finite coefficients.
_CELL_ERRORS = (ValueError, ArithmeticError)


class MethodId(enum.Enum):
    SE_NYSTROM = "se-nystrom"
    SE_COLLOCATION = "se-collocation"
    DE_NYSTROM = "de-nystrom"
    DE_COLLOCATION = "de-collocation"

    @property
    def kind(self) -> TransformKind:
        return TransformKind.SE if self.name.startswith("SE") else TransformKind.DE

    @property
    def is_nystrom(self) -> bool:
        return self.name.endswith("NYSTROM")

    @classmethod
    def parse(cls, text: str) -> "MethodId":
        key = text.strip().lower().replace("_", "-")
        for m in cls:
            if m.value == key:
                return m
        raise ValueError(f"unknown method {text!r}; choose from {', '.join(m.value for m in cls)}")


class MeshEvaluationError(RuntimeError):
    def __init__(self, index: int, t: float, cause: Optional[BaseException] = None):
        self.index = index
        self.t = t
        msg = f"evaluation failed at mesh point l={index} (t={t!r})"
        if cause is not None:
            msg += f": {cause}"
        super().__init__(msg)


@dataclass(frozen=True)
class ConvergenceRecord:
    method: MethodId
    N: int
    h: float
    max_error: float
    solve_time_s: float
    eval_time_s: float
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.error is not None


@dataclass
class ConvergenceReport:
    records: list = field(default_factory=list)

    def __iter__(self):
        return iter(self.records)

    def __len__(self):
        return len(self.records)

    def errors(self, method: MethodId) -> dict:
        return {r.N: r.max_error for r in self.records if r.method is method}


@dataclass(frozen=True)
class BenchmarkResult:
    method: MethodId
    N_needed: int
    h: float
    max_error: float
    solve_time_s: float
    eval_time_s: float
    saturated: bool = False

    @property
    def total_time_s(self) -> float:
        return self.solve_time_s + self.eval_time_s


def evaluation_mesh(iv: Interval, points: int = DEFAULT_POINTS) -> np.ndarray:
    """``points`` equispaced interior points ``a + l (b-a)/(points+1)``."""
    l = np.arange(1, points + 1)
    return iv.a + l * (iv.b - iv.a) / (points + 1)


def _locate_failure(evaluator, mesh):
    for l, t in enumerate(mesh, start=1):
        try:
            v = np.asarray(evaluator(np.array([t])))
        except Exception as exc:
            raise MeshEvaluationError(l, float(t), exc) from exc
        if not np.all(np.isfinite(v)):
            raise MeshEvaluationError(l, float(t), ArithmeticError("non-finite value"))


def _evaluate(evaluator, mesh):
    try:
        values = np.asarray(evaluator(mesh), dtype=float)
    except Exception:
        _locate_failure(evaluator, mesh)
        raise
    if not np.all(np.isfinite(values)):
        _locate_failure(evaluator, mesh)
    return values.reshape(mesh.size, -1)


def max_error(evaluator: Callable, exact: Callable, interval: Interval, points: int = DEFAULT_POINTS) -> float:
    """Largest componentwise absolute difference over the interior mesh.

    Both callables take an array of ``t`` and return shape ``(len(t), n)``.
    """
    mesh = evaluation_mesh(interval, points)
    approx = _evaluate(evaluator, mesh)
    ref = _evaluate(exact, mesh)
    return float(np.max(np.abs(approx - ref)))


def run_method(example: ExampleProblem, method: MethodId, N: int):
    """Build the grid and solve; returns ``(grid, evaluator)``."""
    grid = build_grid(method.kind, example.problem.interval, example.params(method.kind), N)
    if method.is_nystrom:
        sol = nystrom_solve(example.problem, grid)
        return grid, lambda t: nystrom_eval(sol, t)
    sol = collocation_solve(example.problem, grid)
    return grid, lambda t: collocation_eval(sol, t)


def _timed_cell(example, method, N, points, repeats):
    mesh = evaluation_mesh(example.problem.interval, points)
    ref = _evaluate(example.exact, mesh)
    solve_times, eval_times = [], []
    for _ in range(max(1, repeats)):
        t0 = time.perf_counter()
        grid, evaluator = run_method(example, method, N)
        t1 = time.perf_counter()
        approx = _evaluate(evaluator, mesh)
        t2 = time.perf_counter()
        solve_times.append(t1 - t0)
        eval_times.append(t2 - t1)
    err = float(np.max(np.abs(approx - ref)))
    return grid.h, err, statistics.median(solve_times), statistics.median(eval_times)


def _sweep_cell(example, method, N, points, repeats):
    try:
        h, err, ts, te = _timed_cell(example, method, N, points, repeats)
    except (_CELL_ERRORS + (MeshEvaluationError,)) as exc:
        log.warning("%s N=%d failed: %s", method.name, N, exc)
        return ConvergenceRecord(method, N, float("nan"), float("nan"), 0.0, 0.0, error=str(exc))
    return ConvergenceRecord(method, N, h, err, ts, te)


def convergence_sweep(
    example: ExampleProblem,
    methods: Iterable[MethodId],
    N_list: Sequence[int],
    *,
    jobs: int = 1,
    repeats: int = 3,
    points: int = DEFAULT_POINTS,
) -> ConvergenceReport:
    """One record per (method, N), ordered method-major as given.

    Failed cells are kept as records with ``error`` set and NaN metrics.
    """
    N_list = list(N_list)
    if any(b < a for a, b in zip(N_list, N_list[1:])):
        raise ValueError("N_list must be ascending")
    cells = [(m, N) for m in methods for N in N_list]
    if jobs > 1 and len(cells) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(lambda c: _sweep_cell(example, c[0], c[1], points, repeats), cells))
    else:
        records = [_sweep_cell(example, m, N, points, repeats) for m, N in cells]
    return ConvergenceReport(records)


def _error_at(example, method, N, points, cache):
    if N not in cache:
        try:
            _, evaluator = run_method(example, method, N)
            cache[N] = max_error(evaluator, example.exact, example.problem.interval, points)
        except (_CELL_ERRORS + (MeshEvaluationError,)) as exc:
            log.info("%s N=%d unusable in search: %s", method.name, N, exc)
            cache[N] = float("inf")
    return cache[N]


def _search_N(example, method, target, n_max, points):
    """Smallest N with error <= target: doubling from 1, then bisection."""
    cache: dict = {}
    lo, hi = 0, 1
    while _error_at(example, method, hi, points, cache) > target:
        if hi >= n_max:
            return n_max, True
        lo, hi = hi, min(2 * hi, n_max)
    # invariant: error(lo) > target (or lo == 0), error(hi) <= target
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _error_at(example, method, mid, points, cache) <= target:
            hi = mid
        else:
            lo = mid
    return hi, False


def accuracy_benchmark(
    example: ExampleProblem,
    target: float = 1e-8,
    methods: Iterable[MethodId] = tuple(MethodId),
    *,
    n_max: int = 512,
    repeats: int = 3,
    points: int = DEFAULT_POINTS,
) -> list:
    """N needed per method to reach ``target`` maximum error, with the
    median wall time of solving plus evaluating on the mesh at that N."""
    if not target > 0:
        raise ValueError(f"target must be positive, got {target}")
    results = []
    for method in methods:
        N, saturated = _search_N(example, method, target, n_max, points)
        try:
            _timed_cell(example, method, N, points, 1)  # warm-up
            h, err, ts, te = _timed_cell(example, method, N, points, repeats)
        except (_CELL_ERRORS + (MeshEvaluationError,)):
            h, err, ts, te = float("nan"), float("inf"), 0.0, 0.0
        results.append(BenchmarkResult(method, N, h, err, ts, te, saturated))
    return results


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _write(lines, sink: Optional[TextIO]) -> str:
    text = "".join(line + "\n" for line in lines)
    if sink is not None:
        sink.write(text)
    return text


def emit_csv(report: ConvergenceReport, sink: Optional[TextIO] = None, comments: Sequence[str] = ()) -> str:
    """Format ``report`` as CSV; failed cells show ``nan`` metrics.

    ``comments`` become leading ``#`` lines.  The text is returned and, if
    ``sink`` is given, also written to it.
    """
    lines = [f"# {c}" for c in comments]
    lines.append(CSV_HEADER)
    for r in report:
        lines.append(
            ",".join([r.method.name, _fmt(r.N), _fmt(r.h), _fmt(r.max_error), _fmt(r.solve_time_s), _fmt(r.eval_time_s)])
        )
    return _write(lines, sink)


def emit_benchmark_csv(results, sink: Optional[TextIO] = None, comments: Sequence[str] = ()) -> str:
    lines = [f"# {c}" for c in comments]
    lines.append(BENCH_HEADER)
    for r in results:
        fields = [r.N_needed, r.h, r.max_error, r.solve_time_s, r.eval_time_s, r.total_time_s, r.saturated]
        lines.append(",".join([r.method.name] + [_fmt(v) for v in fields]))
    return _write(lines, sink)


def format_table(results) -> str:
    """Plain-text Table-1 style summary for terminals."""
    buf = io.StringIO()
    names = [r.method.value for r in results]
    width = max(14, *(len(n) for n in names)) + 2
    buf.write("".ljust(10) + "".join(n.rjust(width) for n in names) + "\n")
    buf.write("N".ljust(10) + "".join(str(r.N_needed).rjust(width) for r in results) + "\n")
    buf.write("time [s]".ljust(10) + "".join(f"{r.total_time_s:.3f}".rjust(width) for r in results) + "\n")
    return buf.getvalue()
