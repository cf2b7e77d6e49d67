"""Command-line entry point ``sinc-ivp``.

Exit codes: 0 success, 2 bad arguments, 3 solver failure (every requested
cell failed).
"""

from __future__ import annotations

import argparse
import contextlib
import logging
import sys

import numpy as np

from .harness import (
    MESH_NOTE,
    MethodId,
    accuracy_benchmark,
    convergence_sweep,
    emit_benchmark_csv,
    emit_csv,
    evaluation_mesh,
    format_table,
    run_method,
)
from .ivp import EXAMPLES, get_example

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SOLVER = 3


def _methods(text: str) -> list:
    if text.strip().lower() == "all":
        return list(MethodId)
    try:
        return [MethodId.parse(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _int_list(text: str) -> list:
    try:
        values = [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if any(v < 1 for v in values):
        raise argparse.ArgumentTypeError("N values must be positive")
    return sorted(values)


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sinc-ivp",
        description="SE/DE Sinc-Nystrom and Sinc-collocation solvers for linear IVPs on finite intervals.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    examples = sorted(EXAMPLES)

    p = sub.add_parser("solve", help="solve one example and tabulate the solution on a mesh")
    p.add_argument("--example", required=True, choices=examples)
    p.add_argument("--method", required=True, type=MethodId.parse, metavar="{" + "|".join(m.value for m in MethodId) + "}")
    p.add_argument("--N", required=True, type=_positive_int)
    p.add_argument("--points", type=_positive_int, default=999)
    p.add_argument("--output", help="CSV path (default: stdout)")

    p = sub.add_parser("converge", help="maximum error versus N for several methods")
    p.add_argument("--example", required=True, choices=examples)
    p.add_argument("--methods", type=_methods, default=list(MethodId), help="'all' or comma-separated method names")
    p.add_argument("--N", required=True, type=_int_list, help="comma-separated N values")
    p.add_argument("--jobs", type=_positive_int, default=1)
    p.add_argument("--repeats", type=_positive_int, default=3, help="timing repetitions (median is reported)")
    p.add_argument("--output")

    p = sub.add_parser("bench", help="N and time needed to reach a target accuracy")
    p.add_argument("--example", required=True, choices=examples)
    p.add_argument("--target", type=_positive_float, default=1e-8)
    p.add_argument("--methods", type=_methods, default=list(MethodId))
    p.add_argument("--n-max", type=_positive_int, default=512)
    p.add_argument("--output")
    return parser


@contextlib.contextmanager
def _sink(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _cmd_solve(args) -> int:
    example = get_example(args.example)
    try:
        _, evaluator = run_method(example, args.method, args.N)
        mesh = evaluation_mesh(example.problem.interval, args.points)
        approx = np.asarray(evaluator(mesh))
    except (ValueError, ArithmeticError) as exc:
        print(f"sinc-ivp: solver failed: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    exact = np.asarray(example.exact(mesh)).reshape(mesh.size, -1)
    n = exact.shape[1]
    header = (
        ["t"]
        + [f"y_{i + 1}" for i in range(n)]
        + [f"exact_{i + 1}" for i in range(n)]
        + [f"abs_err_{i + 1}" for i in range(n)]
    )
    with _sink(args.output) as out:
        out.write(f"# example={args.example} method={args.method.value} N={args.N}\n")
        out.write(",".join(header) + "\n")
        for t, y, e in zip(mesh, approx, exact):
            row = [t, *y, *e, *np.abs(y - e)]
            out.write(",".join(repr(float(v)) for v in row) + "\n")
    return EXIT_OK


def _cmd_converge(args) -> int:
    example = get_example(args.example)
    report = convergence_sweep(example, args.methods, args.N, jobs=args.jobs, repeats=args.repeats)
    with _sink(args.output) as out:
        emit_csv(report, out, comments=[f"example={args.example}", MESH_NOTE])
    if len(report) and all(r.failed for r in report):
        return EXIT_SOLVER
    return EXIT_OK


def _cmd_bench(args) -> int:
    example = get_example(args.example)
    results = accuracy_benchmark(example, args.target, args.methods, n_max=args.n_max)
    with _sink(args.output) as out:
        emit_benchmark_csv(results, out, comments=[f"example={args.example} target={args.target!r}", MESH_NOTE])
    if args.output is not None:
        sys.stderr.write(format_table(results))
    if results and all(not np.isfinite(r.max_error) for r in results):
        return EXIT_SOLVER
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    handlers = {"solve": _cmd_solve, "converge": _cmd_converge, "bench": _cmd_bench}
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
