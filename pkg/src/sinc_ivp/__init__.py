"""Sinc-Nystrom and Sinc-collocation methods (SE and DE variants) for
systems of linear initial value problems on a finite interval."""

from .harness import MethodId, accuracy_benchmark, convergence_sweep, emit_csv, max_error
from .ivp import (
    EXAMPLES,
    PI_MINUS,
    ExampleProblem,
    IvpProblem,
    example_dense_singularities,
    example_exponential,
    example_halm,
    example_singular,
    get_example,
)
from .solver import collocation_eval, collocation_solve, nystrom_eval, nystrom_solve, solve_system
from .transform import Interval, NodePoint, RegularityParams, SincGrid, TransformKind, build_grid, step_size

__version__ = "0.1.0"
