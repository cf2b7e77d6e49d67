"""Sinc-Nystrom and Sinc-collocation solvers.

Both methods solve the same linear system for the node values ``Y`` and
differ only in how the solution is reconstructed between nodes:

* Nystrom: ``y(t) = r + sum_j {g(t_j) + K(t_j) Y_j} psi'(jh) J(j,h)(phi(t))``,
  which needs 2N+1 sine integrals per evaluation point.
* collocation: generalized Sinc interpolation of ``Y`` with the linear
  end-point functions ``w_a``, ``w_b``; elementary functions only.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from . import sinc_kernel
from .ivp import IvpProblem
from .linalg import assemble_system, integration_matrix, lu_factor, lu_solve
from .sinc_kernel import sinc_basis
from .transform import NodePoint, SincGrid

__all__ = [
    "NodeValues",
    "NystromSolution",
    "CollocationSolution",
    "EvaluationDomainError",
    "solve_system",
    "nystrom_solve",
    "nystrom_eval",
    "collocation_solve",
    "collocation_eval",
]

Point = Union[float, np.ndarray, NodePoint]


class EvaluationDomainError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class NodeValues:
    grid: SincGrid
    y: np.ndarray  # flat, component-major, length (2N+1) n
    residual: float = 0.0

    @property
    def n(self) -> int:
        return self.y.size // self.grid.size

    @property
    def blocks(self) -> np.ndarray:
        """Node values as shape ``(n, 2N+1)``; row i is component i."""
        return self.y.reshape(self.n, self.grid.size)


@dataclass(frozen=True, eq=False)
class NystromSolution:
    values: NodeValues
    problem: IvpProblem
    combo: np.ndarray  # shape (2N+1, n): g(t_j) + K(t_j) Y_j

    @property
    def grid(self) -> SincGrid:
        return self.values.grid


@dataclass(frozen=True, eq=False)
class CollocationSolution:
    values: NodeValues
    boundary: np.ndarray  # shape (n, 2): (y_{i,-N}, y_{i,N})

    @property
    def grid(self) -> SincGrid:
        return self.values.grid


def solve_system(prob: IvpProblem, grid: SincGrid) -> NodeValues:
    """Solve the discretized Volterra equation for the node values.

    Raises
    ------
    sinc_ivp.linalg.SingularMatrixError
        If the discrete system is singular (possible for small N).
    """
    A, rhs = assemble_system(grid, prob, integration_matrix(grid))
    y = lu_solve(lu_factor(A), rhs)
    res = float(np.max(np.abs(A @ y - rhs)))
    y.setflags(write=False)
    return NodeValues(grid, y, res)


def node_combination(prob: IvpProblem, values: NodeValues) -> np.ndarray:
    grid = values.grid
    Y = values.blocks
    combo = np.empty((grid.size, prob.n))
    for k, node in enumerate(grid.nodes):
        combo[k] = np.asarray(prob.forcing(node), dtype=float) + np.asarray(prob.coeff(node), dtype=float) @ Y[:, k]
    return combo


def nystrom_solve(prob: IvpProblem, grid: SincGrid) -> NystromSolution:
    values = solve_system(prob, grid)
    combo = node_combination(prob, values)
    combo.setflags(write=False)
    return NystromSolution(values, prob, combo)


def collocation_solve(prob: IvpProblem, grid: SincGrid) -> CollocationSolution:
    values = solve_system(prob, grid)
    Y = values.blocks
    boundary = np.stack([Y[:, 0], Y[:, -1]], axis=1)
    boundary.setflags(write=False)
    return CollocationSolution(values, boundary)


def _locate(grid: SincGrid, t: Point):
    """Split evaluation points into offsets from a and b.

    Returns ``(off_a, off_b, scalar)`` with 1-D offset arrays.
    """
    iv = grid.interval
    if isinstance(t, NodePoint):
        return np.array([t.off_a]), np.array([t.off_b]), True
    scalar = np.ndim(t) == 0
    tt = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(np.isnan(tt)) or np.any(tt < iv.a) or np.any(tt > iv.b):
        bad = tt[~((tt >= iv.a) & (tt <= iv.b))]
        raise EvaluationDomainError(f"evaluation point {bad[0]!r} outside [{iv.a}, {iv.b}]")
    return tt - iv.a, iv.b - tt, scalar


def _transformed(grid, off_a, off_b):
    """phi(t) for interior points; endpoints get a placeholder 0 and are masked."""
    at_a = off_a == 0.0
    at_b = off_b == 0.0
    inner = ~(at_a | at_b)
    x = np.zeros(off_a.shape)
    x[inner] = grid.to_x(off_a[inner], off_b[inner])
    return x, at_a, at_b


def nystrom_eval(sol: NystromSolution, t: Point) -> np.ndarray:
    """Evaluate the Nystrom solution at ``t`` (float, array, or NodePoint).

    Returns shape ``(n,)`` for a single point, ``(len(t), n)`` otherwise.
    """
    grid = sol.grid
    off_a, off_b, scalar = _locate(grid, t)
    x, at_a, at_b = _transformed(grid, off_a, off_b)
    weights = sol.combo * grid.dweights[:, None]
    u = np.pi * (x[:, None] / grid.h - grid.indices[None, :])
    J = grid.h * (0.5 + np.asarray(sinc_kernel.sine_integral(u)) / np.pi)
    # analytic limits: J -> 0 at a, J -> h at b
    J[at_a] = 0.0
    J[at_b] = grid.h
    out = sol.problem.init[None, :] + J @ weights
    return out[0] if scalar else out


def collocation_eval(sol: CollocationSolution, t: Point) -> np.ndarray:
    """Evaluate the collocation solution at ``t`` (float, array, or NodePoint).

    Returns shape ``(n,)`` for a single point, ``(len(t), n)`` otherwise.
    """
    grid = sol.grid
    length = grid.interval.length
    off_a, off_b, scalar = _locate(grid, t)
    x, at_a, at_b = _transformed(grid, off_a, off_b)
    Y = sol.values.blocks
    ya, yb = sol.boundary[:, 0], sol.boundary[:, 1]
    # coefficients of the Sinc part: Y minus its linear end-point interpolant
    wa_nodes = grid.off_b / length
    wb_nodes = grid.off_a / length
    coef = Y - ya[:, None] * wa_nodes[None, :] - yb[:, None] * wb_nodes[None, :]
    S = np.asarray(sinc_basis(grid.indices[None, :], grid.h, x[:, None]))
    S[at_a | at_b] = 0.0
    wa = off_b / length
    wb = off_a / length
    out = wa[:, None] * ya[None, :] + wb[:, None] * yb[None, :] + S @ coef.T
    return out[0] if scalar else out
