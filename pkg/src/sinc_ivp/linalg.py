"""Dense linear algebra for the Sinc-Nystrom / Sinc-collocation systems.

Matrices are plain 2-D float numpy arrays.  The system is assembled dense and
solved by one LU factorization, O(m^3) with m = (2N+1) n.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sinc_kernel import sigma

__all__ = [
    "SingularMatrixError",
    "AssemblyError",
    "LuFactors",
    "build_imatrix",
    "lu_factor",
    "lu_solve",
    "integration_matrix",
    "assemble_system",
]


class SingularMatrixError(ArithmeticError):
    pass


class AssemblyError(ValueError):
    pass


def build_imatrix(N: int) -> np.ndarray:
    """Toeplitz matrix ``[sigma_{i-j}]``, i, j = -N..N.

    Only the 4N+1 distinct weights are computed.
    """
    k = np.arange(-2 * N, 2 * N + 1)
    s = np.asarray(sigma(k), dtype=float).reshape(-1)
    i = np.arange(2 * N + 1)
    # entry (i, j) = sigma_{i-j}; sigma_k sits at position k + 2N
    return s[(i[:, None] - i[None, :]) + 2 * N]


@dataclass(frozen=True)
class LuFactors:
    """Packed ``L\\U`` (unit lower triangle implied) with ``P A = L U``."""

    lu: np.ndarray
    perm: np.ndarray
    sign: int


def lu_factor(A) -> LuFactors:
    """LU factorization with partial pivoting.

    Raises
    ------
    SingularMatrixError
        If a pivot is exactly zero after row exchange.
    """
    a = np.array(A, dtype=float, copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"lu_factor needs a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    m = a.shape[0]
    perm = np.arange(m)
    sign = 1
    for k in range(m):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if a[p, k] == 0.0:
            raise SingularMatrixError(f"matrix is singular: zero pivot in column {k}")
        if p != k:
            a[[k, p]] = a[[p, k]]
            perm[[k, p]] = perm[[p, k]]
            sign = -sign
        a[k + 1 :, k] /= a[k, k]
        a[k + 1 :, k + 1 :] -= np.outer(a[k + 1 :, k], a[k, k + 1 :])
    return LuFactors(a, perm, sign)


def lu_solve(f: LuFactors, b) -> np.ndarray:
    b = np.asarray(b, dtype=float)
    m = f.lu.shape[0]
    if b.shape != (m,):
        raise ValueError(f"right-hand side has shape {b.shape}, expected ({m},)")
    y = b[f.perm].copy()
    lu = f.lu
    for i in range(1, m):
        y[i] -= lu[i, :i] @ y[:i]
    for i in range(m - 1, -1, -1):
        y[i] = (y[i] - lu[i, i + 1 :] @ y[i + 1 :]) / lu[i, i]
    return y


def integration_matrix(grid) -> np.ndarray:
    """``h I^(-1) D``: maps node values of f to the Sinc indefinite integral
    of f evaluated back at the nodes."""
    return grid.h * build_imatrix(grid.N) * grid.dweights[None, :]


def _sample(prob, grid):
    n, size = prob.n, grid.size
    K = np.empty((n, n, size))
    G = np.empty((n, size))
    for k, node in enumerate(grid.nodes):
        kk = np.asarray(prob.coeff(node), dtype=float)
        gg = np.asarray(prob.forcing(node), dtype=float)
        if kk.shape != (n, n) or gg.shape != (n,):
            raise AssemblyError(
                f"node {k - grid.N}: coeff/forcing shapes {kk.shape}/{gg.shape}, expected ({n},{n})/({n},)"
            )
        if not (np.all(np.isfinite(kk)) and np.all(np.isfinite(gg))):
            raise AssemblyError(f"non-finite K or g at node j={k - grid.N} (t={node.t!r})")
        K[:, :, k] = kk
        G[:, k] = gg
    return K, G


def assemble_system(grid, prob, B=None):
    """Assemble ``(I_n x I_N - (I_n x B)[K_ij]) Y = (I_n x B) G + R``.

    Unknowns are ordered component-major: all 2N+1 node values of y_1, then
    y_2, and so on.

    Returns
    -------
    A : ndarray, shape (m, m)
    rhs : ndarray, shape (m,)
    """
    if grid.interval != prob.interval:
        raise ValueError(f"grid interval {grid.interval} differs from problem interval {prob.interval}")
    if B is None:
        B = integration_matrix(grid)
    K, G = _sample(prob, grid)
    n, size = prob.n, grid.size
    m = n * size
    A = np.zeros((m, m))
    rhs = np.empty(m)
    r = np.asarray(prob.init, dtype=float)
    for i in range(n):
        rows = slice(i * size, (i + 1) * size)
        for j in range(n):
            cols = slice(j * size, (j + 1) * size)
            # 0.0 - x rather than -x: a zero kernel must give +0.0, not -0.0
            block = 0.0 - B * K[i, j][None, :]
            if i == j:
                block[np.diag_indices(size)] += 1.0
            A[rows, cols] = block
        rhs[rows] = B @ G[i] + r[i]
    return A, rhs
