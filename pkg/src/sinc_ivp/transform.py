"""SE/DE variable transformations and Sinc grids on a finite interval.

Points of ``(a, b)`` are carried as :class:`NodePoint`, which keeps the
distances to both endpoints alongside ``t``.  Near an endpoint ``t`` itself
rounds to ``a`` or ``b`` long before those distances lose precision, and the
DE transformation pushes nodes to within ~1e-300 of the ends.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "TransformKind",
    "Interval",
    "RegularityParams",
    "NodePoint",
    "SincGrid",
    "DomainError",
    "ParameterError",
    "TransformOverflowError",
    "se_forward",
    "se_inverse",
    "se_derivative",
    "de_forward",
    "de_inverse",
    "de_derivative",
    "inverse_from_offsets",
    "step_size",
    "build_grid",
]

# Offsets below the smallest subnormal are clamped so that 1/off stays finite;
# the derivative weight at such a node has already underflowed to zero.
_MIN_OFFSET = math.ulp(0.0)


class DomainError(ValueError):
    """A point lies outside the open interval where a map is defined."""


class ParameterError(ValueError):
    """Invalid regularity parameters or grid size."""


class TransformOverflowError(OverflowError):
    pass


class TransformKind(str, enum.Enum):
    SE = "SE"
    DE = "DE"


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ParameterError(f"interval endpoints must be finite, got [{self.a}, {self.b}]")
        if not self.a < self.b:
            raise ParameterError(f"interval needs a < b, got [{self.a}, {self.b}]")

    @property
    def length(self) -> float:
        return self.b - self.a


@dataclass(frozen=True)
class RegularityParams:
    """Hoelder exponent ``alpha`` and strip half-width ``d`` of the solution's
    analyticity domain.  Which ``d`` is admissible depends on the transform,
    see :meth:`check`."""

    alpha: float
    d: float

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ParameterError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not self.d > 0.0:
            raise ParameterError(f"d must be positive, got {self.d}")

    def check(self, kind: TransformKind) -> None:
        bound = math.pi if kind is TransformKind.SE else math.pi / 2
        if not self.d < bound:
            raise ParameterError(f"{kind.value} transform needs d < {bound:.6g}, got {self.d}")


@dataclass(frozen=True)
class NodePoint:
    t: float
    off_a: float
    off_b: float


def _logistic_pair(z):
    """Return (1/(1+e^-z), 1/(1+e^z)) without cancellation in either."""
    e = np.exp(-np.abs(z))
    big = 1.0 / (1.0 + e)
    small = e / (1.0 + e)
    pos = z >= 0
    return np.where(pos, big, small), np.where(pos, small, big)


def _log_sech2_quarter(z):
    """log of s(1-s) with s = 1/(1+e^-z), i.e. log(1/(4 cosh^2(z/2)))."""
    az = np.abs(z)
    return -az - 2.0 * np.log1p(np.exp(-az))


def _de_argument(x):
    with np.errstate(over="ignore"):
        z = np.pi * np.sinh(x)
    if not np.all(np.isfinite(z)):
        raise TransformOverflowError(
            f"pi*sinh(x) overflows for |x| = {np.max(np.abs(x)):.6g}; DE nodes need |x| < ~709"
        )
    return z


def _offsets(s_a, s_b, iv: Interval):
    length = iv.length
    return np.maximum(length * s_a, _MIN_OFFSET), np.maximum(length * s_b, _MIN_OFFSET)


def _se_arrays(x, iv: Interval):
    x = np.asarray(x, dtype=float)
    t = 0.5 * iv.length * np.tanh(0.5 * x) + 0.5 * (iv.b + iv.a)
    off_a, off_b = _offsets(*_logistic_pair(x), iv)
    return t, off_a, off_b


def _de_arrays(x, iv: Interval):
    x = np.asarray(x, dtype=float)
    z = _de_argument(x)
    t = 0.5 * iv.length * np.tanh(0.5 * z) + 0.5 * (iv.b + iv.a)
    off_a, off_b = _offsets(*_logistic_pair(z), iv)
    return t, off_a, off_b


def se_forward(x: float, iv: Interval) -> NodePoint:
    """``t = (b-a)/2 tanh(x/2) + (b+a)/2`` with cancellation-free offsets."""
    t, off_a, off_b = _se_arrays(x, iv)
    return NodePoint(float(t), float(off_a), float(off_b))


def de_forward(x: float, iv: Interval) -> NodePoint:
    """``t = (b-a)/2 tanh(pi/2 sinh x) + (b+a)/2`` with cancellation-free offsets."""
    t, off_a, off_b = _de_arrays(x, iv)
    return NodePoint(float(t), float(off_a), float(off_b))


def inverse_from_offsets(kind: TransformKind, off_a, off_b):
    """Transformed coordinate of the point at distances ``off_a``, ``off_b``
    from the endpoints.  Both maps depend on ``t`` only through their ratio."""
    log_ratio = np.log(off_a) - np.log(off_b)
    if kind is TransformKind.SE:
        return log_ratio
    return np.arcsinh(log_ratio / np.pi)


def _checked_offsets(t, iv: Interval):
    if isinstance(t, NodePoint):
        if not (t.off_a > 0 and t.off_b > 0):
            raise DomainError(f"node {t} is not interior to ({iv.a}, {iv.b})")
        return t.off_a, t.off_b
    t = np.asarray(t, dtype=float)
    off_a = t - iv.a
    off_b = iv.b - t
    if np.any(off_a <= 0) or np.any(off_b <= 0) or np.any(np.isnan(t)):
        raise DomainError(f"t must lie in the open interval ({iv.a}, {iv.b})")
    return off_a, off_b


def se_inverse(t, iv: Interval) -> float:
    """``log((t-a)/(b-t))``; raises :class:`DomainError` at or beyond the endpoints.

    ``t`` may be a float, an array, or a :class:`NodePoint`; the latter keeps
    full precision right up to the endpoints.
    """
    x = inverse_from_offsets(TransformKind.SE, *_checked_offsets(t, iv))
    return float(x) if np.ndim(x) == 0 else x


def de_inverse(t, iv: Interval) -> float:
    x = inverse_from_offsets(TransformKind.DE, *_checked_offsets(t, iv))
    return float(x) if np.ndim(x) == 0 else x


def se_derivative(x, iv: Interval):
    """``(b-a) / (4 cosh^2(x/2))``."""
    x = np.asarray(x, dtype=float)
    out = iv.length * np.exp(_log_sech2_quarter(x))
    return float(out) if out.ndim == 0 else out


def de_derivative(x, iv: Interval):
    """``(b-a) pi cosh(x) / (4 cosh^2(pi/2 sinh x))``, evaluated in log form so
    that large ``|x|`` underflows to zero instead of producing ``inf/inf``."""
    x = np.asarray(x, dtype=float)
    with np.errstate(over="ignore"):
        z = np.pi * np.sinh(x)
    ax = np.abs(x)
    log_cosh = ax + np.log1p(np.exp(-2.0 * ax)) - math.log(2.0)
    with np.errstate(invalid="ignore"):
        log_val = log_cosh + _log_sech2_quarter(z)
    out = iv.length * np.pi * np.exp(np.where(np.isfinite(z), log_val, -np.inf))
    return float(out) if out.ndim == 0 else out


def step_size(kind: TransformKind, params: RegularityParams, N: int) -> float:
    """Mesh size ``h`` balancing truncation against discretization error.

    SE: ``sqrt(pi d / (alpha N))``.  DE: ``log(2 d N / alpha) / N``, which
    needs ``2 d N / alpha > 1``.
    """
    if N < 1:
        raise ParameterError(f"N must be a positive integer, got {N}")
    if kind is TransformKind.SE:
        return math.sqrt(math.pi * params.d / (params.alpha * N))
    arg = 2.0 * params.d * N / params.alpha
    if arg <= 1.0:
        raise ParameterError(
            f"DE step size needs 2dN/alpha > 1; got {arg:.6g} (N={N}, d={params.d}, alpha={params.alpha})"
        )
    return math.log(arg) / N


@dataclass(frozen=True, eq=False)
class SincGrid:
    """The 2N+1 transformed nodes ``psi(jh)``, j = -N..N, and weights ``psi'(jh)``.

    Node data lives in read-only arrays indexed 0..2N; index ``k`` corresponds
    to ``j = k - N``.
    """

    kind: TransformKind
    interval: Interval
    params: RegularityParams
    N: int
    h: float
    t: np.ndarray = field(repr=False)
    off_a: np.ndarray = field(repr=False)
    off_b: np.ndarray = field(repr=False)
    dweights: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return 2 * self.N + 1

    @property
    def indices(self) -> np.ndarray:
        return np.arange(-self.N, self.N + 1)

    @property
    def nodes(self) -> tuple[NodePoint, ...]:
        return tuple(
            NodePoint(float(t), float(oa), float(ob))
            for t, oa, ob in zip(self.t, self.off_a, self.off_b)
        )

    def node(self, k: int) -> NodePoint:
        return NodePoint(float(self.t[k]), float(self.off_a[k]), float(self.off_b[k]))

    def to_x(self, off_a, off_b):
        return inverse_from_offsets(self.kind, off_a, off_b)


def build_grid(kind, iv: Interval, params: RegularityParams, N: int) -> SincGrid:
    kind = TransformKind(kind)
    params.check(kind)
    h = step_size(kind, params, N)
    x = np.arange(-N, N + 1) * h
    if kind is TransformKind.SE:
        t, off_a, off_b = _se_arrays(x, iv)
        dw = se_derivative(x, iv)
    else:
        t, off_a, off_b = _de_arrays(x, iv)
        dw = de_derivative(x, iv)
    for arr in (t, off_a, off_b, dw):
        arr.setflags(write=False)
    return SincGrid(kind, iv, params, N, h, t, off_a, off_b, dw)
