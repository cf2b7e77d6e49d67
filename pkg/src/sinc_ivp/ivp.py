"""Linear initial value problems ``y' = K(t) y + g(t)``, ``y(a) = r``.

``coeff`` and ``forcing`` receive a :class:`~sinc_ivp.transform.NodePoint`
so that singular coefficients can be written in terms of ``t - a`` and
``b - t`` directly.  ``exact`` solutions take plain ``t`` (scalar or array)
and return shape ``(n,)`` or ``(len(t), n)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .transform import Interval, NodePoint, RegularityParams

__all__ = [
    "PI_MINUS",
    "IvpProblem",
    "ExampleProblem",
    "example_halm",
    "example_singular",
    "example_dense_singularities",
    "example_exponential",
    "EXAMPLES",
    "get_example",
]

#: Stand-in for "any positive number below pi" in the published parameter choices.
PI_MINUS = 3.14


@dataclass(frozen=True)
class IvpProblem:
    n: int
    coeff: Callable[[NodePoint], np.ndarray]
    forcing: Callable[[NodePoint], np.ndarray]
    init: np.ndarray
    interval: Interval

    def __post_init__(self):
        init = np.asarray(self.init, dtype=float)
        if init.shape != (self.n,):
            raise ValueError(f"initial vector has shape {init.shape}, expected ({self.n},)")
        object.__setattr__(self, "init", init)


@dataclass(frozen=True)
class ExampleProblem:
    name: str
    problem: IvpProblem
    exact: Callable
    se_params: RegularityParams
    de_params: RegularityParams

    def params(self, kind) -> RegularityParams:
        return self.se_params if str(getattr(kind, "value", kind)).upper() == "SE" else self.de_params


def _zero_forcing(n):
    z = np.zeros(n)
    return lambda node: z


def _stack(*cols):
    return np.stack(np.broadcast_arrays(*cols), axis=-1)


def halm_de_strip_width(pi_minus: float = PI_MINUS) -> float:
    p = pi_minus / (2.0 * math.log(2.0))
    u = 1.0 + 7.0 * p * p
    q = math.sqrt((u + math.sqrt(u * u + (6.0 * p) ** 2)) / 2.0)
    x = (q - 1.0) / (4.0 * p)
    y = 3.0 * (1.0 - 1.0 / q) / 4.0
    return math.asin(y / math.hypot(x, y))


def example_halm() -> ExampleProblem:
    """Halm equation ``(1+t^2)^2 y'' = 2y`` on [0, 1] as a first-order system."""

    def coeff(node):
        return np.array([[0.0, 1.0], [2.0 / (1.0 + node.t**2) ** 2, 0.0]])

    def exact(t):
        t = np.asarray(t, dtype=float)
        th = np.arctan(t)
        root = np.sqrt(1.0 + t * t)
        y1 = root * np.sinh(th)
        y2 = (t * np.sinh(th) + np.cosh(th)) / root
        return _stack(y1, y2)

    prob = IvpProblem(2, coeff, _zero_forcing(2), np.array([0.0, 1.0]), Interval(0.0, 1.0))
    return ExampleProblem(
        "halm",
        prob,
        exact,
        RegularityParams(1.0, 3.0 * PI_MINUS / 4.0),
        RegularityParams(1.0, halm_de_strip_width()),
    )


def example_singular() -> ExampleProblem:
    """System on [0, 2] with a ``t^(-1/2)`` coefficient singularity at the origin."""

    def coeff(node):
        rt = math.sqrt(node.off_a)
        return np.array([[-1.0, 0.5 / rt], [-1.0 / rt, 0.0]])

    def exact(t):
        t = np.asarray(t, dtype=float)
        e = np.exp(-t)
        return _stack(np.sqrt(t) * e, e)

    prob = IvpProblem(2, coeff, _zero_forcing(2), np.array([0.0, 1.0]), Interval(0.0, 2.0))
    return ExampleProblem(
        "singular",
        prob,
        exact,
        RegularityParams(0.5, PI_MINUS),
        RegularityParams(0.5, PI_MINUS / 2.0),
    )


def _atanh_from_offsets(off_a, off_b):
    # on [-1, 1]: (1+t)/(1-t) = off_a/off_b
    return 0.5 * (math.log(off_a) - math.log(off_b))


def example_dense_singularities() -> ExampleProblem:
    """Rotation system on [-1, 1] whose coefficient oscillates infinitely often
    near both endpoints, so no DE strip of analyticity exists."""
    cosh_pi = math.cosh(math.pi)

    def coeff(node):
        w = 4.0 * _atanh_from_offsets(node.off_a, node.off_b)
        F2 = math.cos(w) + cosh_pi
        phi = 2.0 * (node.t * F2 + math.sin(w)) / math.sqrt(F2)
        return np.array([[0.0, -phi], [phi, 0.0]])

    def exact(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            F = np.sqrt(np.cos(4.0 * np.arctanh(t)) + cosh_pi)
        u = np.where(np.abs(t) == 1.0, 0.0, (1.0 - t * t) * F)
        return _stack(np.sin(u), np.cos(u))

    d_se = PI_MINUS / 2.0
    prob = IvpProblem(2, coeff, _zero_forcing(2), np.array([0.0, 1.0]), Interval(-1.0, 1.0))
    return ExampleProblem(
        "dense_singularities",
        prob,
        exact,
        RegularityParams(1.0, d_se),
        RegularityParams(1.0, math.asin(d_se / math.pi)),
    )


def example_exponential() -> ExampleProblem:
    """Sanity problem ``y' = y``, ``y(0) = 1`` on [0, 1]."""
    one = np.array([[1.0]])

    def exact(t):
        return _stack(np.exp(np.asarray(t, dtype=float)))

    prob = IvpProblem(1, lambda node: one, _zero_forcing(1), np.array([1.0]), Interval(0.0, 1.0))
    return ExampleProblem(
        "exponential",
        prob,
        exact,
        RegularityParams(1.0, 3.0 * PI_MINUS / 4.0),
        RegularityParams(1.0, PI_MINUS / 2.0),
    )


EXAMPLES: dict[str, Callable[[], ExampleProblem]] = {
    "1": example_halm,
    "2": example_singular,
    "3": example_dense_singularities,
    "exp": example_exponential,
}


def get_example(key: str) -> ExampleProblem:
    try:
        return EXAMPLES[str(key)]()
    except KeyError:
        raise KeyError(f"unknown example {key!r}; choose from {', '.join(EXAMPLES)}") from None
