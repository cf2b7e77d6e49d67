"""Scalar building blocks of Sinc methods.

All functions accept Python floats or numpy arrays and broadcast like ufuncs;
a scalar input gives a Python ``float`` back.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["sinc_basis", "sine_integral", "indef_basis", "sigma"]

# Below this |x| the Maclaurin series is used; its largest term is x**3/18,
# so cancellation stays under one ulp of Si.  Above it the continued fraction
# for E1(ix) converges in a few dozen steps.
_SERIES_LIMIT = 4.0
_SERIES_TERMS = 24
_CF_EPS = 1e-16
_CF_MAXIT = 200
_TAYLOR_LIMIT = 1e-4


def _scalar_or_array(result, like):
    if np.ndim(like) == 0:
        return float(result)
    return result


def sinc_basis(j, h, x):
    """Shifted Sinc function ``S(j,h)(x) = sin(pi(x/h - j)) / (pi(x/h - j))``."""
    v = np.asarray(x, dtype=float) / h - j
    u = np.pi * v
    # reduce to [-1/2, 1/2] so sin vanishes exactly at the nonzero integers
    n = np.rint(v)
    parity = 1.0 - 2.0 * np.mod(n, 2.0)
    small = np.abs(u) < _TAYLOR_LIMIT
    with np.errstate(invalid="ignore", divide="ignore"):
        direct = parity * np.sin(np.pi * (v - n)) / u
    u2 = u * u
    series = 1.0 - u2 / 6.0 * (1.0 - u2 / 20.0)
    out = np.where(small, series, direct)
    return _scalar_or_array(out, x)


def _si_series(x):
    x2 = x * x
    term = x.copy()
    total = x.copy()
    for k in range(1, _SERIES_TERMS):
        term = -term * x2 / ((2 * k) * (2 * k + 1))
        total = total + term / (2 * k + 1)
    return total


def _si_continued_fraction(x):
    """Si for x > 0 via the modified Lentz evaluation of E1(ix)."""
    tiny = 1e-300
    b = 1.0 + 1j * x
    c = np.full(x.shape, 1.0 / tiny, dtype=complex)
    d = 1.0 / b
    hh = d.copy()
    active = np.arange(x.size)
    for i in range(2, _CF_MAXIT):
        a = -float((i - 1) ** 2)
        b[active] += 2.0
        d[active] = 1.0 / (a * d[active] + b[active])
        c[active] = b[active] + a / c[active]
        delta = c[active] * d[active]
        hh[active] *= delta
        active = active[np.abs(delta - 1.0) >= _CF_EPS]
        if active.size == 0:
            break
    else:
        raise ArithmeticError("sine integral continued fraction did not converge")
    hh *= np.cos(x) - 1j * np.sin(x)
    return 0.5 * np.pi + hh.imag


def sine_integral(x):
    """Sine integral ``Si(x) = int_0^x sin(t)/t dt``.

    Accurate to about 1e-15 absolute for all finite real ``x``.
    """
    arr = np.asarray(x, dtype=float)
    flat = np.abs(arr).ravel()
    out = np.empty_like(flat)
    small = flat <= _SERIES_LIMIT
    if small.any():
        out[small] = _si_series(flat[small])
    if (~small).any():
        out[~small] = _si_continued_fraction(flat[~small])
    out = np.copysign(out.reshape(arr.shape), arr)
    return _scalar_or_array(out, x)


def indef_basis(j, h, x):
    """Sinc indefinite-integration basis ``J(j,h)(x) = h(1/2 + Si(pi(x/h - j))/pi)``.

    Tends to 0 as ``x -> -inf`` and to ``h`` as ``x -> +inf``.
    """
    u = np.pi * (np.asarray(x, dtype=float) / h - j)
    out = h * (0.5 + np.asarray(sine_integral(u)) / np.pi)
    return _scalar_or_array(out, x)


def sigma(k):
    """Weight ``sigma_k = 1/2 + Si(pi k)/pi``; note ``sigma(k) + sigma(-k) == 1``."""
    k = np.asarray(k, dtype=float)
    out = 0.5 + np.asarray(sine_integral(math.pi * k)) / math.pi
    return _scalar_or_array(out, k)
