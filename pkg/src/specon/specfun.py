"""Special functions on the real line: sinc, the normalized sine integral and
its antiderivatives.

All functions accept a float or an ndarray and return the same kind.  The
sine integral is normalized to the ``sinc`` kernel used throughout the
package::

    sinc(x) = sin(pi x) / (pi x)
    si(x)   = int_0^x sinc(t) dt        (si(+inf) = 1/2)
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "AccuracySpec",
    "DEFAULT_ACCURACY",
    "sinc",
    "si",
    "phi2",
    "g",
    "s_kernel",
    "sine_integral_aux",
]


@dataclass(frozen=True)
class AccuracySpec:
    """Evaluation contract for :func:`si`.

    ``series_switch`` is measured in the argument of ``si`` (not ``pi x``).
    Below it the power series is summed; above it the auxiliary functions are
    evaluated by continued fraction.
    """

    abs_tol: float = 1e-13
    series_switch: float = 1.0

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if not self.series_switch > 0:
            raise ValueError("series_switch must be positive")


DEFAULT_ACCURACY = AccuracySpec()

_SI_SERIES_COEFS = [1.0 / ((2 * k + 1) * math.factorial(2 * k + 1)) for k in range(24)]


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("special functions are defined on finite reals only")
    return arr


def _wrap(arr, like):
    if np.ndim(like) == 0 and not isinstance(like, np.ndarray):
        return float(arr)
    return arr


def sinc(x):
    """``sin(pi x)/(pi x)`` with ``sinc(0) = 1``."""
    x_arr = _as_array(x)
    px = np.pi * x_arr
    small = np.abs(x_arr) < 1e-4
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(small, 1.0, np.sin(px) / np.where(small, 1.0, px))
    p2 = px * px
    out = np.where(small, 1.0 - p2 / 6.0 + p2 * p2 / 120.0, out)
    return _wrap(out, x)


def _si_series(x):
    # sum_k (-1)^k pi^(2k) x^(2k+1) / ((2k+1) (2k+1)!), Horner in (pi x)^2
    z2 = (np.pi * x) ** 2
    acc = np.zeros_like(x)
    for coef in _SI_SERIES_COEFS[::-1]:
        acc = coef - z2 * acc
    return acc * x


# (upper bound on z, continued-fraction depth) reaching ~1e-16 for z >= pi
_CF_DEPTHS = ((2 * np.pi, 100), (8.0, 40), (12.0, 22), (20.0, 16), (40.0, 11), (np.inf, 10))


def _cf_backward(z: np.ndarray, depth: int) -> np.ndarray:
    # e^{iz} E1(iz) = 1/(1+iz - 1^2/(3+iz - 2^2/(5+iz - ...)))
    tail = np.zeros(z.shape, dtype=complex)
    iz = 1j * z
    for k in range(depth, 0, -1):
        tail = (k * k) / (iz + (2 * k + 1) - tail)
    return 1.0 / (iz + 1.0 - tail)


def sine_integral_aux(z):
    """Auxiliary functions ``(f(z), g(z))`` of the standard sine integral.

    For ``z > 0``::

        Si(z) = pi/2 - f(z) cos z - g(z) sin z

    They come from ``e^{iz} E1(iz) = g(z) - i f(z)``, with the continued
    fraction of ``E1`` evaluated backward at a depth chosen per band of
    ``z``.  This is the convergent form of the classical asymptotic
    expansion ``f ~ 1/z - 2/z^3 + ...``, ``g ~ 1/z^2 - 6/z^4 + ...``; the
    tabulated depths are accurate for ``z >= pi``.
    """
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(z <= 0):
        raise ValueError("auxiliary functions need z > 0")
    h = np.empty(z.shape, dtype=complex)
    lower = 0.0
    for upper, depth in _CF_DEPTHS:
        band = (z >= lower) & (z < upper)
        if band.any():
            h[band] = _cf_backward(z[band], depth)
        lower = upper
    return -h.imag, h.real


def si(x, accuracy: AccuracySpec = DEFAULT_ACCURACY):
    """``int_0^x sinc(t) dt``; odd, bounded, tends to 1/2 at +inf."""
    x_arr = _as_array(x)
    ax = np.abs(x_arr)
    out = np.empty_like(ax)
    low = ax <= accuracy.series_switch
    if low.any():
        out[low] = _si_series(ax[low])
    high = ~low
    if high.any():
        z = np.pi * ax[high]
        f, gz = sine_integral_aux(z)
        out[high] = 0.5 - (f * np.cos(z) + gz * np.sin(z)) / np.pi
    out = np.copysign(out, x_arr)
    return _wrap(out, x)


def phi2(x, accuracy: AccuracySpec = DEFAULT_ACCURACY):
    """Second antiderivative of sinc: ``int_0^x si(u) du``.

    Closed form ``x si(x) + (cos(pi x) - 1)/pi^2``; the cosine term is
    written as ``-2 sin^2(pi x/2)`` to keep small arguments accurate.
    """
    x_arr = _as_array(x)
    out = x_arr * si(x_arr, accuracy) - 2.0 * np.sin(0.5 * np.pi * x_arr) ** 2 / np.pi**2
    return _wrap(out, x)


def g(x, accuracy: AccuracySpec = DEFAULT_ACCURACY):
    """``G(x) = x int_0^x sinc^2(t) dt`` for ``x >= 0``.

    Uses ``int_0^x sinc^2 = si(2x) - sin^2(pi x)/(pi^2 x)``.
    """
    x_arr = _as_array(x)
    if np.any(x_arr < 0):
        raise ValueError("G is defined for x >= 0")
    out = x_arr * si(2.0 * x_arr, accuracy) - np.sin(np.pi * x_arr) ** 2 / np.pi**2
    return _wrap(out, x)


def s_kernel(beta):
    """``int_{-1/2}^{1/2} e^{i beta t} dt = 2 sin(beta/2)/beta``."""
    b = _as_array(beta)
    small = np.abs(b) < 1e-4
    safe = np.where(small, 1.0, b)
    out = np.where(small, 1.0 - b * b / 24.0 + b**4 / 1920.0, 2.0 * np.sin(0.5 * safe) / safe)
    return _wrap(out, beta)
