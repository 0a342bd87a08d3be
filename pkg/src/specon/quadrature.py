"""Adaptive quadrature, oscillatory ``|P(t)|^2 / t^2`` integrals and oracles.

:func:`integrate` is a globally adaptive Gauss-Kronrod (7/15) bisection
scheme evaluated panel-batch-wise, so integrands must accept an array of
nodes.  Integrands may be vector valued: ``f(x)`` returns an array whose
leading axis matches ``x``; the error estimate is then the max over
components.

Nothing here uses the closed forms of :mod:`specon.specfun` except the
analytic tail :func:`poly_sq_over_t2_tail`, which needs the sine integral.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .specfun import s_kernel, si

__all__ = [
    "QuadratureSpec",
    "QuadResult",
    "QuadratureError",
    "DEFAULT_SPEC",
    "ORACLE_SPEC",
    "integrate",
    "oracle_pair_form",
    "oracle_step_form",
    "oracle_set_form",
    "oracle_h",
    "AltPoly",
    "poly_sq_over_t2",
    "poly_sq_over_t2_tail",
    "poly_sq_integral_infinite",
    "closed_l2_norm",
    "closed_l2_norm_batch",
    "oscillation_breakpoints",
]

# Kronrod 15-point abscissae (descending, last is 0) and weights; Gauss 7-point
# weights for abscissae xgk[1], xgk[3], xgk[5], xgk[7].
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])  # 15 nodes ascending
_KW = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GW = np.zeros(15)
for _i, _w in zip((1, 3, 5), _WG[:3]):
    _GW[_i] = _w
    _GW[14 - _i] = _w
_GW[7] = _WG[3]
_EPS = np.finfo(float).eps


class QuadratureError(ArithmeticError):
    """Raised when a caller demands convergence that was not reached."""


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_depth: int = 60

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if self.rel_tol < 0:
            raise ValueError("rel_tol must be nonnegative")
        if self.max_depth < 10:
            raise ValueError("max_depth must be at least 10")


DEFAULT_SPEC = QuadratureSpec()
ORACLE_SPEC = QuadratureSpec(abs_tol=1e-12, rel_tol=1e-12, max_depth=60)


@dataclass(frozen=True)
class QuadResult:
    value: float | np.ndarray
    error: float
    converged: bool
    evaluations: int

    def require(self) -> "QuadResult":
        if not self.converged:
            raise QuadratureError(
                f"quadrature did not converge: estimate {self.value}, error {self.error:.3e}"
            )
        return self


def _gk_panels(f, lo, hi):
    centre = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = centre[:, None] + half[:, None] * _NODES[None, :]
    y = np.asarray(f(x.ravel()))
    y = y.reshape((lo.size, 15) + y.shape[1:])
    kron = np.tensordot(y, _KW, axes=([1], [0])) * _bcast(half, y.ndim - 2)
    gauss = np.tensordot(y, _GW, axes=([1], [0])) * _bcast(half, y.ndim - 2)
    resabs = np.tensordot(np.abs(y), _KW, axes=([1], [0])) * _bcast(np.abs(half), y.ndim - 2)
    diff = np.abs(kron - gauss)
    if diff.ndim > 1:
        diff = diff.reshape(lo.size, -1).max(axis=1)
        resabs = resabs.reshape(lo.size, -1).max(axis=1)
    # roundoff floor keeps the estimate honest when the rules agree exactly
    err = np.maximum(diff, 50.0 * _EPS * resabs)
    return kron, err


def _bcast(v, extra):
    return v.reshape(v.shape + (1,) * extra)


def integrate(
    f: Callable,
    a: float,
    b: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
    breakpoints: Sequence[float] | None = None,
) -> QuadResult:
    """Adaptive integral of ``f`` over ``[a, b]``.

    ``f`` is called with a 1-D array of nodes.  Panels are bisected until
    the summed error estimate meets ``max(abs_tol, rel_tol |I|)``.  Panels
    that would need splitting beyond ``max_depth`` are kept as they are and
    the result is flagged ``converged=False``.
    """
    a, b = float(a), float(b)
    if a == b:
        probe = np.asarray(f(np.array([a])))
        return QuadResult(np.zeros(probe.shape[1:]) if probe.ndim > 1 else 0.0, 0.0, True, 1)
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    cuts = [a]
    if breakpoints is not None:
        cuts += sorted(float(p) for p in breakpoints if a < p < b)
    cuts.append(b)
    lo = np.array(cuts[:-1])
    hi = np.array(cuts[1:])
    depth = np.zeros(lo.size, dtype=int)
    vals, errs = _gk_panels(f, lo, hi)
    evaluations = 15 * lo.size
    length = b - a
    converged = True
    while True:
        total = vals.sum(axis=0)
        tol = max(spec.abs_tol, spec.rel_tol * float(np.max(np.abs(total))))
        if errs.sum() <= tol:
            break
        width = hi - lo
        split = errs > tol * width / length
        if not split.any():
            split = errs == errs.max()
        stuck = split & (depth >= spec.max_depth)
        if stuck.any():
            converged = False
            split &= ~stuck
            if not split.any():
                break
        keep = ~split
        mid = 0.5 * (lo[split] + hi[split])
        new_lo = np.concatenate([lo[split], mid])
        new_hi = np.concatenate([mid, hi[split]])
        new_depth = np.concatenate([depth[split], depth[split]]) + 1
        nv, ne = _gk_panels(f, new_lo, new_hi)
        evaluations += 15 * new_lo.size
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        depth = np.concatenate([depth[keep], new_depth])
        vals = np.concatenate([vals[keep], nv])
        errs = np.concatenate([errs[keep], ne])
    total = vals.sum(axis=0) * sign
    value = float(total) if np.ndim(total) == 0 else total
    return QuadResult(value, float(errs.sum()), converged, evaluations)


def _unit_breaks(lo: float, hi: float) -> list[float]:
    return [float(k) for k in range(math.floor(lo) + 1, math.ceil(hi))]


def oracle_pair_form(I1, I2, spec: QuadratureSpec = ORACLE_SPEC) -> QuadResult:
    """Iterated quadrature of ``int_{I1} int_{I2} sinc(x - y) dy dx``.

    Test oracle for :func:`specon.spectral.pair_form`; uses ``numpy.sinc``
    and no antiderivatives.
    """
    p, q = map(float, I1)
    r, s = map(float, I2)
    inner_spec = QuadratureSpec(spec.abs_tol / max(1.0, q - p), spec.rel_tol, spec.max_depth)
    inner_ok = [True]

    def inner(xs):
        res = integrate(lambda ys: np.sinc(xs[None, :] - ys[:, None]), r, s, inner_spec,
                        _unit_breaks(r, s))
        inner_ok[0] &= res.converged
        return res.value

    outer = integrate(inner, p, q, spec, _unit_breaks(p, q))
    return QuadResult(outer.value, outer.error, outer.converged and inner_ok[0], outer.evaluations)


def oracle_step_form(f, g, spec: QuadratureSpec = ORACLE_SPEC) -> float:
    """``sum_{p,q} v_p w_q`` times the oracle pair form; raises on non-convergence."""
    total = 0.0
    for lo1, hi1, v in f.pieces:
        for lo2, hi2, w in g.pieces:
            total += v * w * oracle_pair_form((lo1, hi1), (lo2, hi2), spec).require().value
    return total


def oracle_set_form(A, B, spec: QuadratureSpec = ORACLE_SPEC) -> float:
    """Oracle ``(A, B)`` for component lists; raises on non-convergence."""
    return math.fsum(oracle_pair_form(I1, I2, spec).require().value for I1 in A for I2 in B)


def oracle_h(gaps: Sequence[float], spec: QuadratureSpec = ORACLE_SPEC) -> float:
    """``(I, I) - (J, J)`` for a gap vector, entirely by quadrature."""
    xs = np.concatenate([[0.0], np.cumsum(np.asarray(gaps, dtype=float))])
    J = [(xs[2 * k], xs[2 * k + 1]) for k in range(xs.size // 2) if xs[2 * k + 1] > xs[2 * k]]
    I = [(0.0, float(sum(hi - lo for lo, hi in J)))]
    return oracle_set_form(I, I, spec) - oracle_set_form(J, J, spec)


@dataclass(frozen=True)
class AltPoly:
    """``P(t) = sum_{j=1}^{2n} (-1)^j exp(i alpha_j t)`` with sorted frequencies."""

    nodes: tuple[float, ...]

    def __post_init__(self):
        xs = tuple(float(v) for v in self.nodes)
        if len(xs) == 0 or len(xs) % 2:
            raise ValueError("an alternating polynomial needs an even number of nodes")
        if not all(math.isfinite(v) for v in xs):
            raise ValueError("nodes must be finite")
        if any(b < a for a, b in zip(xs, xs[1:])):
            raise ValueError("nodes must be nondecreasing")
        object.__setattr__(self, "nodes", xs)

    @property
    def n(self) -> int:
        return len(self.nodes) // 2

    @property
    def pair_gap_sum(self) -> float:
        xs = self.nodes
        return math.fsum(xs[2 * k + 1] - xs[2 * k] for k in range(self.n))

    def frequencies(self, pi_scaled: bool = False) -> np.ndarray:
        w = np.asarray(self.nodes)
        return np.pi * w if pi_scaled else w

    def __call__(self, t, pi_scaled: bool = False):
        w = self.frequencies(pi_scaled)
        signs = np.where(np.arange(1, w.size + 1) % 2 == 0, 1.0, -1.0)
        t = np.asarray(t, dtype=float)
        return np.exp(1j * t[..., None] * w) @ signs


def _p_over_t_sq(freqs: np.ndarray):
    # P(t)/t = sum_k i d_k sinc(d_k t / 2pi) e^{i m_k t}: no cancellation near t=0
    lo = freqs[0::2]
    hi = freqs[1::2]
    d = hi - lo
    m = 0.5 * (hi + lo)

    def integrand(t):
        t = np.asarray(t)[:, None]
        terms = d * np.sinc(d * t / (2.0 * np.pi)) * np.exp(1j * m * t)
        return np.abs(terms.sum(axis=1)) ** 2

    return integrand


def oscillation_breakpoints(span: float, lo: float, hi: float) -> list[float] | None:
    """Multiples of the shortest half-period ``pi/span`` once ``span > 8 pi``."""
    if span <= 8.0 * np.pi:
        return None
    step = np.pi / span
    k0 = math.floor(lo / step) + 1
    k1 = math.ceil(hi / step)
    return [k * step for k in range(k0, k1)]


def poly_sq_over_t2(p: AltPoly, U: float, pi_scaled: bool = False,
                    spec: QuadratureSpec = DEFAULT_SPEC) -> QuadResult:
    """``int_0^U |P(t)|^2 / t^2 dt`` (frequencies ``pi alpha_j`` if ``pi_scaled``)."""
    if not U > 0:
        raise ValueError("U must be positive")
    w = p.frequencies(pi_scaled)
    span = float(w[-1] - w[0])
    return integrate(_p_over_t_sq(w), 0.0, U, spec, oscillation_breakpoints(span, 0.0, U))


def _cos_over_t2_tail(omega: np.ndarray, U: float) -> np.ndarray:
    # int_U^inf cos(w t)/t^2 dt = cos(wU)/U - |w| (pi/2 - Si(|w| U))
    w = np.abs(omega)
    si_std = np.pi * si(w * U / np.pi)
    return np.cos(w * U) / U - w * (0.5 * np.pi - si_std)


def poly_sq_over_t2_tail(p: AltPoly, U: float, pi_scaled: bool = False) -> float:
    """``int_U^inf |P(t)|^2 / t^2 dt`` in closed form."""
    if not U > 0:
        raise ValueError("U must be positive")
    w = p.frequencies(pi_scaled)
    signs = np.where(np.arange(1, w.size + 1) % 2 == 0, 1.0, -1.0)
    j, k = np.triu_indices(w.size, k=1)
    off = (signs[j] * signs[k] * _cos_over_t2_tail(w[k] - w[j], U)).sum()
    return float(w.size / U + 2.0 * off)


def poly_sq_integral_infinite(p: AltPoly, U: float = 1.0, pi_scaled: bool = False,
                              spec: QuadratureSpec = DEFAULT_SPEC) -> QuadResult:
    """``int_0^inf |P|^2/t^2``: quadrature head on ``[0, U]`` plus analytic tail."""
    head = poly_sq_over_t2(p, U, pi_scaled, spec)
    tail = poly_sq_over_t2_tail(p, U, pi_scaled)
    return QuadResult(head.value + tail, head.error, head.converged, head.evaluations)


def closed_l2_norm(p: AltPoly) -> float:
    """``int_{-1/2}^{1/2} |P(t)|^2 dt = sum_{j,k} (-1)^{j+k} s(alpha_j - alpha_k)``."""
    return float(closed_l2_norm_batch(np.asarray(p.nodes)[None, :])[0])


def closed_l2_norm_batch(nodes: np.ndarray) -> np.ndarray:
    """Row-wise :func:`closed_l2_norm` for an ``(m, 2n)`` array of sorted nodes."""
    nodes = np.asarray(nodes, dtype=float)
    size = nodes.shape[1]
    signs = np.where(np.arange(1, size + 1) % 2 == 0, 1.0, -1.0)
    j, k = np.triu_indices(size, k=1)
    off = s_kernel(nodes[:, k] - nodes[:, j]) @ (signs[j] * signs[k])
    return size + 2.0 * off
