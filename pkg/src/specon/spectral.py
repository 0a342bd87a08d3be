"""Closed-form sinc-kernel quadratic forms and the rearrangement gap ``H``.

At unit bandwidth the bilinear form of two sets is::

    (A, B) = int_A int_B sinc(x - y) dy dx

and for a gap vector ``a`` generating ``J`` (with ``I = [0, T]``)::

    H(a) = (I, I) - (J, J) = 4 T(a, G(x/2))

Everything is closed through ``phi2``, the second antiderivative of sinc;
the t-integral representations are computed by quadrature as cross-checks.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import quadrature as quad
from .intervals import GapVector, IntervalUnion, StepFunction, dilate, from_gaps
from .specfun import g as G
from .specfun import phi2, si
from .toperator import block_structure, t_apply_array

__all__ = [
    "ConcentrationResult",
    "HBreakdown",
    "SuperlevelReport",
    "pair_form",
    "set_form",
    "concentration",
    "step_form",
    "f_field",
    "h_value",
    "h_values",
    "h_gap",
    "phi_two_interval",
    "grad_h",
    "scale_derivative",
    "superlevel_check",
    "alt_exp_sq",
]

PI2 = np.pi**2


def _gaps(g) -> np.ndarray:
    if isinstance(g, GapVector):
        return np.asarray(g.gaps)
    return np.asarray(GapVector(tuple(g)).gaps)


def _components(A) -> list[tuple[float, float]]:
    if isinstance(A, IntervalUnion):
        return A.components
    return [tuple(map(float, c)) for c in A]


def pair_form(I1, I2):
    """``int_{I1} int_{I2} sinc(x - y)`` for ``I1 = [p, q]``, ``I2 = [r, s]``.

    Broadcasts over array-valued endpoints.
    """
    p, q = I1
    r, s = I2
    return phi2(s - p) - phi2(s - q) - phi2(r - p) + phi2(r - q)


def set_form(A, B) -> float:
    """``(A, B)``: sum of :func:`pair_form` over component pairs."""
    ca = np.asarray(_components(A), dtype=float)
    cb = np.asarray(_components(B), dtype=float)
    p, q = ca[:, 0, None], ca[:, 1, None]
    r, s = cb[None, :, 0], cb[None, :, 1]
    return float(np.sum(pair_form((p, q), (r, s))))


@dataclass(frozen=True)
class ConcentrationResult:
    """Band energy ``int_{-W/2}^{W/2} |hat chi_A|^2`` and its unit-bandwidth form.

    ``unit_value`` is ``(WA, WA)`` at bandwidth 1, so ``value = unit_value / W``.
    """

    value: float
    bandwidth: float
    measure: float
    unit_value: float

    @property
    def fraction(self) -> float:
        return self.value / self.measure


def concentration(A: IntervalUnion, W: float = 1.0) -> ConcentrationResult:
    if not W > 0:
        raise ValueError("bandwidth must be positive")
    D = dilate(A, W)
    unit = set_form(D, D)
    return ConcentrationResult(unit / W, float(W), A.measure, unit)


def step_form(f: StepFunction, g: StepFunction) -> float:
    """``(f, g) = sum_{p,q} v_p w_q (I_p, I_q)``."""
    if not f.pieces or not g.pieces:
        return 0.0
    pf = np.asarray(f.pieces, dtype=float)
    pg = np.asarray(g.pieces, dtype=float)
    forms = pair_form((pf[:, 0, None], pf[:, 1, None]), (pg[None, :, 0], pg[None, :, 1]))
    return float(pf[:, 2] @ forms @ pg[:, 2])


def f_field(A, x):
    """``F_A(x) = int_A sinc(x - t) dt``; vectorized in ``x``."""
    comps = np.asarray(_components(A), dtype=float)
    x_arr = np.asarray(x, dtype=float)
    xx = x_arr[..., None]
    out = (si(xx - comps[:, 0]) - si(xx - comps[:, 1])).sum(axis=-1)
    return float(out) if np.ndim(x) == 0 else out


def _g_half(x):
    return G(0.5 * x)


def h_value(g) -> float:
    """``H = 4 T(a, G(x/2))``; zero holes and zero lengths are allowed."""
    return 4.0 * t_apply_array(_gaps(g), _g_half)


def h_values(gaps: np.ndarray) -> np.ndarray:
    """:func:`h_value` for each row of an ``(m, 2n-1)`` array."""
    gaps = np.asarray(gaps, dtype=float)
    if np.any(gaps < 0):
        raise ValueError("gap entries must be nonnegative")
    return 4.0 * t_apply_array(gaps, _g_half)


@dataclass(frozen=True)
class HBreakdown:
    """``H`` through the closed form (``form_b``) and two t-integrals.

    ``form_a``: ``(2/pi^2) int_0^1 T(a, 1 - cos(pi x t)) / t^2 dt``;
    ``form_c``: difference of the two ``|.|^2 / t^2`` integrals.
    """

    h_value: float
    form_a: float
    form_b: float
    form_c: float
    quad_error: float
    converged: bool
    diagnostics: tuple[str, ...] = field(default_factory=tuple)

    @property
    def max_disagreement(self) -> float:
        return max(abs(self.form_a - self.form_b), abs(self.form_c - self.form_b))

    def to_dict(self) -> dict:
        return {
            "h_value": self.h_value,
            "form_a": self.form_a,
            "form_b": self.form_b,
            "form_c": self.form_c,
            "quad_error": self.quad_error,
            "converged": self.converged,
            "diagnostics": list(self.diagnostics),
        }


def _form_a(gaps: np.ndarray, spec: quad.QuadratureSpec) -> quad.QuadResult:
    signs, incidence = block_structure(gaps.size)
    args = gaps @ incidence

    def integrand(t):
        # 2 sin^2(pi x t/2) / t^2 = (pi^2 x^2 / 2) sinc(x t / 2)^2
        vals = 0.5 * PI2 * args**2 * np.sinc(0.5 * np.outer(t, args)) ** 2
        return vals @ signs

    span = float(args.max()) * np.pi
    res = quad.integrate(integrand, 0.0, 1.0, spec, quad.oscillation_breakpoints(span, 0.0, 1.0))
    return quad.QuadResult(2.0 / PI2 * res.value, 2.0 / PI2 * res.error, res.converged,
                           res.evaluations)


def _form_c(gaps: np.ndarray, spec: quad.QuadratureSpec) -> quad.QuadResult:
    xs = np.concatenate([[0.0], np.cumsum(gaps)])
    T = float(gaps[0::2].sum())
    poly = quad.poly_sq_over_t2(quad.AltPoly(tuple(xs)), 1.0, True, spec)
    single = quad.poly_sq_over_t2(quad.AltPoly((0.0, T)), 1.0, True, spec)
    return quad.QuadResult((single.value - poly.value) / PI2, (single.error + poly.error) / PI2,
                           poly.converged and single.converged,
                           poly.evaluations + single.evaluations)


def h_gap(g, spec: quad.QuadratureSpec = quad.DEFAULT_SPEC) -> HBreakdown:
    """All three representations of ``H``; quadrature trouble goes to ``diagnostics``."""
    gaps = _gaps(g)
    form_b = h_value(gaps)
    diagnostics = []
    results = {}
    for name, fn in (("form_a", _form_a), ("form_c", _form_c)):
        try:
            res = fn(gaps, spec)
        except (ArithmeticError, ValueError) as exc:
            diagnostics.append(f"{name}: {exc}")
            results[name] = quad.QuadResult(float("nan"), float("inf"), False, 0)
            continue
        if not res.converged:
            diagnostics.append(f"{name}: quadrature hit max_depth (error {res.error:.3e})")
        results[name] = res
    ra, rc = results["form_a"], results["form_c"]
    return HBreakdown(
        h_value=form_b,
        form_a=float(ra.value),
        form_b=form_b,
        form_c=float(rc.value),
        quad_error=max(ra.error, rc.error),
        converged=ra.converged and rc.converged,
        diagnostics=tuple(diagnostics),
    )


def phi_two_interval(a: float, b: float, eps: float,
                     spec: quad.QuadratureSpec = quad.DEFAULT_SPEC) -> float:
    """``int_0^1 t^-2 sin(pi a t/2) sin(pi b t/2) sin(pi eps t/2) sin(pi (a+b+eps) t/2) dt``.

    Related to the gap functional by ``16/pi^2 * Phi(a, b, eps) = H((a, eps, b))``.
    """
    a, b, eps = float(a), float(b), float(eps)
    if min(a, b, eps) < 0:
        raise ValueError("a, b, eps must be nonnegative")
    c = a + b + eps

    def integrand(t):
        # sin(pi a t/2)/t = (pi a/2) sinc(a t/2)
        return ((0.5 * np.pi) ** 2 * a * b * np.sinc(0.5 * a * t) * np.sinc(0.5 * b * t)
                * np.sin(0.5 * np.pi * eps * t) * np.sin(0.5 * np.pi * c * t))

    span = np.pi * c
    res = quad.integrate(integrand, 0.0, 1.0, spec, quad.oscillation_breakpoints(span, 0.0, 1.0))
    return float(res.require().value)


def grad_h(g) -> np.ndarray:
    """``dH/da_m`` for ``m = 1..2n-1`` via endpoint values of ``F_J``.

    Lengths: ``2 si(T) - 2 sum_{j>=m+1} (-1)^j F_J(x_j)``; holes: the same
    without ``2 si(T)``.
    """
    gaps = _gaps(g)
    if np.any(gaps <= 0):
        raise ValueError("gradient is defined only for strictly positive gaps")
    xs = np.concatenate([[0.0], np.cumsum(gaps)])
    comps = np.column_stack([xs[0::2], xs[1::2]])
    F = f_field(comps, xs)
    j = np.arange(1, xs.size + 1)
    weighted = np.where(j % 2 == 0, 1.0, -1.0) * F
    suffix = np.cumsum(weighted[::-1])[::-1]  # suffix[i] = sum_{j>=i+1} (1-based)
    T = float(gaps[0::2].sum())
    grad = -2.0 * suffix[1:]
    grad[0::2] += 2.0 * si(T)
    return grad


def scale_derivative(g) -> float:
    """``d/ds H(s a)`` at ``s = 1``: ``H(a) + (2/pi^2) T(a, 1 - cos(pi x))``."""
    gaps = _gaps(g)
    cos_term = t_apply_array(gaps, lambda x: 2.0 * np.sin(0.5 * np.pi * x) ** 2)
    return h_value(gaps) + 2.0 / PI2 * cos_term


def alt_exp_sq(xs: Sequence[float]) -> float:
    """``|sum_j (-1)^j exp(i pi x_j)|^2``."""
    xs = np.asarray(xs, dtype=float)
    lo, hi = xs[0::2], xs[1::2]
    # e^{i pi hi} - e^{i pi lo} = 2i sin(pi d/2) e^{i pi m}
    val = (2j * np.sin(0.5 * np.pi * (hi - lo)) * np.exp(0.5j * np.pi * (hi + lo))).sum()
    return float(abs(val) ** 2)


@dataclass(frozen=True)
class SuperlevelReport:
    c: float
    endpoint_values: tuple[float, ...]
    interior_violation: float
    exterior_violation: float
    min_interior: float
    max_exterior: float
    spacing: float
    tol: float

    @property
    def violation_measure(self) -> float:
        return self.interior_violation + self.exterior_violation

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["endpoint_values"] = list(self.endpoint_values)
        d["violation_measure"] = self.violation_measure
        return d


def superlevel_check(A: IntervalUnion, tol: float = 1e-9, spacing: float = 1e-3,
                     pad: float = 1.0) -> SuperlevelReport:
    """Compare ``A`` with the superlevel set ``{F_A >= c}``, ``c = min_j F_A(x_j)``.

    Samples ``F_A`` on a grid of the given spacing over ``A`` and over the
    complement of ``A`` within ``pad`` of its hull; violation measures are
    point counts times the spacing.
    """
    A = A.canonical()
    xs = np.asarray(A.endpoints)
    F_end = f_field(A, xs)
    c = float(F_end.min())
    grid = np.arange(xs[0] - pad, xs[-1] + pad + 0.5 * spacing, spacing)
    inside = np.zeros(grid.shape, dtype=bool)
    for lo, hi in A.components:
        inside |= (grid >= lo) & (grid <= hi)
    F = f_field(A, grid)
    low_inside = inside & (F < c - tol)
    high_outside = ~inside & (F > c + tol)
    return SuperlevelReport(
        c=c,
        endpoint_values=tuple(float(v) for v in F_end),
        interior_violation=float(low_inside.sum() * spacing),
        exterior_violation=float(high_outside.sum() * spacing),
        min_interior=float(F[inside].min()),
        max_exterior=float(F[~inside].max()),
        spacing=spacing,
        tol=tol,
    )
