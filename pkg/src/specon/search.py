"""Minimization of ``H``, local-minimum certificates and counterexample scans.

:func:`minimize_h` runs seeded multistart local searches over positive gap
vectors.  Each restart does a bounded Nelder-Mead descent, then an L-BFGS-B
polish driven by :func:`specon.spectral.grad_h`, then (for points strictly
inside the box) a few Newton steps on a finite-difference Hessian of the
gradient so that certificates can be checked at tight tolerances.

:func:`remark1_search` builds the two-valued step functions
``f = M chi_(0, eps) + chi_(eps, T0) + chi_K`` and measures how much
rearrangement loses.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc

from . import quadrature as quad
from .bounds import compute_t0
from .intervals import GapVector, StepFunction, rearrange_step
from .specfun import si, sinc
from .spectral import (
    HBreakdown,
    alt_exp_sq,
    f_field,
    grad_h,
    h_gap,
    h_value,
    h_values,
    pair_form,
    scale_derivative,
    step_form,
)

__all__ = [
    "SearchConfig",
    "Certificate",
    "RestartOutcome",
    "MinimizeResult",
    "ScanReport",
    "Remark1Report",
    "certificate_check",
    "minimize_h",
    "two_valued",
    "decomposition",
    "counterexample_scan",
    "remark1_search",
]

PI2 = np.pi**2
VIOLATION_TOL = 1e-9
IAC_FLOOR = -4.0 / PI2


@dataclass(frozen=True)
class SearchConfig:
    n: int
    gap_bounds: tuple[float, float] = (1e-3, 5.0)
    restarts: int = 16
    rng_seed: int = 0
    step_tol: float = 1e-8
    value_tol: float = 1e-12
    max_iters: int = 2000
    # optional cap on the total length sum of the odd entries
    t_max: float | None = None

    def __post_init__(self):
        lo, hi = self.gap_bounds
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if lo < 0 or not hi > lo:
            raise ValueError("gap_bounds must satisfy 0 <= lo < hi")
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")
        if self.t_max is not None and not self.t_max > self.n * lo:
            raise ValueError("t_max leaves no room above the lower gap bound")
        object.__setattr__(self, "gap_bounds", (float(lo), float(hi)))

    @property
    def dim(self) -> int:
        return 2 * self.n - 1

    def to_dict(self) -> dict:
        d = asdict(self)
        d["gap_bounds"] = list(self.gap_bounds)
        return d


@dataclass(frozen=True)
class Certificate:
    """Necessary conditions at an interior local minimum of ``H``.

    Second-order residuals use ``s, j = 1..2n``; the sign ``(-1)^{s-j}`` is
    unchanged by the shift from a zero-based labelling.  ``alt_exp_slack`` is
    ``2 - 2 cos(pi T) - |sum_j (-1)^j e^{i pi x_j}|^2``, the end of the chain
    that a non-positive local minimum would have to satisfy.
    """

    stationarity_residual: float
    second_order_residuals: tuple[float, ...]
    impo_slack: float
    scale_residual: float
    h_value: float
    boundary_form_identity_residual: float
    alt_exp_slack: float
    grad_norm: float
    tol: float

    @property
    def stationary(self) -> bool:
        return self.stationarity_residual < self.tol

    @property
    def second_order_ok(self) -> bool:
        return min(self.second_order_residuals) >= -self.tol

    @property
    def impo_ok(self) -> bool:
        return self.impo_slack >= -1e-8

    @property
    def scale_ok(self) -> bool:
        return self.scale_residual < self.tol

    @property
    def alt_exp_ok(self) -> bool:
        return self.alt_exp_slack >= -1e-8

    def to_dict(self) -> dict:
        d = asdict(self)
        d["second_order_residuals"] = list(self.second_order_residuals)
        d.update(stationary=self.stationary, second_order_ok=self.second_order_ok,
                 impo_ok=self.impo_ok, scale_ok=self.scale_ok, alt_exp_ok=self.alt_exp_ok,
                 index_convention="endpoints x_1..x_2n; second-order sums over s = 1..2n")
        return d


def certificate_check(g, tol: float = 1e-6, canonicalize: bool = False) -> Certificate:
    """Evaluate every certificate quantity at ``g``.

    Zero entries are a boundary input and raise ``ValueError`` unless
    ``canonicalize`` merges them away first.
    """
    gv = g if isinstance(g, GapVector) else GapVector(tuple(g))
    if canonicalize:
        gv = gv.canonical()
    if not gv.is_interior:
        raise ValueError("certificate needs strictly positive gaps (boundary input)")
    gaps = np.asarray(gv.gaps)
    xs = np.asarray(gv.endpoints)
    n = gv.n
    T = gv.total_length
    comps = np.column_stack([xs[0::2], xs[1::2]])
    F = f_field(comps, xs)
    stationarity = float(np.max(np.abs(F - si(T))))

    idx = np.arange(2 * n)
    signs = np.where((idx[:, None] - idx[None, :]) % 2 == 0, 1.0, -1.0)
    second = (signs * sinc(xs[:, None] - xs[None, :])).sum(axis=0) - (1.0 - sinc(T))

    # int_0^1 |sum (-1)^j e^{i pi x_j t}|^2 dt = sum_{j,k} (-1)^{j+k} sinc(x_j - x_k)
    l2 = float(quad.closed_l2_norm(quad.AltPoly(tuple(2.0 * np.pi * xs))))
    impo = l2 - (2 * n - 2 * (n - 1) * sinc(T))

    h = h_value(gaps)
    edge = 2.0 - 2.0 * math.cos(math.pi * T)
    alt = alt_exp_sq(xs)
    return Certificate(
        stationarity_residual=stationarity,
        second_order_residuals=tuple(float(v) for v in second),
        impo_slack=float(impo),
        scale_residual=abs(scale_derivative(gaps)),
        h_value=h,
        boundary_form_identity_residual=abs(h - alt / PI2 + edge / PI2),
        alt_exp_slack=edge - alt,
        grad_norm=float(np.linalg.norm(grad_h(gaps))),
        tol=tol,
    )


# -- minimization --------------------------------------------------------------

@dataclass(frozen=True)
class RestartOutcome:
    index: int
    start: tuple[float, ...]
    gaps: tuple[float, ...]
    h_value: float
    grad_norm: float
    converged: bool
    interior: bool
    message: str
    # H with every clamped entry set exactly to zero
    boundary_h: float | None = None
    certificate: Certificate | None = None

    def to_dict(self) -> dict:
        d = {k: v for k, v in asdict(self).items() if k != "certificate"}
        d["start"] = list(self.start)
        d["gaps"] = list(self.gaps)
        d["certificate"] = self.certificate.to_dict() if self.certificate else None
        return d


@dataclass(frozen=True)
class MinimizeResult:
    best: GapVector
    breakdown: HBreakdown
    certificate: Certificate | None
    restarts: tuple[RestartOutcome, ...]
    violations: tuple[dict, ...]
    config: SearchConfig

    @property
    def min_h(self) -> float:
        return self.breakdown.h_value

    def interior_outcomes(self) -> list[RestartOutcome]:
        return [r for r in self.restarts if r.certificate is not None]

    def to_dict(self) -> dict:
        return {
            "min_h": self.min_h,
            "argmin_gaps": list(self.best.gaps),
            "breakdown": self.breakdown.to_dict(),
            "violations": list(self.violations),
            "certificate": self.certificate.to_dict() if self.certificate else None,
            "restarts": [r.to_dict() for r in self.restarts],
            "config_echo": self.config.to_dict(),
        }


def _passes_pruning(gaps: np.ndarray) -> bool:
    # a non-positive interior local minimum needs 2n - 2(n-1) sinc T < pi^2 T
    n = (gaps.size + 1) // 2
    T = float(gaps[0::2].sum())
    return 2 * n - 2 * (n - 1) * sinc(T) < PI2 * T


def _fit_t_max(x: np.ndarray, cfg: SearchConfig) -> np.ndarray:
    lo = cfg.gap_bounds[0]
    T = x[0::2].sum()
    if cfg.t_max is not None and T > cfg.t_max:
        # shrink the lengths towards lo until the cap holds
        excess = (cfg.t_max - cfg.n * lo) / (T - cfg.n * lo)
        x = x.copy()
        x[0::2] = lo + (x[0::2] - lo) * excess
    return x


def _draw_start(rng: np.random.Generator, cfg: SearchConfig, tries: int = 32) -> np.ndarray:
    lo, hi = cfg.gap_bounds
    lo_draw = max(lo, 1e-2)
    x = None
    for _ in range(tries):
        x = np.exp(rng.uniform(math.log(lo_draw), math.log(hi), cfg.dim))
        x = _fit_t_max(x, cfg)
        if _passes_pruning(x):
            break
    return x


def _objective(cfg: SearchConfig):
    lo = cfg.gap_bounds[0]

    def f(x):
        x = np.maximum(x, lo)
        value = h_value(x)
        if cfg.t_max is not None:
            value += 1e3 * max(0.0, float(x[0::2].sum()) - cfg.t_max) ** 2
        return value

    return f


def _newton_polish(x: np.ndarray, cfg: SearchConfig, steps: int = 25) -> tuple[np.ndarray, bool]:
    """Newton iterations on ``grad_h = 0``; accepted only while staying inside the box."""
    lo, hi = cfg.gap_bounds
    for _ in range(steps):
        grad = grad_h(x)
        if np.linalg.norm(grad) < 1e-2 * cfg.step_tol:
            return x, True
        hstep = 1e-6 * np.maximum(1.0, x)
        hess = np.empty((x.size, x.size))
        for k in range(x.size):
            e = np.zeros_like(x)
            e[k] = hstep[k]
            hess[:, k] = (grad_h(x + e) - grad_h(x - e)) / (2 * hstep[k])
        hess = 0.5 * (hess + hess.T)
        try:
            step = np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError:
            return x, False
        trial = x - step
        if np.any(trial <= lo) or np.any(trial >= hi):
            return x, False
        if np.linalg.norm(grad_h(trial)) >= np.linalg.norm(grad):
            return x, False
        x = trial
    return x, np.linalg.norm(grad_h(x)) < cfg.step_tol


def _run_restart(index: int, cfg: SearchConfig, cert_tol: float) -> RestartOutcome:
    rng = np.random.default_rng([cfg.rng_seed, index])
    lo, hi = cfg.gap_bounds
    x0 = _draw_start(rng, cfg)
    bounds = [(lo, hi)] * cfg.dim
    fun = _objective(cfg)
    nm = minimize(fun, x0, method="Nelder-Mead", bounds=bounds,
                  options={"xatol": 1e-4, "fatol": 1e-9,
                           "maxiter": min(cfg.max_iters, 100 * cfg.dim)})
    x = np.clip(nm.x, lo, hi)
    # the simplex only needs rough convergence; the gradient polish follows
    messages = [f"simplex: {nm.message}"]
    if cfg.t_max is None:
        pol = minimize(h_value, x, jac=lambda v: grad_h(np.maximum(v, lo) if lo > 0 else v),
                       method="L-BFGS-B", bounds=bounds,
                       options={"ftol": cfg.value_tol, "gtol": cfg.step_tol,
                                "maxiter": cfg.max_iters})
    else:
        cons = [{"type": "ineq", "fun": lambda v: cfg.t_max - v[0::2].sum(),
                 "jac": lambda v: -np.resize([1.0, 0.0], v.size)}]
        pol = minimize(h_value, x, jac=grad_h, method="SLSQP", bounds=bounds,
                       constraints=cons,
                       options={"ftol": cfg.value_tol, "maxiter": cfg.max_iters})
    messages.append(f"polish: {pol.message}")
    if pol.fun <= nm.fun or not np.isfinite(nm.fun):
        x = np.clip(pol.x, lo, hi)
    converged = bool(pol.success)

    span = hi - lo
    inside = bool(np.all(x > lo + 1e-6 * span) and np.all(x < hi - 1e-6 * span))
    if cfg.t_max is not None and x[0::2].sum() > cfg.t_max - 1e-8:
        inside = False
    if inside:
        x, newton_ok = _newton_polish(x, cfg)
        messages.append("newton: converged" if newton_ok else "newton: stopped early")
        converged = converged or newton_ok
    grad_norm = float(np.linalg.norm(grad_h(x))) if np.all(x > 0) else float("nan")
    interior = inside and grad_norm < 10 * cfg.step_tol

    boundary_h = None
    clamped = x <= lo + 1e-6 * span
    if clamped.any():
        z = x.copy()
        z[clamped] = 0.0
        if z[0::2].sum() > 0:
            boundary_h = h_value(z)
    cert = certificate_check(x, tol=cert_tol) if interior else None
    return RestartOutcome(
        index=index,
        start=tuple(float(v) for v in x0),
        gaps=tuple(float(v) for v in x),
        h_value=h_value(x),
        grad_norm=grad_norm,
        converged=converged,
        interior=interior,
        message="; ".join(messages),
        boundary_h=boundary_h,
        certificate=cert,
    )


def _confirm_violation(gaps: Sequence[float], closed: float) -> dict:
    try:
        oracle = quad.oracle_h(gaps)
    except quad.QuadratureError as exc:
        return {"gaps": list(gaps), "closed_form": closed, "oracle": None,
                "confirmed": False, "note": str(exc)}
    return {"gaps": list(gaps), "closed_form": closed, "oracle": oracle,
            "confirmed": oracle < -VIOLATION_TOL}


def minimize_h(cfg: SearchConfig, cert_tol: float = 1e-6) -> MinimizeResult:
    """Seeded multistart minimization of ``H`` within ``cfg.gap_bounds``.

    Every restart is kept in the result; certificates are attached to the
    restarts that end strictly inside the box at a stationary point.
    """
    outcomes = tuple(_run_restart(i, cfg, cert_tol) for i in range(cfg.restarts))
    best = min(outcomes, key=lambda r: (r.h_value, r.index))
    violations = []
    for r in outcomes:
        if r.h_value < -VIOLATION_TOL:
            check = _confirm_violation(r.gaps, r.h_value)
            if check["confirmed"]:
                violations.append(check)
    gv = GapVector(best.gaps)
    return MinimizeResult(
        best=gv,
        breakdown=h_gap(gv),
        certificate=best.certificate,
        restarts=outcomes,
        violations=tuple(violations),
        config=cfg,
    )


# -- scanning ------------------------------------------------------------------

@dataclass(frozen=True)
class ScanReport:
    n: int
    t_max: float
    samples: int
    min_h: float
    argmin_gaps: tuple[float, ...]
    negative_hits: int
    violations: tuple[dict, ...]
    config: dict
    rows: np.ndarray = field(repr=False, compare=False, default=None)

    def to_dict(self) -> dict:
        return {
            "min_h": self.min_h,
            "argmin_gaps": list(self.argmin_gaps),
            "negative_hits": self.negative_hits,
            "samples": self.samples,
            "violations": list(self.violations),
            "certificate": None,
            "config_echo": self.config,
        }


def _lattice(axes: Sequence[np.ndarray]) -> np.ndarray:
    grids = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([v.ravel() for v in grids])


def counterexample_scan(n: int, t_max: float = 4.0, grid: int = 8, seed: int = 0,
                        samples: int = 4096, hole_max: float = 6.0, tied: bool = False,
                        even: bool = False, max_lattice: int = 200_000) -> ScanReport:
    """Evaluate ``H`` on a scrambled Sobol sample plus a lattice.

    Lengths sum to at most ``t_max``; holes lie in ``(0, hole_max]``.
    ``tied`` restricts ``n = 3`` to ``a2 = a5``.  ``even`` replaces both
    samples by the lattice of even integers ``2, 4, ..., 8`` (no length cap).
    Negative values below ``-1e-9`` are re-evaluated by quadrature before
    they count as violations.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if tied and n != 3:
        raise ValueError("the tied restriction applies to n = 3")
    if not t_max > 0 or not hole_max > 0 or grid < 1 or samples < 0:
        raise ValueError("t_max, hole_max, grid and samples must be positive")
    m = 2 * n - 1
    free = 4 if tied else m
    config = {"n": n, "t_max": t_max, "grid": grid, "seed": seed, "samples": samples,
              "hole_max": hole_max, "tied": tied, "even": even}

    def expand(rows):
        if tied:
            rows = np.column_stack([rows[:, :4], rows[:, 1]])
        return rows

    if even:
        levels = np.arange(2.0, 9.0, 2.0)
        points = int(levels.size) ** free
        if points > max_lattice:
            raise ValueError(f"even lattice has {points} points, above max_lattice")
        rows = expand(_lattice([levels] * free))
    else:
        parts = []
        if samples:
            sob = qmc.Sobol(free + 1, scramble=True, seed=seed).random(samples)
            u = 1.0 - sob  # in (0, 1]
            lengths_idx = [k for k in range(free) if k % 2 == 0]
            holes_idx = [k for k in range(free) if k % 2 == 1]
            raw = np.empty((samples, free))
            share = u[:, lengths_idx]
            raw[:, lengths_idx] = (t_max * u[:, [free]]) * share / share.sum(axis=1, keepdims=True)
            raw[:, holes_idx] = hole_max * u[:, holes_idx]
            parts.append(raw)
        per_axis = grid
        while per_axis > 1 and per_axis**free > max_lattice:
            per_axis -= 1
        config["lattice_per_axis"] = per_axis
        axes = []
        for k in range(free):
            top = t_max if k % 2 == 0 else hole_max
            axes.append(top * np.arange(1, per_axis + 1) / per_axis)
        lat = _lattice(axes)
        keep = lat[:, [k for k in range(free) if k % 2 == 0]].sum(axis=1)
        if tied:
            keep = keep + lat[:, 1]
        parts.append(lat[keep <= t_max * (1 + 1e-12)])
        rows = expand(np.concatenate(parts))

    hs = h_values(rows)
    worst = int(np.argmin(hs))
    violations = []
    for i in np.flatnonzero(hs < -VIOLATION_TOL):
        check = _confirm_violation([float(v) for v in rows[i]], float(hs[i]))
        if check["confirmed"]:
            violations.append(check)
    return ScanReport(
        n=n,
        t_max=t_max,
        samples=int(rows.shape[0]),
        min_h=float(hs[worst]),
        argmin_gaps=tuple(float(v) for v in rows[worst]),
        negative_hits=int(np.sum(hs < 0)),
        violations=tuple(violations),
        config=config,
        rows=np.column_stack([rows, hs]),
    )


# -- two-valued construction -------------------------------------------------

@dataclass(frozen=True)
class Remark1Report:
    T: float
    t0: float
    margin: float
    function: StepFunction | None
    rearranged: StepFunction | None
    eps: float | None
    M: float | None
    c: float | None
    w: float | None
    C: float | None
    oracle_margin: float | None
    candidates: int

    @property
    def found(self) -> bool:
        return self.margin > 0

    @property
    def confirmed(self) -> bool:
        return self.oracle_margin is not None and self.oracle_margin > 0

    def to_dict(self) -> dict:
        return {
            "T": self.T,
            "t0": self.t0,
            "margin": self.margin,
            "found": self.found,
            "confirmed": self.confirmed,
            "function": self.function.to_dict() if self.function else None,
            "rearranged": self.rearranged.to_dict() if self.rearranged else None,
            "eps": self.eps,
            "M": self.M,
            "c": self.c,
            "w": self.w,
            "C": self.C,
            "oracle_margin": self.oracle_margin,
            "candidates": self.candidates,
        }


def two_valued(eps: float, M: float, t0: float, K: tuple[float, float]) -> StepFunction:
    """``M chi_(0, eps) + chi_(eps, t0) + chi_K``."""
    return StepFunction(((0.0, eps, M), (eps, t0, 1.0), (K[0], K[1], 1.0)))


def decomposition(eps: float, M: float, t0: float, K: tuple[float, float]) -> tuple[float, float]:
    """``(w, C)`` with ``(f, f) - (f*, f*) = M eps w + C``.

    ``M^2 (E, E)`` cancels between ``f`` and ``f*`` (``E = (0, eps)``); the
    cross terms with ``E`` give ``w`` and the unit-height parts give ``C``.
    """
    T = t0 + (K[1] - K[0])
    E = StepFunction(((0.0, eps, 1.0),))
    K_part = StepFunction(((K[0], K[1], 1.0),))
    tail = StepFunction(((t0, T, 1.0),))
    w = 2.0 * (step_form(E, K_part) - step_form(E, tail)) / eps
    left = StepFunction(((eps, t0, 1.0), (K[0], K[1], 1.0)))
    right = StepFunction(((eps, T, 1.0),))
    C = step_form(left, left) - step_form(right, right)
    return w, C


def _sweep_margins(eps: float, M: float, t0: float, cs: np.ndarray,
                   width: float) -> np.ndarray:
    """``(f, f) - (f*, f*)`` for every ``K = [c, c + width]``, by bilinearity."""
    T = t0 + width
    E, mid, K = (0.0, eps), (eps, t0), (cs, cs + width)
    ff = (M * M * pair_form(E, E) + pair_form(mid, mid) + pair_form(K, K)
          + 2 * M * pair_form(E, mid) + 2 * M * pair_form(E, K) + 2 * pair_form(mid, K))
    rest = (eps, T)
    fsfs = M * M * pair_form(E, E) + 2 * M * pair_form(E, rest) + pair_form(rest, rest)
    return ff - fsfs


def remark1_search(T: float, eps_grid: Sequence[float] = (1e-2, 1e-3, 1e-4),
                   M_grid: Sequence[float] = (1e2, 1e3, 1e4),
                   K_candidates: Iterable[float] | None = None,
                   confirm: bool = True) -> Remark1Report:
    """Best ``(f, f) - (f*, f*)`` over two-valued functions with ``|supp f| = T``.

    ``K_candidates`` yields left endpoints ``c`` of ``K = [c, c + T - T0]``;
    by default ``c`` sweeps ``(1, 10]`` in steps of 0.01.  The best
    positive margin is re-evaluated with the quadrature oracle.
    """
    t0 = compute_t0()
    if T < t0 - 1e-12:
        raise ValueError(f"T must be at least T0 = {t0:.12f}")
    width = T - t0
    if width <= 1e-12:
        return Remark1Report(T, t0, 0.0, None, None, None, None, None, None, None, None, 0)
    if K_candidates is None:
        K_candidates = 1.0 + 0.01 * np.arange(1, 901)
    cs = np.array([float(c) for c in K_candidates if float(c) >= t0])
    eps_ok = [float(e) for e in eps_grid if 0 < e < t0]
    best = None
    count = 0
    if cs.size:
        for eps in eps_ok:
            for M in M_grid:
                margins = _sweep_margins(eps, float(M), t0, cs, width)
                count += cs.size
                k = int(np.argmax(margins))
                if best is None or margins[k] > best[0]:
                    best = (float(margins[k]), eps, float(M), float(cs[k]))
    if best is None:
        return Remark1Report(T, t0, 0.0, None, None, None, None, None, None, None, None, count)
    _, eps, M, c = best
    f = two_valued(eps, M, t0, (c, c + width))
    fs = rearrange_step(f)
    margin = step_form(f, f) - step_form(fs, fs)
    w, C = decomposition(eps, M, t0, (c, c + width))
    oracle = None
    if confirm and margin > 0:
        oracle = quad.oracle_step_form(f, f) - quad.oracle_step_form(fs, fs)
    return Remark1Report(T, t0, float(margin), f, fs, eps, M, c, w, C, oracle, count)
