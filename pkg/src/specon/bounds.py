"""Sampled verification of the quantitative bounds, and the constant ``T0``.

Each verifier returns a :class:`BoundReport`.  ``passed`` is derived from
``worst_slack`` and the stated tolerance (and from the sub-checks), never set
by hand.  A violation of a proven bound is treated as a bug here, so every
violation record carries the input together with closed-form and oracle
values.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from . import quadrature as quad
from .specfun import sinc
from .spectral import h_gap, h_values, phi_two_interval
from .toperator import t_apply, t_apply_array, t_k_apply

__all__ = [
    "BoundReport",
    "side_lobe",
    "compute_t0",
    "verify_t0",
    "verify_t_identities",
    "verify_prop_equal",
    "verify_form_agreement",
    "verify_wt_threshold",
    "verify_two_interval",
    "verify_l2_bounds",
    "verify_iac_and_cor_new",
    "verify_avg_lemma",
    "verify_special_cases",
]

PI2 = np.pi**2
CLOSED_TOL = 1e-9
QUAD_TOL = 1e-6
# oracle evaluations are expensive; dump at most this many per report
MAX_DUMPS = 5


@dataclass(frozen=True)
class BoundReport:
    """Outcome of one sampled check.

    ``strict`` checks need ``worst_slack > -tolerance``, the others
    ``worst_slack >= -tolerance``.  A report passes only if its sub-checks
    pass too.
    """

    name: str
    samples: int
    worst_slack: float
    worst_case: dict
    tolerance: float
    strict: bool = False
    checks: tuple["BoundReport", ...] = ()
    violations: tuple[dict, ...] = ()
    extras: dict = field(default_factory=dict)

    @property
    def own_passed(self) -> bool:
        if not math.isfinite(self.worst_slack):
            return False
        if self.strict:
            return self.worst_slack > -self.tolerance
        return self.worst_slack >= -self.tolerance

    @property
    def passed(self) -> bool:
        return self.own_passed and all(c.passed for c in self.checks)

    def failures(self) -> list[str]:
        out = [] if self.own_passed else [self.name]
        for c in self.checks:
            out.extend(f"{self.name}/{name}" for name in c.failures())
        return out

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "samples": self.samples,
            "worst_slack": self.worst_slack,
            "worst_case": self.worst_case,
            "tolerance": self.tolerance,
            "strict": self.strict,
            "passed": self.passed,
            "violations": list(self.violations),
            "extras": self.extras,
            "checks": [c.to_dict() for c in self.checks],
        }


def _log_uniform(rng: np.random.Generator, size, lo: float, hi: float) -> np.ndarray:
    return np.exp(rng.uniform(math.log(lo), math.log(hi), size))


def _split(samples: int, parts: int) -> list[int]:
    base, extra = divmod(samples, parts)
    return [base + (i < extra) for i in range(parts)]


def _h_dump(gaps: np.ndarray) -> dict:
    # rows of mixed length arrive NaN-padded
    gaps = [float(v) for v in gaps if not math.isnan(v)]
    try:
        oracle = quad.oracle_h(gaps)
    except quad.QuadratureError as exc:
        oracle = f"oracle failed: {exc}"
    return {"gaps": gaps, "closed_form": float(h_values(np.array([gaps]))[0]), "oracle": oracle}


def _scan_report(name, rows: np.ndarray, slack: np.ndarray, tolerance: float, strict: bool,
                 checks=(), extras=None, dump=_h_dump) -> BoundReport:
    """Report over a batch of gap rows with per-row slack."""
    worst = int(np.argmin(slack))
    case = [float(v) for v in rows[worst] if not math.isnan(v)]
    bad = slack <= -tolerance if strict else slack < -tolerance
    violations = tuple(dump(rows[i]) for i in np.flatnonzero(bad)[:MAX_DUMPS])
    return BoundReport(
        name=name,
        samples=int(rows.shape[0]),
        worst_slack=float(slack[worst]),
        worst_case={"input": case, "slack": float(slack[worst])},
        tolerance=tolerance,
        strict=strict,
        checks=tuple(checks),
        violations=violations,
        extras=extras or {},
    )


def _merge(name: str, parts: Sequence[BoundReport], extras=None) -> BoundReport:
    """Parent report whose own slack is the worst (normalized) child slack."""
    worst = min(parts, key=lambda r: r.worst_slack + r.tolerance)
    return BoundReport(
        name=name,
        samples=sum(r.samples for r in parts),
        worst_slack=worst.worst_slack + worst.tolerance,
        worst_case={"check": worst.name, **worst.worst_case},
        tolerance=0.0,
        strict=False,
        checks=tuple(parts),
        extras=extras or {},
    )


# -- the critical constant ----------------------------------------------------

def side_lobe() -> tuple[float, float]:
    """Location and height of ``max_{y >= 1} sinc(y)``: the first positive side lobe.

    The lobe is the root of ``pi y cos(pi y) - sin(pi y)`` in ``(2, 3)``,
    where that function is strictly decreasing.
    """
    y = brentq(lambda t: np.pi * t * math.cos(np.pi * t) - math.sin(np.pi * t), 2.0, 3.0,
               xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    return y, sinc(y)


def compute_t0() -> float:
    """Smallest ``x > 0`` with ``sinc(x) = max_{y >= 1} sinc(y)`` (about 0.884)."""
    _, peak = side_lobe()
    return brentq(lambda x: sinc(x) - peak, 0.5, 1.0, xtol=1e-15,
                  rtol=4 * np.finfo(float).eps, maxiter=200)


def verify_t0() -> BoundReport:
    """``T0`` lies in ``(0.883, 0.885)`` and ``sinc(T0)`` matches the lobe height to 1e-10."""
    y, peak = side_lobe()
    t0 = compute_t0()
    miss = abs(sinc(t0) - peak)
    lobe = abs(math.tan(np.pi * y) - np.pi * y)
    slack = min(1e-10 - miss, 1e-10 - lobe, t0 - 0.883, 0.885 - t0)
    return BoundReport("t0", 1, slack, {"t0": t0, "side_lobe": y, "peak": peak,
                                        "sinc_mismatch": miss, "tan_residual": lobe},
                       0.0, strict=True)


# -- identities -----------------------------------------------------------------

def verify_t_identities(samples: int, seed: int, max_len: int = 11) -> BoundReport:
    """``T(x) = T(x^2) = 0``, ``T_k(x) = 0`` and ``T(1) = -(n-1)``.

    Exact in rational arithmetic on random odd-length tuples; the float
    evaluation of the same identities must stay below ``1e-12`` (relative to
    the tuple size).
    """
    py_rng = random.Random(seed)
    rng = np.random.default_rng(seed)
    worst_exact = 0
    worst_exact_case = None
    worst_float = 0.0
    worst_float_case = None
    lengths = range(1, max_len + 1, 2)
    for _ in range(samples):
        m = py_rng.choice(lengths)
        c = [Fraction(py_rng.randint(0, 10**6), py_rng.randint(1, 10**4)) for _ in range(m)]
        n = (m + 1) // 2
        residuals = [t_apply(c, lambda x: x), t_apply(c, lambda x: x * x),
                     t_apply(c, lambda x: 1) + (n - 1)]
        residuals += [t_k_apply(c, k, lambda x: x) for k in range(1, m + 1)]
        bad = sum(r != 0 for r in residuals)
        if bad > worst_exact:
            worst_exact, worst_exact_case = bad, [str(v) for v in c]
        cf = rng.uniform(0.0, 10.0, m)
        scale = max(1.0, float(cf.sum())) ** 2
        fres = max(abs(t_apply_array(cf, lambda x: x)),
                   abs(t_apply_array(cf, lambda x: x * x)) / scale)
        if fres > worst_float:
            worst_float, worst_float_case = fres, [float(v) for v in cf]
    exact = BoundReport("exact_rational", samples, -float(worst_exact),
                        {"input": worst_exact_case, "nonzero_residuals": worst_exact}, 0.0)
    floating = BoundReport("float_residual", samples, 1e-12 - worst_float,
                           {"input": worst_float_case, "residual": worst_float}, 0.0, strict=True)
    return _merge("t_identities", [exact, floating])


def verify_prop_equal(samples: int, seed: int, max_n: int = 5) -> BoundReport:
    """The two ``int_0^inf |.|^2 / t^2`` integrals coincide (head quadrature + closed tail)."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    case = None
    for n in rng.integers(1, max_n + 1, samples):
        nodes = np.sort(rng.uniform(0.0, 10.0, 2 * n))
        p = quad.AltPoly(tuple(nodes))
        two = quad.AltPoly((0.0, p.pair_gap_sum))
        a = quad.poly_sq_integral_infinite(p)
        b = quad.poly_sq_integral_infinite(two)
        diff = abs(a.value - b.value) if a.converged and b.converged else math.inf
        if diff >= worst:
            worst, case = diff, {"input": [float(v) for v in nodes], "general": a.value,
                                 "two_term": b.value}
    return BoundReport("prop_equal", samples, QUAD_TOL - worst, case or {}, 0.0, strict=True)


def verify_form_agreement(samples: int, seed: int, max_n: int = 4) -> BoundReport:
    """Closed form of ``H`` against its two t-integral representations."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    case = None
    for n in rng.integers(2, max_n + 1, samples):
        gaps = _log_uniform(rng, 2 * n - 1, 1e-2, 10.0)
        b = h_gap(gaps)
        dis = b.max_disagreement if b.converged else math.inf
        if not dis < worst:
            worst, case = dis, {"input": [float(v) for v in gaps], **b.to_dict()}
    return BoundReport("form_agreement", samples, 1e-7 - worst, case or {}, 0.0, strict=True)


# -- sampled inequalities ---------------------------------------------------------

def verify_wt_threshold(samples: int, seed: int) -> BoundReport:
    """``H >= 0`` whenever the total length is at most 4/3 (unit bandwidth)."""
    rng = np.random.default_rng(seed)
    limit = 4.0 / 3.0
    parts = []
    for n, count in zip(range(2, 7), _split(samples, 5)):
        if count == 0:
            continue
        gaps = _log_uniform(rng, (count, 2 * n - 1), 1e-2, 5.0)
        target = rng.uniform(0.0, limit, count)
        target[0] = limit
        gaps *= (target / gaps[:, 0::2].sum(axis=1))[:, None]
        parts.append((gaps, h_values(gaps)))
    checks = []
    if parts:
        rows = np.concatenate([np.pad(gp, ((0, 0), (0, 11 - gp.shape[1])),
                                      constant_values=np.nan) for gp, _ in parts])
        hs = np.concatenate([h for _, h in parts])
        checks.append(_scan_report("random", rows, hs, CLOSED_TOL, False))
    # two equal lengths summing to 4/3 with a hole in between
    eps = np.linspace(0.01, 6.0, 600)
    sym = np.column_stack([np.full_like(eps, limit / 2), eps, np.full_like(eps, limit / 2)])
    checks.append(_scan_report("symmetric_at_4_3", sym, h_values(sym), 0.0, True))
    # zero holes: the union is an interval and H vanishes
    zh = []
    for n in range(2, 7):
        lengths = _log_uniform(rng, (50, n), 1e-2, 5.0)
        row = np.zeros((50, 2 * n - 1))
        row[:, 0::2] = lengths
        zh.append(np.abs(h_values(row)).max())
    worst_zero = float(max(zh))
    checks.append(BoundReport("zero_holes", 250, 1e-12 - worst_zero,
                              {"max_abs_h": worst_zero}, 0.0))
    return _merge("wt_threshold", checks)


def verify_two_interval(grid_step: float = 0.05, random_samples: int = 10**4, seed: int = 0,
                        extent: float = 6.0, symmetry_samples: int = 40) -> BoundReport:
    """``H((a, eps, b)) > 0`` on a lattice of ``(0, extent]^3`` and random points."""
    if not grid_step > 0:
        raise ValueError("grid_step must be positive")
    rng = np.random.default_rng(seed)
    axis = np.arange(1, int(round(extent / grid_step)) + 1) * grid_step
    a, e, b = np.meshgrid(axis, axis, axis, indexing="ij")
    grid = np.column_stack([a.ravel(), e.ravel(), b.ravel()])
    checks = [_scan_report("grid", grid, h_values(grid), 0.0, True,
                           extras={"grid_step": grid_step, "extent": extent})]
    pts = rng.uniform(0.0, extent, (random_samples, 3))
    pts = np.where(pts == 0.0, extent, pts)
    checks.append(_scan_report("random", pts, h_values(pts), 0.0, True))

    # Phi(a, b, eps) = Phi(eps, b, a), and 16/pi^2 Phi = H
    worst_sym = 0.0
    worst_rel = 0.0
    sym_case = None
    for a_, e_, b_ in rng.uniform(0.05, extent, (symmetry_samples, 3)):
        p1 = phi_two_interval(a_, b_, e_)
        p2 = phi_two_interval(e_, b_, a_)
        h = float(h_values(np.array([[a_, e_, b_]]))[0])
        d = abs(p1 - p2)
        worst_rel = max(worst_rel, abs(16.0 / PI2 * p1 - h))
        if d >= worst_sym:
            worst_sym, sym_case = d, {"input": [a_, e_, b_], "phi": p1, "phi_swapped": p2}
    checks.append(BoundReport("phi_symmetry", symmetry_samples, CLOSED_TOL - worst_sym,
                              sym_case or {}, 0.0))
    checks.append(BoundReport("phi_matches_h", symmetry_samples, QUAD_TOL - worst_rel,
                              {"max_abs_difference": worst_rel}, 0.0))

    # hole shrinking to zero: H decreases to 0 from above
    eps = np.geomspace(1e-1, 1e-6, 11)
    row = np.column_stack([np.ones_like(eps), eps, np.ones_like(eps)])
    hs = h_values(row)
    steps = hs[:-1] - hs[1:]
    slack = min(float(hs.min()), float(steps.min()))
    checks.append(BoundReport("eps_to_zero", eps.size, slack,
                              {"eps": eps.tolist(), "h": hs.tolist()}, 0.0, strict=True))
    h222 = float(h_values(np.array([[2.0, 2.0, 2.0]]))[0])
    checks.append(BoundReport("all_twos", 1, h222, {"input": [2.0, 2.0, 2.0], "h": h222},
                              0.0, strict=True))
    return _merge("two_interval", checks)


def verify_l2_bounds(samples: int, seed: int, max_n: int = 12,
                     node_range: float = 200.0) -> BoundReport:
    """``int_{-1/2}^{1/2} |P|^2 < min(54n - 47, (pi/2) sum of pair gaps)``.

    Random polynomials plus clustered, arithmetic-progression and separated
    families.  For the separated families the report records
    ``c = min norm / n``.
    """
    rng = np.random.default_rng(seed)

    def family(name, rows_by_n, extras=None):
        rows_all, slack_all = [], []
        for rows in rows_by_n:
            n = rows.shape[1] // 2
            norm = quad.closed_l2_norm_batch(rows)
            cap = np.minimum(54 * n - 47, 0.5 * np.pi * (rows[:, 1::2] - rows[:, 0::2]).sum(1))
            rows_all.append(np.pad(rows, ((0, 0), (0, 2 * max_n - rows.shape[1])),
                                   constant_values=np.nan))
            slack_all.append(cap - norm)
        rows = np.concatenate(rows_all)
        slack = np.concatenate(slack_all)

        def dump(row):
            nodes = row[~np.isnan(row)]
            p = quad.AltPoly(tuple(nodes))
            head = quad.integrate(lambda t: np.abs(p(t)) ** 2, -0.5, 0.5,
                                  quad.ORACLE_SPEC)
            return {"nodes": nodes.tolist(), "closed_form": quad.closed_l2_norm(p),
                    "oracle": head.value, "cap": min(54 * p.n - 47, 0.5 * np.pi * p.pair_gap_sum)}

        return _scan_report(name, rows, slack, 0.0, True, extras=extras, dump=dump)

    random_rows = []
    for n, count in zip(range(1, max_n + 1), _split(samples, max_n)):
        if count:
            random_rows.append(np.sort(rng.uniform(0.0, node_range, (count, 2 * n)), axis=1))
    checks = [family("random", random_rows)] if random_rows else []

    beta = np.geomspace(1e-4, 1e3, 141)
    two = np.column_stack([np.zeros_like(beta), beta])
    checks.append(family("two_term", [two]))

    clustered = []
    for n in range(1, max_n + 1):
        centre = rng.uniform(0.0, node_range, (200, 1))
        width = _log_uniform(rng, (200, 1), 1e-3, 10.0)
        clustered.append(np.sort(centre + width * rng.uniform(0.0, 1.0, (200, 2 * n)), axis=1))
    checks.append(family("clustered", clustered))

    progressions = []
    steps = np.geomspace(1e-2, 50.0, 120)
    for n in range(1, max_n + 1):
        progressions.append(steps[:, None] * np.arange(2 * n)[None, :])
    checks.append(family("arithmetic", progressions))

    # isolated pairs at spacing 1e3; pair gap 2 pi makes each pair contribute 2
    sharp = {}
    for label, gap in (("separated_pairs", 2.0 * np.pi), ("separated_unit_pairs", 1.0)):
        rows = [np.array([[1e3 * (k // 2) + gap * (k % 2) for k in range(2 * n)]])
                for n in range(1, max_n + 1)]
        norms = [float(quad.closed_l2_norm_batch(r)[0]) for r in rows]
        c = min(v / (i + 1) for i, v in enumerate(norms))
        sharp[label] = c
        checks.append(family(label, rows, extras={"pair_gap": gap, "norms": norms, "c": c}))
    return _merge("l2_bounds", checks, extras={"linear_constant": sharp})


def verify_iac_and_cor_new(samples: int, seed: int, max_n: int = 8) -> BoundReport:
    """``-4/pi^2 < H < (54n - 51)/pi^2`` on random gap vectors."""
    rng = np.random.default_rng(seed)
    checks = []
    for n, count in zip(range(2, max_n + 1), _split(samples, max_n - 1)):
        if count == 0:
            continue
        gaps = _log_uniform(rng, (count, 2 * n - 1), 1e-2, 30.0)
        hs = h_values(gaps)
        slack = np.minimum(hs + 4.0 / PI2, (54 * n - 51) / PI2 - hs)
        checks.append(_scan_report(f"n={n}", gaps, slack, 0.0, True,
                                   extras={"min_h": float(hs.min()), "max_h": float(hs.max())}))
    single = float(h_values(np.array([[1.7]]))[0])
    checks.append(BoundReport("n=1", 1, min(single + 4 / PI2, 3 / PI2 - single) - abs(single),
                              {"h": single}, 0.0, strict=True))
    # wide holes: H settles to a positive limit under the cap
    holes = np.geomspace(10.0, 1e5, 9)
    ray = np.column_stack([np.ones_like(holes), holes, np.full_like(holes, 0.5)])
    hs = h_values(ray)
    drift = abs(hs[-1] - hs[-2])
    slack = min(float(hs.min()), (54 * 2 - 51) / PI2 - float(hs.max()), 1e-3 - drift)
    checks.append(BoundReport("wide_holes", holes.size, slack,
                              {"holes": holes.tolist(), "h": hs.tolist()}, 0.0, strict=True))
    return _merge("iac_cor_new", checks)


def _avg_closed(gaps: np.ndarray) -> np.ndarray:
    phi = lambda x: 0.5 * (1.0 - sinc(x))  # noqa: E731
    return 0.5 * h_values(gaps) - 2.0 / PI2 * t_apply_array(gaps, phi)


def verify_avg_lemma(samples: int, seed: int, max_n: int = 4) -> BoundReport:
    """``int_0^1 H(s a) ds`` by quadrature against its closed form, and the ``27(n-1)/pi^2`` cap."""
    rng = np.random.default_rng(seed)
    worst_res, res_case = 0.0, None
    worst_cap, cap_case = math.inf, None
    for n in rng.integers(2, max_n + 1, samples):
        gaps = _log_uniform(rng, 2 * n - 1, 1e-2, 10.0)
        res = quad.integrate(lambda s: h_values(np.outer(s, gaps)), 0.0, 1.0,
                             quad.QuadratureSpec(1e-11, 1e-11))
        closed = float(_avg_closed(gaps[None, :])[0])
        r = abs(res.value - closed) if res.converged else math.inf
        if r >= worst_res:
            worst_res, res_case = r, {"input": gaps.tolist(), "quadrature": res.value,
                                      "closed_form": closed, "converged": res.converged}
        cap = 27 * (n - 1) / PI2 - res.value
        if cap < worst_cap:
            worst_cap, cap_case = cap, {"input": gaps.tolist(), "average": res.value}
    checks = [
        BoundReport("identity", samples, QUAD_TOL - worst_res, res_case or {}, 0.0, strict=True),
        BoundReport("cap", samples, worst_cap if samples else 0.0, cap_case or {}, 0.0,
                    strict=True),
    ]
    single = abs(float(_avg_closed(np.array([[2.5]]))[0]))
    checks.append(BoundReport("n=1", 1, 1e-12 - single, {"closed_form": single}, 0.0))
    return _merge("avg_lemma", checks)


def verify_special_cases(lattice_step: float = 0.25) -> BoundReport:
    """Even-integer gap vectors, and ``n = 3`` with equal holes, give ``H > 0``."""
    checks = []
    for n in range(2, 5):
        grids = np.meshgrid(*([np.array([2.0, 4.0, 6.0])] * (2 * n - 1)), indexing="ij")
        rows = np.column_stack([v.ravel() for v in grids])
        checks.append(_scan_report(f"even_n={n}", rows, h_values(rows), 0.0, True))
    axis = np.arange(1, int(round(4.0 / lattice_step)) + 1) * lattice_step
    a1, a2, a3, a4 = np.meshgrid(axis, axis, axis, axis, indexing="ij")
    # the last length a5 equals the first hole a2
    rows = np.column_stack([a1.ravel(), a2.ravel(), a3.ravel(), a4.ravel(), a2.ravel()])
    checks.append(_scan_report("n=3_equal_holes", rows, h_values(rows), 0.0, True,
                               extras={"lattice_step": lattice_step}))
    return _merge("special_cases", checks)
