"""Finite unions of closed intervals, gap vectors and step functions."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = [
    "IntervalUnion",
    "GapVector",
    "StepFunction",
    "from_gaps",
    "to_gaps",
    "rearrange",
    "dilate",
    "rearrange_step",
    "merge_tol",
]


def merge_tol(x: float) -> float:
    """Distance below which two endpoints near ``x`` are identified."""
    return 1e-12 * max(1.0, abs(x))


def _check_finite(values: Iterable[float], what: str) -> tuple[float, ...]:
    out = tuple(float(v) for v in values)
    if not all(math.isfinite(v) for v in out):
        raise ValueError(f"{what} must be finite")
    return out


@dataclass(frozen=True)
class IntervalUnion:
    """``[x1, x2] u [x3, x4] u ... u [x_{2n-1}, x_{2n}]`` given by sorted endpoints.

    Zero-length components and zero gaps are tolerated until
    :meth:`canonical` is called.
    """

    endpoints: tuple[float, ...]

    def __post_init__(self):
        xs = _check_finite(self.endpoints, "endpoints")
        if len(xs) == 0 or len(xs) % 2:
            raise ValueError("an interval union needs a positive even number of endpoints")
        if any(b < a for a, b in zip(xs, xs[1:])):
            raise ValueError("endpoints must be nondecreasing")
        object.__setattr__(self, "endpoints", xs)
        if self.measure <= 0:
            raise ValueError("interval union must have positive measure")

    @classmethod
    def from_components(cls, components: Iterable[tuple[float, float]]) -> "IntervalUnion":
        xs: list[float] = []
        for lo, hi in components:
            xs.extend((lo, hi))
        return cls(tuple(xs))

    @property
    def n(self) -> int:
        return len(self.endpoints) // 2

    @property
    def components(self) -> list[tuple[float, float]]:
        xs = self.endpoints
        return [(xs[2 * k], xs[2 * k + 1]) for k in range(self.n)]

    @property
    def measure(self) -> float:
        return sum(hi - lo for lo, hi in self.components)

    def canonical(self) -> "IntervalUnion":
        """Drop zero-length components and merge components across zero gaps."""
        merged: list[list[float]] = []
        for lo, hi in self.components:
            if hi - lo <= merge_tol(hi):
                continue
            if merged and lo - merged[-1][1] <= merge_tol(lo):
                merged[-1][1] = hi
            else:
                merged.append([lo, hi])
        return IntervalUnion.from_components(merged)

    def translate(self, shift: float) -> "IntervalUnion":
        return IntervalUnion(tuple(x + shift for x in self.endpoints))

    def contains(self, x: float) -> bool:
        return any(lo <= x <= hi for lo, hi in self.components)

    def to_dict(self) -> dict:
        return {"endpoints": list(self.endpoints)}

    @classmethod
    def from_dict(cls, data: dict) -> "IntervalUnion":
        return cls(tuple(data["endpoints"]))


@dataclass(frozen=True)
class GapVector:
    """Alternating lengths and holes ``(a1, ..., a_{2n-1})``.

    Odd positions (1-based) are interval lengths, even positions are the
    holes between consecutive intervals.
    """

    gaps: tuple[float, ...]

    def __post_init__(self):
        gs = _check_finite(self.gaps, "gaps")
        if len(gs) % 2 == 0:
            raise ValueError("a gap vector has odd length 2n-1")
        if any(v < 0 for v in gs):
            raise ValueError("gap entries must be nonnegative")
        object.__setattr__(self, "gaps", gs)
        if self.total_length <= 0:
            raise ValueError("total length must be positive")

    @property
    def n(self) -> int:
        return (len(self.gaps) + 1) // 2

    @property
    def lengths(self) -> tuple[float, ...]:
        return self.gaps[0::2]

    @property
    def holes(self) -> tuple[float, ...]:
        return self.gaps[1::2]

    @property
    def total_length(self) -> float:
        return math.fsum(self.gaps[0::2])

    @property
    def endpoints(self) -> tuple[float, ...]:
        """Endpoints anchored at ``x1 = 0``; zero entries kept."""
        xs = [0.0]
        for a in self.gaps:
            xs.append(xs[-1] + a)
        return tuple(xs)

    @property
    def is_interior(self) -> bool:
        return all(v > 0 for v in self.gaps)

    def canonical(self) -> "GapVector":
        return to_gaps(from_gaps(self))

    def scaled(self, s: float) -> "GapVector":
        return GapVector(tuple(s * v for v in self.gaps))

    def to_dict(self) -> dict:
        return {"gaps": list(self.gaps)}

    @classmethod
    def from_dict(cls, data: dict) -> "GapVector":
        return cls(tuple(data["gaps"]))


@dataclass(frozen=True)
class StepFunction:
    """Nonnegative piecewise-constant function; ``pieces`` are ``(lo, hi, value)``."""

    pieces: tuple[tuple[float, float, float], ...]

    def __post_init__(self):
        pieces = []
        for piece in self.pieces:
            lo, hi, v = _check_finite(piece, "step function pieces")
            if hi <= lo:
                raise ValueError(f"empty piece ({lo}, {hi})")
            if v < 0:
                raise ValueError("step function values must be nonnegative")
            pieces.append((lo, hi, v))
        pieces.sort()
        for (_, hi, _), (lo, _, _) in zip(pieces, pieces[1:]):
            if lo < hi:
                raise ValueError("step function pieces overlap")
        object.__setattr__(self, "pieces", tuple(pieces))

    @classmethod
    def indicator(cls, A: IntervalUnion, value: float = 1.0) -> "StepFunction":
        return cls(tuple((lo, hi, value) for lo, hi in A.canonical().components))

    @property
    def support_measure(self) -> float:
        return sum(hi - lo for lo, hi, v in self.pieces if v > 0)

    def scaled(self, c: float) -> "StepFunction":
        return StepFunction(tuple((lo, hi, c * v) for lo, hi, v in self.pieces))

    def __call__(self, x: float) -> float:
        for lo, hi, v in self.pieces:
            if lo < x < hi:
                return v
        return 0.0

    def to_dict(self) -> dict:
        return {"pieces": [{"lo": lo, "hi": hi, "value": v} for lo, hi, v in self.pieces]}

    @classmethod
    def from_dict(cls, data: dict) -> "StepFunction":
        return cls(tuple((p["lo"], p["hi"], p["value"]) for p in data["pieces"]))


def from_gaps(g: GapVector | Sequence[float], canonical: bool = True) -> IntervalUnion:
    """Interval union with ``x1 = 0`` and ``x_{j+1} = x_j + a_j``."""
    if not isinstance(g, GapVector):
        g = GapVector(tuple(g))
    A = IntervalUnion(g.endpoints)
    return A.canonical() if canonical else A


def to_gaps(A: IntervalUnion) -> GapVector:
    xs = A.endpoints
    return GapVector(tuple(b - a for a, b in zip(xs, xs[1:])))


def rearrange(A: IntervalUnion) -> IntervalUnion:
    """The decreasing rearrangement of ``chi_A``: the interval ``[0, |A|]``."""
    return IntervalUnion((0.0, A.measure))


def dilate(A: IntervalUnion, s: float) -> IntervalUnion:
    if not s > 0:
        raise ValueError("dilation factor must be positive")
    return IntervalUnion(tuple(s * x for x in A.endpoints))


def rearrange_step(f: StepFunction) -> StepFunction:
    """Decreasing rearrangement: value levels sorted descending, stacked from 0."""
    levels: dict[float, float] = {}
    for lo, hi, v in f.pieces:
        if v > 0:
            levels[v] = levels.get(v, 0.0) + (hi - lo)
    pieces = []
    start = 0.0
    for v in sorted(levels, reverse=True):
        end = start + levels[v]
        pieces.append((start, end, v))
        start = end
    return StepFunction(tuple(pieces))
