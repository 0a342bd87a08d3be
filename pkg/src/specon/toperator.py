"""The signed block-sum operator ``T({c_j}, phi)``.

For ``c = (c_1, ..., c_{2n-1})``::

    T(c, phi) = sum_{s=1}^{2n-1} (-1)^s sum_{i=1}^{2n-s} phi(c_i + ... + c_{i+s-1})
                + phi(c_1 + c_3 + ... + c_{2n-1})

The generic entry points only add and call ``phi``, so they work unchanged
with ``fractions.Fraction`` inputs (exact checks) and with sequences of numpy
arrays (one column per coordinate).  :func:`t_apply_array` is the fast path
for float batches.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "TTerm",
    "t_terms",
    "t_apply",
    "t_apply_prefix",
    "t_k_apply",
    "t_apply_array",
    "term_count",
    "block_structure",
]


@dataclass(frozen=True)
class TTerm:
    sign: int
    argument: object
    # 0-based indices of the c_j summed into ``argument``
    indices: tuple[int, ...]


def _check_odd(c: Sequence) -> int:
    m = len(c)
    if m % 2 == 0:
        raise ValueError("T operator needs an odd number 2n-1 of entries")
    return m


def _sum(values):
    it = iter(values)
    total = next(it)
    for v in it:
        total = total + v
    return total


def term_count(m: int) -> int:
    """Number of terms for an input of length ``m = 2n-1``."""
    return sum(m + 1 - s for s in range(1, m + 1)) + 1


def t_terms(c: Sequence) -> list[TTerm]:
    """All signed terms, ordered by block length, then start; alternating term last."""
    m = _check_odd(c)
    # running sums from each start give the same left folds as summing each block
    blocks = {}
    for i in range(m):
        total = c[i]
        blocks[i, 1] = total
        for s in range(2, m - i + 1):
            total = total + c[i + s - 1]
            blocks[i, s] = total
    terms = []
    for s in range(1, m + 1):
        sign = -1 if s % 2 else 1
        for i in range(m - s + 1):
            terms.append(TTerm(sign, blocks[i, s], tuple(range(i, i + s))))
    odd = tuple(range(0, m, 2))
    terms.append(TTerm(1, _sum(c[j] for j in odd), odd))
    return terms


def t_apply(c: Sequence, phi: Callable) -> object:
    return _sum(t.sign * phi(t.argument) for t in t_terms(c))


def t_apply_prefix(c: Sequence, phi: Callable) -> object:
    """Same value through endpoint differences ``y_k - y_s`` of the prefix sums."""
    m = _check_odd(c)
    y = [c[0] - c[0]]
    for v in c:
        y.append(y[-1] + v)
    total = phi(_sum(y[2 * j + 1] - y[2 * j] for j in range((m + 1) // 2)))
    for k in range(1, m + 1):
        for s in range(k):
            sign = 1 if (k - s) % 2 == 0 else -1
            total = total + sign * phi(y[k] - y[s])
    return total


def t_k_apply(c: Sequence, k: int, phi: Callable) -> object:
    """Part of ``T(c, phi)`` whose blocks contain ``c_k`` (``k`` is 1-based)."""
    m = _check_odd(c)
    if not 1 <= k <= m:
        raise IndexError(f"k must lie in 1..{m}")
    chosen = [t for t in t_terms(c) if (k - 1) in t.indices]
    return _sum(t.sign * phi(t.argument) for t in chosen)


_STRUCT_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def block_structure(m: int) -> tuple[np.ndarray, np.ndarray]:
    """Signs ``(K,)`` and 0/1 block incidence ``(m, K)`` of the terms of ``T``."""
    if m not in _STRUCT_CACHE:
        terms = t_terms(list(range(m)))
        signs = np.array([t.sign for t in terms], dtype=float)
        incidence = np.zeros((m, len(terms)))
        for col, t in enumerate(terms):
            incidence[list(t.indices), col] = 1.0
        _STRUCT_CACHE[m] = (signs, incidence)
    return _STRUCT_CACHE[m]


def t_apply_array(c, phi: Callable) -> np.ndarray | float:
    """Vectorized ``T``: ``c`` has shape ``(..., 2n-1)``; ``phi`` must accept arrays."""
    c = np.asarray(c, dtype=float)
    m = c.shape[-1]
    _check_odd(range(m))
    signs, incidence = block_structure(m)
    args = c @ incidence
    out = phi(args) @ signs
    return float(out) if np.ndim(out) == 0 else out
