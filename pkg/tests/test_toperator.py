import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from specon.specfun import g as G
from specon.toperator import (
    block_structure,
    t_apply,
    t_apply_array,
    t_apply_prefix,
    t_k_apply,
    t_terms,
    term_count,
)

odd_tuples = st.integers(1, 6).flatmap(
    lambda n: st.lists(st.fractions(0, 100, max_denominator=1000),
                       min_size=2 * n - 1, max_size=2 * n - 1))


def test_term_enumeration_small_case():
    terms = t_terms([1, 2, 3])
    assert [(t.sign, t.argument) for t in terms] == [
        (-1, 1), (-1, 2), (-1, 3), (1, 3), (1, 5), (-1, 6), (1, 4)]
    assert len(terms) == term_count(3)


def test_term_count_formula():
    for m in range(1, 16, 2):
        assert term_count(m) == m * (m + 1) // 2 + 1


@given(odd_tuples)
def test_identities_exact(c):
    n = (len(c) + 1) // 2
    assert t_apply(c, lambda x: x) == 0
    assert t_apply(c, lambda x: x * x) == 0
    assert t_apply(c, lambda x: Fraction(1)) == -(n - 1)
    for k in range(1, len(c) + 1):
        assert t_k_apply(c, k, lambda x: x) == 0


@given(odd_tuples)
def test_prefix_form_matches_enumeration_exactly(c):
    def phi(x):
        return x * x * x + 2 * x

    assert t_apply_prefix(c, phi) == t_apply(c, phi)


def test_prefix_form_matches_on_reals():
    rng = np.random.default_rng(5)
    for m in (1, 3, 5, 7, 9, 11):
        c = list(rng.uniform(0, 5, m))
        phi = lambda x: G(0.5 * x)  # noqa: E731
        assert t_apply_prefix(c, phi) == pytest.approx(t_apply(c, phi), abs=1e-12)


def test_array_path_matches_generic():
    rng = np.random.default_rng(0)
    c = rng.uniform(0, 5, (20, 7))
    phi = lambda x: np.sin(x) + x**3  # noqa: E731
    batch = t_apply_array(c, phi)
    for row, value in zip(c, batch):
        assert value == pytest.approx(t_apply(list(row), phi), abs=1e-10)
    assert isinstance(t_apply_array(c[0], phi), float)


def test_block_structure_shapes():
    signs, incidence = block_structure(5)
    assert signs.shape == (term_count(5),)
    assert incidence.shape == (5, term_count(5))
    # the alternating term uses entries 1, 3, 5
    assert incidence[:, -1].tolist() == [1, 0, 1, 0, 1]


def test_even_length_rejected():
    with pytest.raises(ValueError):
        t_terms([1, 2])
    with pytest.raises(ValueError):
        t_apply_array(np.ones(4), np.sin)


def test_t_k_index_range():
    with pytest.raises(IndexError):
        t_k_apply([1, 2, 3], 0, lambda x: x)
    with pytest.raises(IndexError):
        t_k_apply([1, 2, 3], 4, lambda x: x)


def test_t_k_partition():
    # every block containing c_k is counted once in T_k; T itself is not their sum
    rng = random.Random(3)
    c = [Fraction(rng.randint(1, 50), 7) for _ in range(5)]
    phi = lambda x: x * x * x  # noqa: E731
    direct = sum(t.sign * phi(t.argument) for t in t_terms(c) if 2 in t.indices)
    assert t_k_apply(c, 3, phi) == direct
