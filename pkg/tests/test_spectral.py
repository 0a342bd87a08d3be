import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from specon.intervals import GapVector, IntervalUnion, StepFunction, dilate, from_gaps
from specon.quadrature import integrate, oracle_pair_form, oracle_set_form, oracle_step_form
from specon.specfun import phi2, si
from specon.spectral import (
    alt_exp_sq,
    concentration,
    f_field,
    grad_h,
    h_gap,
    h_value,
    h_values,
    pair_form,
    phi_two_interval,
    scale_derivative,
    set_form,
    step_form,
    superlevel_check,
)

PI2 = np.pi**2

# mpmath closed forms at 40 digits
H_REFERENCE = {
    (1.0, 2.0, 1.0): 0.23940200340568863151,
    (2.0, 2.0, 2.0): 0.18386946575307250547,
    (1.0, 0.5, 2.0, 3.0, 0.7): 0.53806673871011155132,
    (0.3, 0.1, 0.3): 0.017506553970914638955,
}

gap_vectors = st.integers(2, 4).flatmap(
    lambda n: st.lists(st.floats(0.01, 5.0), min_size=2 * n - 1, max_size=2 * n - 1))


def test_pair_form_examples():
    assert pair_form((0, 1), (0, 1)) == pytest.approx(2 * si(1.0) - 4 / PI2, abs=1e-15)
    assert pair_form((0, 1), (2, 3)) == pytest.approx(phi2(3.0) - 2 * phi2(2.0) + phi2(1.0),
                                                      abs=1e-15)
    assert pair_form((0, 0.7), (1.3, 2.9)) == pytest.approx(
        oracle_pair_form((0, 0.7), (1.3, 2.9)).value, abs=1e-9)


@given(st.floats(-10, 10), st.floats(0, 5), st.floats(-10, 10), st.floats(0, 5),
       st.floats(-50, 50))
def test_pair_form_symmetric_and_translation_invariant(p, dp, r, dr, c):
    I1, I2 = (p, p + dp), (r, r + dr)
    assert pair_form(I1, I2) == pytest.approx(pair_form(I2, I1), abs=1e-12)
    assert pair_form((p + c, p + dp + c), (r + c, r + dr + c)) == pytest.approx(
        pair_form(I1, I2), abs=1e-11)


def test_set_form_random_vs_oracle():
    rng = np.random.default_rng(11)
    for _ in range(5):
        A = IntervalUnion(tuple(np.sort(rng.uniform(0, 20, 6))))
        B = IntervalUnion(tuple(np.sort(rng.uniform(0, 20, 6))))
        assert set_form(A, B) == pytest.approx(oracle_set_form(A.components, B.components),
                                               abs=1e-8)


def test_set_form_additive_over_disjoint_union():
    A1, A2, B = [(0.0, 1.0)], [(2.0, 2.5)], [(0.3, 4.0), (5.0, 6.0)]
    assert set_form(A1 + A2, B) == pytest.approx(set_form(A1, B) + set_form(A2, B), abs=1e-14)


def test_concentration_single_interval_and_oracle():
    res = concentration(IntervalUnion((0.0, 1.0)))
    assert res.value == pytest.approx(pair_form((0, 1), (0, 1)), abs=1e-15)
    A = IntervalUnion((0.0, 1.0, 3.0, 4.0))
    assert concentration(A).value == pytest.approx(oracle_set_form(A.components, A.components),
                                                   abs=1e-8)
    with pytest.raises(ValueError):
        concentration(A, 0.0)


@given(st.lists(st.floats(0.0, 10.0), min_size=2, max_size=8), st.floats(0.1, 5.0))
def test_dilation_law(xs, W):
    xs = sorted(xs)
    if len(xs) % 2:
        xs = xs[:-1]
    try:
        A = IntervalUnion(tuple(xs))
    except ValueError:
        return
    band = concentration(A, W)
    unit = concentration(dilate(A, W), 1.0)
    # the band energy of A equals the unit-band energy of W A divided by W
    assert band.unit_value == pytest.approx(unit.value, rel=1e-12, abs=1e-14)
    assert band.value * W == pytest.approx(unit.value, rel=1e-12, abs=1e-14)


def test_concentration_strictly_below_measure():
    rng = np.random.default_rng(4)
    for _ in range(200):
        A = IntervalUnion(tuple(np.sort(rng.uniform(0, 10, 6))))
        for W in (0.5, 1.0, 3.0):
            res = concentration(A, W)
            assert 0 < res.value < res.measure
            assert 0 < res.fraction < 1


def test_step_form_examples():
    chi = StepFunction(((0.0, 1.0, 1.0),))
    assert step_form(chi, chi) == pytest.approx(pair_form((0, 1), (0, 1)), abs=1e-15)
    f = StepFunction(((0.0, 0.01, 50.0), (0.01, 0.88, 1.0), (2.3, 2.6, 1.0)))
    g = StepFunction(((0.5, 1.5, 2.0),))
    assert step_form(f.scaled(3.0), g) == pytest.approx(3 * step_form(f, g), rel=1e-13)
    assert step_form(f, f) == pytest.approx(oracle_step_form(f, f), abs=1e-8)
    A = IntervalUnion((0.0, 1.0, 2.0, 3.5))
    ind = StepFunction.indicator(A)
    assert step_form(ind, ind) == pytest.approx(set_form(A, A), abs=1e-14)


def test_f_field_examples():
    for T in (0.5, 1.0, 3.7):
        assert f_field([(0.0, T)], 0.0) == pytest.approx(si(T), abs=1e-15)
        assert f_field([(0.0, T)], T) == pytest.approx(si(T), abs=1e-15)
    A = [(0.0, 1.0), (2.0, 3.0)]
    ref = integrate(lambda t: np.sinc(1.5 - t), 0.0, 1.0).value + \
        integrate(lambda t: np.sinc(1.5 - t), 2.0, 3.0).value
    assert f_field(A, 1.5) == pytest.approx(ref, abs=1e-10)
    assert abs(f_field(A, 1e4)) < 1e-4


@pytest.mark.parametrize("gaps, expected", sorted(H_REFERENCE.items()))
def test_h_reference_values(gaps, expected):
    assert h_value(gaps) == pytest.approx(expected, abs=1e-13)


def test_h_examples():
    assert h_value((1.3, 0.0, 2.1)) == pytest.approx(0.0, abs=1e-14)
    assert h_value((2.0, 2.0, 2.0)) > 0
    direct = set_form([(0, 2)], [(0, 2)]) - set_form([(0, 1), (3, 4)], [(0, 1), (3, 4)])
    assert h_value((1.0, 2.0, 1.0)) == pytest.approx(direct, abs=1e-10)
    assert h_value((2.5,)) == 0.0


@settings(max_examples=60, deadline=None)
@given(gap_vectors)
def test_three_forms_agree(gaps):
    b = h_gap(gaps)
    assert b.converged, b.diagnostics
    assert b.h_value == b.form_b
    assert b.max_disagreement < 1e-7


def test_h_gap_accepts_zero_holes():
    b = h_gap(GapVector((1.0, 0.0, 1.0)))
    assert b.h_value == pytest.approx(0.0, abs=1e-14)
    assert abs(b.form_a) < 1e-9 and abs(b.form_c) < 1e-9


def test_h_values_batch_and_floor():
    rng = np.random.default_rng(9)
    gaps = np.exp(rng.uniform(np.log(1e-2), np.log(30), (5000, 7)))
    hs = h_values(gaps)
    assert np.all(hs > -4 / PI2)
    assert hs[17] == pytest.approx(h_value(gaps[17]), abs=1e-12)
    with pytest.raises(ValueError):
        h_values(-gaps)


def test_phi_two_interval():
    assert phi_two_interval(1.3, 2.0, 0.0) == 0.0
    assert phi_two_interval(1, 1, 1) == pytest.approx(h_value((1, 1, 1)) * PI2 / 16, abs=1e-8)
    rng = np.random.default_rng(1)
    for a, b, e in rng.uniform(0.1, 6, (5, 3)):
        v = phi_two_interval(a, b, e)
        assert phi_two_interval(b, a, e) == pytest.approx(v, abs=1e-9)
        assert phi_two_interval(e, b, a) == pytest.approx(v, abs=1e-9)
        assert 16 / PI2 * v == pytest.approx(h_value((a, e, b)), abs=1e-8)
    with pytest.raises(ValueError):
        phi_two_interval(-1, 1, 1)


def test_grad_h_matches_finite_differences():
    rng = np.random.default_rng(21)
    for _ in range(30):
        n = rng.integers(2, 5)
        g = rng.uniform(0.2, 5, 2 * n - 1)
        grad = grad_h(g)
        fd = np.empty_like(g)
        for k in range(g.size):
            e = np.zeros_like(g)
            e[k] = 1e-5
            fd[k] = (h_value(g + e) - h_value(g - e)) / 2e-5
        assert np.all(np.abs(grad - fd) <= 1e-5 * np.maximum(1.0, np.abs(fd)))


def test_grad_h_symmetry_and_single_interval():
    grad = grad_h((1.7, 0.4, 1.7))
    assert grad[0] == pytest.approx(grad[2], abs=1e-14)
    assert grad_h((2.3,)) == pytest.approx([0.0], abs=1e-15)
    with pytest.raises(ValueError):
        grad_h((1.0, 0.0, 1.0))


def test_scale_derivative():
    assert scale_derivative((1.2, 0.0, 0.8)) == pytest.approx(0.0, abs=1e-14)
    rng = np.random.default_rng(3)
    for _ in range(20):
        g = rng.uniform(0.1, 4, 5)
        fd = (h_value(1.00001 * g) - h_value(0.99999 * g)) / 2e-5
        assert scale_derivative(g) == pytest.approx(fd, abs=1e-5)


def test_alt_exp_sq():
    xs = np.array([0.0, 0.3, 1.1, 2.0])
    direct = abs(sum((-1) ** (j + 1) * np.exp(1j * np.pi * x) for j, x in enumerate(xs))) ** 2
    assert alt_exp_sq(xs) == pytest.approx(direct, abs=1e-14)


def test_superlevel_examples():
    rep = superlevel_check(IntervalUnion((0.0, 1.0)))
    assert rep.violation_measure == 0.0
    assert rep.min_interior >= rep.c - 1e-9
    assert rep.c > 0
    far = superlevel_check(IntervalUnion((0.0, 0.4, 10.0, 10.4)))
    assert far.violation_measure > 0


def test_superlevel_single_interval_c_positive():
    for T in (0.3, 0.9, 2.0):
        assert superlevel_check(from_gaps((T,))).c > 0
