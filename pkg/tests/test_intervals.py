import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from specon.intervals import (
    GapVector,
    IntervalUnion,
    StepFunction,
    dilate,
    from_gaps,
    rearrange,
    rearrange_step,
    to_gaps,
)

gap_lists = st.integers(1, 6).flatmap(
    lambda n: st.lists(st.floats(0.01, 20), min_size=2 * n - 1, max_size=2 * n - 1))


@given(gap_lists)
def test_gaps_round_trip(gaps):
    A = from_gaps(gaps, canonical=False)
    back = to_gaps(A)
    assert back.gaps == pytest.approx(tuple(gaps), abs=1e-12 * (1 + sum(gaps)))
    assert A.endpoints[0] == 0.0


@given(gap_lists)
def test_measure_is_total_length(gaps):
    A = from_gaps(gaps)
    assert A.measure == pytest.approx(sum(gaps[0::2]))
    assert rearrange(A).endpoints == (0.0, pytest.approx(A.measure))


def test_zero_hole_merges():
    A = from_gaps((1.0, 0.0, 2.0))
    assert A.endpoints == (0.0, 3.0)
    assert GapVector((1.0, 0.0, 2.0)).canonical().gaps == (3.0,)


def test_zero_length_component_dropped():
    A = from_gaps((1.0, 2.0, 0.0, 1.0, 1.0))
    assert A.n == 2
    assert A.components == [(0.0, 1.0), (4.0, 5.0)]


@pytest.mark.parametrize("endpoints", [(), (0.0,), (1.0, 0.0), (0.0, 0.0), (0.0, 1.0, 0.5, 2.0)])
def test_invalid_unions(endpoints):
    with pytest.raises(ValueError):
        IntervalUnion(endpoints)


@pytest.mark.parametrize("gaps", [(1.0, 2.0), (1.0, -1.0, 1.0), (0.0, 1.0, 0.0), (float("nan"),)])
def test_invalid_gap_vectors(gaps):
    with pytest.raises(ValueError):
        GapVector(gaps)


def test_gap_vector_parts():
    gv = GapVector((1.0, 2.0, 3.0, 4.0, 5.0))
    assert gv.n == 3
    assert gv.lengths == (1.0, 3.0, 5.0)
    assert gv.holes == (2.0, 4.0)
    assert gv.total_length == 9.0
    assert gv.endpoints == (0.0, 1.0, 3.0, 6.0, 10.0, 15.0)
    assert gv.is_interior
    assert not GapVector((1.0, 0.0, 1.0)).is_interior


def test_dilate_and_translate():
    A = IntervalUnion((0.0, 1.0, 2.0, 4.0))
    assert dilate(A, 2.0).endpoints == (0.0, 2.0, 4.0, 8.0)
    assert A.translate(1.5).endpoints == (1.5, 2.5, 3.5, 5.5)
    with pytest.raises(ValueError):
        dilate(A, 0.0)


def test_json_round_trips():
    A = IntervalUnion((0.0, 1.0, 2.5, 4.0))
    assert IntervalUnion.from_dict(json.loads(json.dumps(A.to_dict()))) == A
    gv = GapVector((1.0, 0.5, 2.0))
    assert GapVector.from_dict(json.loads(json.dumps(gv.to_dict()))) == gv
    f = StepFunction(((0.0, 0.1, 5.0), (2.0, 3.0, 1.0)))
    assert StepFunction.from_dict(json.loads(json.dumps(f.to_dict()))) == f


def test_step_function_validation():
    with pytest.raises(ValueError):
        StepFunction(((0.0, 1.0, 1.0), (0.5, 2.0, 1.0)))
    with pytest.raises(ValueError):
        StepFunction(((0.0, 1.0, -1.0),))
    with pytest.raises(ValueError):
        StepFunction(((1.0, 1.0, 1.0),))


def test_rearrange_step_stacks_levels_descending():
    f = StepFunction(((0.0, 0.01, 100.0), (0.01, 0.88, 1.0), (2.3, 2.6, 1.0), (5.0, 6.0, 0.0)))
    fs = rearrange_step(f)
    assert len(fs.pieces) == 2
    (a, b, v1), (c, d, v2) = fs.pieces
    assert (a, v1, v2) == (0.0, 100.0, 1.0)
    assert b == pytest.approx(0.01) and c == b
    assert d == pytest.approx(0.01 + 0.87 + 0.3)
    assert fs.support_measure == pytest.approx(f.support_measure)


def test_rearranged_step_independent_of_position():
    f1 = StepFunction(((0.0, 1.0, 2.0), (3.0, 4.0, 1.0)))
    f2 = StepFunction(((0.0, 1.0, 2.0), (7.0, 8.0, 1.0)))
    assert rearrange_step(f1) == rearrange_step(f2)


def test_indicator_and_evaluation():
    A = IntervalUnion((0.0, 1.0, 2.0, 3.0))
    f = StepFunction.indicator(A, 2.0)
    assert f(0.5) == 2.0 and f(1.5) == 0.0 and f(2.5) == 2.0
    assert f.scaled(0.5)(0.5) == 1.0
