import math

import numpy as np
import pytest

from specon import bounds
from specon.bounds import BoundReport
from specon.specfun import s_kernel, sinc


def test_report_passed_is_derived():
    ok = BoundReport("x", 1, -1e-10, {}, 1e-9)
    bad = BoundReport("y", 1, -1e-8, {}, 1e-9)
    assert ok.passed and not bad.passed
    strict_zero = BoundReport("z", 1, 0.0, {}, 0.0, strict=True)
    assert not strict_zero.passed
    parent = BoundReport("p", 2, 1.0, {}, 0.0, checks=(ok, bad))
    assert not parent.passed
    assert parent.failures() == ["p/y"]
    assert not BoundReport("nan", 1, math.nan, {}, 0.0).passed


def test_side_lobe_and_t0():
    y, peak = bounds.side_lobe()
    assert abs(math.tan(math.pi * y) - math.pi * y) < 1e-10
    # mpmath: y* = 2.45902403295676..., T0 = 0.883968305993458...
    assert y == pytest.approx(2.4590240329567613794, abs=1e-12)
    t0 = bounds.compute_t0()
    assert t0 == pytest.approx(0.88396830599345849166, abs=1e-12)
    assert abs(sinc(t0) - peak) < 1e-10
    # the lobe is the maximum of sinc beyond 1
    grid = np.linspace(1.0, 200.0, 400001)
    assert np.max(sinc(grid)) <= peak + 1e-12
    assert bounds.verify_t0().passed


def test_t_identities_small():
    rep = bounds.verify_t_identities(60, seed=3)
    assert rep.passed, rep.to_dict()


def test_prop_equal_and_forms_small():
    assert bounds.verify_prop_equal(20, seed=2).passed
    assert bounds.verify_form_agreement(20, seed=2).passed


def test_wt_threshold_small():
    rep = bounds.verify_wt_threshold(2000, seed=5)
    assert rep.passed, rep.failures()
    names = {c.name for c in rep.checks}
    assert {"random", "symmetric_at_4_3", "zero_holes"} <= names


def test_two_interval_coarse_grid():
    rep = bounds.verify_two_interval(grid_step=0.5, random_samples=500, seed=1,
                                     symmetry_samples=5)
    assert rep.passed, rep.failures()


def test_l2_bounds_small_and_two_term():
    rep = bounds.verify_l2_bounds(600, seed=4)
    assert rep.passed, rep.failures()
    beta = np.geomspace(1e-4, 1e3, 50)
    two = 2 - 2 * s_kernel(beta)
    assert np.all(two < np.minimum(7.0, np.pi * beta / 2))
    assert rep.extras["linear_constant"]["separated_pairs"] >= 1.0


def test_iac_and_avg_small():
    assert bounds.verify_iac_and_cor_new(700, seed=6).passed
    rep = bounds.verify_avg_lemma(30, seed=6)
    assert rep.passed, rep.failures()


def test_special_cases():
    rep = bounds.verify_special_cases(lattice_step=0.5)
    assert rep.passed
    assert rep.checks[0].samples == 27


def test_reports_reproducible():
    a = bounds.verify_iac_and_cor_new(300, seed=9).to_dict()
    b = bounds.verify_iac_and_cor_new(300, seed=9).to_dict()
    assert a == b


def test_violation_dump_contains_both_evaluations(monkeypatch):
    # a fake slack forces the violation path
    rows = np.array([[1.0, 2.0, 1.0], [1.0, 0.5, 1.0]])
    rep = bounds._scan_report("forced", rows, np.array([0.1, -1.0]), 0.0, True)
    assert not rep.passed
    (dump,) = rep.violations
    assert dump["gaps"] == [1.0, 0.5, 1.0]
    assert dump["oracle"] == pytest.approx(dump["closed_form"], abs=1e-9)
