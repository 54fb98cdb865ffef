#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
اختبارات نواة IFS والتحقق
"""

import logging
import math

import numpy as np
import pytest

from errors import EvaluationError, IFSError, ParameterRangeError, ValidationFailure
from ifs_core import FamilySpec, bind
from tests.helpers import PRESETS, make_instance, preset_instance


# ==================== العائلة والربط ====================

def test_family_needs_two_branches():
    with pytest.raises(IFSError):
        FamilySpec.from_strings(["x/2"], ["1"], (0, 1), (0, 1))


def test_family_needs_matching_weights():
    with pytest.raises(IFSError):
        FamilySpec.from_strings(["x/2", "x/2 + 1/2"], ["1"], (0, 1), (0, 1))


def test_family_rejects_reversed_range():
    with pytest.raises(IFSError):
        FamilySpec.from_strings(["x/2", "x/2 + 1/2"], ["0.5", "0.5"], (1, 0), (0, 1))


def test_undeclared_range_warns(caplog):
    with caplog.at_level(logging.WARNING, logger="ifs_core"):
        family = FamilySpec.from_strings(["x/2", "x/2 + 1/2"], ["0.5", "0.5"])
    assert family.lambda_range is None
    assert any("lambda" in record.getMessage() for record in caplog.records)
    # بلا مجال معلن: أي قيمة منتهية مقبولة
    assert bind(family, 123.0, -4.0).lam == 123.0


def test_bind_outside_declared_interval():
    family = FamilySpec.from_strings(["p*x", "p*x + 1 - p"], ["0.5", "0.5"], (0.1, 0.4), (0, 1))
    with pytest.raises(ParameterRangeError) as info:
        bind(family, 0.5, 0.5)
    assert info.value.exit_code == 2
    assert "lambda" in str(info.value)


def test_bind_rejects_non_finite():
    family = FamilySpec.from_strings(["p*x", "p*x + 1 - p"], ["0.5", "0.5"], (0.1, 0.4), (0, 1))
    with pytest.raises(IFSError):
        bind(family, math.nan, 0.5)


def test_instance_evaluation(cantor):
    x = np.array([0.0, 0.5, 1.0])
    assert cantor.maps_at(x).shape == (2, 3)
    assert cantor.apply_map(1, 1.0) == pytest.approx(1.0)
    assert cantor.derivatives_at(x) == pytest.approx(np.full((2, 3), 1.0 / 3.0))
    assert cantor.weights_at(x).sum(axis=0) == pytest.approx(np.ones(3))


def test_evaluation_error_names_branch_and_point():
    inst = make_instance(["x/2", "log(x)"], ["0.5", "0.5"])
    with pytest.raises(EvaluationError) as info:
        inst.apply_map(1, np.array([0.0, 0.5]))
    assert info.value.branch == 2
    assert info.value.x == 0.0


# ==================== تقرير التحقق ====================

def test_cantor_report(cantor):
    report = cantor.report
    assert report.L == pytest.approx(1.0 / 3.0, rel=1e-15)
    assert report.passed
    assert report.disjoint
    assert report.equal_derivative
    assert report.alpha == 1.0
    assert report.images[0] == pytest.approx((0.0, 1.0 / 3.0))
    assert report.images[1] == pytest.approx((2.0 / 3.0, 1.0))
    assert report.rho_est == pytest.approx(1.0 / 3.0)
    assert report.contraction_bound == pytest.approx(report.L)


def test_touching_images_are_not_disjoint(simple):
    report = simple.report
    assert report.passed
    assert not report.disjoint
    assert report.L == pytest.approx(0.5)


def test_unnormalized_weights_fail(unnormalized):
    report = unnormalized.report
    assert not report.normalization_ok
    assert not report.passed
    assert report.normalization_residual == pytest.approx(0.2)
    assert "normalization=FAIL" in report.lines()


def test_non_contraction_fails():
    report = make_instance(["x", "x"], ["0.5", "0.5"]).report
    assert not report.contraction_ok
    assert "largest Lipschitz estimate is not below 1" in report.warnings


def test_invariance_fails():
    report = make_instance(["x/2", "x/2 + 0.6"], ["0.5", "0.5"]).report
    assert not report.inside_unit
    assert not report.passed


def test_positivity_fails():
    report = make_instance(["x/3", "x/3 + 2/3"], ["1.5", "-0.5"]).report
    assert report.normalization_ok
    assert not report.positivity_ok
    assert not report.passed


def test_discontinuous_weights_warn_and_bound(ex_4_3):
    report = ex_4_3.report
    assert report.passed
    assert report.disjoint
    assert "weights discontinuous at breakpoints" in report.warnings
    assert report.L == pytest.approx(2 * 0.25 * 0.75)
    assert report.contraction_bound > 1.0


def test_report_lines_are_key_value(cantor):
    lines = cantor.report.lines()
    keys = [line.split("=", 1)[0] for line in lines]
    assert keys[:3] == ["lambda", "theta", "grid_n"]
    assert "L" in keys and "contraction" in keys and "derivative_bound" in keys
    assert any(line.startswith("L=0.3333333333333333") for line in lines)


def test_require_raises_with_report(simple):
    with pytest.raises(ValidationFailure) as info:
        simple.require("disjoint")
    assert info.value.verdict == "disjoint"
    assert info.value.report is simple.report


@pytest.mark.parametrize("name", PRESETS)
def test_presets_validate_at_defaults(name):
    assert preset_instance(name).report.passed
