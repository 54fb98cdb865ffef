#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
اختبارات لغة التعابير
"""

import numpy as np
import pytest

from errors import ExpressionDomainError, ExpressionSyntaxError, IFSError, UnknownIdentifierError
from expressions import Piecewise, diff_x, dphi, parse_expr, parse_function, phi

GRID = np.linspace(0.1, 1.0, 37)
POINTS = np.random.default_rng(2024).uniform(0.1, 1.0, 100)


# ==================== التحليل والتقييم ====================

@pytest.mark.parametrize("source, x, p, expected", [
    ("2*x + p", 0.25, 1.0, 1.5),
    ("1 - x - x", 1.0, 0.0, -1.0),
    ("8 / 2 / 2", 0.0, 0.0, 2.0),
    ("-x * 2", 0.5, 0.0, -1.0),
    ("2 * -x", 0.5, 0.0, -1.0),
    ("pow(x, 3)", 2.0, 0.0, 8.0),
    ("pow(x, -1)", 4.0, 0.0, 0.25),
    ("1e-3 + 2.5E+2", 0.0, 0.0, 250.001),
    ("abs(x - p)", 0.2, 0.5, 0.3),
    ("sign(x - p)", 0.2, 0.5, -1.0),
    ("exp(log(x))", 0.7, 0.0, 0.7),
])
def test_evaluate(source, x, p, expected):
    assert parse_expr(source).evaluate(x, p) == pytest.approx(expected, rel=1e-12)


def test_evaluate_vectorized():
    values = parse_expr("p*x + 1").evaluate(np.array([0.0, 0.5, 1.0]), 2.0)
    assert values.tolist() == [1.0, 2.0, 3.0]


def test_constant_expression_broadcasts():
    values = parse_expr("2/3").evaluate(GRID)
    assert values.shape == GRID.shape
    assert np.all(values == 2.0 / 3.0)


@pytest.mark.parametrize("source", [
    "1 - (x - p)",
    "x / (p * 2)",
    "-(x + 1)",
    "pow(x, -2) + 1e-3",
    "phi(p - 0.25, 3) + p*x",
    "-x * 2 - -1",
    "(1/3 + p)*x + 2/3 - p",
    "sin(1/x) * cos(x)",
])
def test_printer_round_trip(source):
    tree = parse_expr(source)
    again = parse_expr(str(tree))
    assert np.array_equal(tree.evaluate(POINTS, 0.3), again.evaluate(POINTS, 0.3))
    assert str(again) == str(tree)


def test_printer_minimal_parentheses():
    assert str(parse_expr("1 - (x - p)")) == "1 - (x - p)"
    assert str(parse_expr("(1 - x) - p")) == "1 - x - p"
    assert str(parse_expr("(x * 2) * p")) == "x * 2 * p"


# ==================== أخطاء الصياغة ====================

@pytest.mark.parametrize("source, position", [
    ("x/ ", 2),
    ("2 * (x", 6),
    ("x $ 2", 2),
    ("pow(x, 1.5)", 7),
    ("x 2", 2),
])
def test_syntax_error_position(source, position):
    with pytest.raises(ExpressionSyntaxError) as info:
        parse_expr(source)
    assert info.value.position == position
    assert f"offset {position}" in str(info.value)
    assert info.value.exit_code == 2


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifierError) as info:
        parse_expr("y + 1")
    assert info.value.position == 0


def test_phi_order_must_be_positive():
    with pytest.raises(ExpressionSyntaxError):
        parse_expr("phi(x, 0)")


def test_source_must_be_text():
    with pytest.raises(IFSError):
        parse_expr(3.0)


# ==================== أخطاء المجال ====================

@pytest.mark.parametrize("source", ["log(x)", "1/x", "pow(x, -1)", "log(x - 1)"])
def test_domain_errors(source):
    with pytest.raises(ExpressionDomainError):
        parse_expr(source).evaluate(np.array([0.0, 0.5]))


def test_exp_overflow():
    with pytest.raises(ExpressionDomainError):
        parse_expr("exp(1000*x)").evaluate(1.0)


# ==================== الاشتقاق ====================

def test_derivative_of_constant_prints_zero():
    assert str(diff_x(parse_expr("3.0"))) == "0"
    assert str(diff_x(parse_expr("p*x + 0.01"))) == "p"
    assert str(diff_x(parse_expr("p*x + phi(p - 0.25, 3) + 0.01"))) == "p"


@pytest.mark.parametrize("source", [
    "x*x*x - 2*x",
    "sin(x*x)",
    "exp(p*x) / (1 + x)",
    "log(1 + x) * cos(x)",
    "pow(x, -2)",
    "phi(x, 2)",
    "dphi(x, 3)",
])
def test_derivative_matches_finite_difference(source):
    tree = parse_expr(source)
    h = 1e-6
    numeric = (tree.evaluate(POINTS + h, 0.7) - tree.evaluate(POINTS - h, 0.7)) / (2 * h)
    assert diff_x(tree).evaluate(POINTS, 0.7) == pytest.approx(numeric, rel=1e-5, abs=1e-6)


def test_derivative_of_abs_is_sign():
    assert str(diff_x(parse_expr("abs(x)"))) == "sign(x)"


@pytest.mark.parametrize("source", [
    "x*x*x - 2*x",
    "exp(p*x) / (1 + x)",
    "phi(x, 2) + p*x",
    "(1/3 + p)*x + 2/3 - p",
])
def test_derivative_prints_and_parses_back(source):
    derivative = diff_x(parse_expr(source))
    again = parse_expr(str(derivative))
    assert str(again) == str(derivative)
    assert np.array_equal(again.evaluate(POINTS, 0.4), derivative.evaluate(POINTS, 0.4))


def test_overflowing_constant_is_not_folded():
    derivative = diff_x(parse_expr("1e300 * (1e300 * x)"))
    assert str(derivative) == "1e+300 * 1e+300"
    assert str(parse_expr(str(derivative))) == str(derivative)
    with pytest.raises(ExpressionDomainError):
        derivative.evaluate(0.5)


def test_out_of_range_literal_is_a_syntax_error():
    with pytest.raises(ExpressionSyntaxError) as info:
        parse_expr("x + 1e999")
    assert info.value.position == 4


def test_phi_at_zero():
    assert phi(0.0, 1) == 0.0
    assert dphi(0.0, 3) == 0.0
    assert phi(0.5, 1) == pytest.approx(0.25 * np.sin(2.0))


def test_phi_derivative_in_x_chain_rule():
    tree = parse_expr("phi(2*x, 1)")
    x = 0.3
    expected = 2.0 * dphi(2 * x, 1)
    assert diff_x(tree).evaluate(x) == pytest.approx(expected)


# ==================== الدوال المجزأة ====================

def test_piecewise_breakpoint_takes_right_piece():
    g = parse_function({"breakpoints": [0.5], "pieces": ["1", "2"]})
    assert isinstance(g, Piecewise)
    assert g.evaluate(0.5) == 2.0
    assert g.evaluate(0.4999) == 1.0
    assert g.evaluate(1.0) == 2.0
    assert g.evaluate(np.array([0.0, 0.5, 1.0])).tolist() == [1.0, 2.0, 2.0]


def test_piecewise_with_parameter():
    g = parse_function({"breakpoints": [0.5], "pieces": ["p", "1 - p"]})
    assert g.evaluate(np.array([0.25, 0.75]), 0.3).tolist() == pytest.approx([0.3, 0.7])
    assert g.is_discontinuous
    assert g.diff_x().evaluate(np.array([0.25, 0.75]), 0.3).tolist() == [0.0, 0.0]


def test_piecewise_document_round_trip():
    document = {"breakpoints": [0.5], "pieces": ["-x", "x * x"]}
    assert parse_function(document).to_document() == document


@pytest.mark.parametrize("document", [
    {"breakpoints": [0.5], "pieces": ["1"]},
    {"breakpoints": [0.5, 0.2], "pieces": ["1", "2", "3"]},
    ["x"],
    {"pieces": ["x"]},
])
def test_piecewise_rejects_malformed(document):
    with pytest.raises(IFSError):
        parse_function(document)
