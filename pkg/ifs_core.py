#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
نواة أنظمة الدوال المكررة (IFS)
================================
- FamilySpec: عائلة خرائط T_i(x; p=λ) وأوزان g_i(x; p=θ) على [0,1]
- bind: تثبيت (λ, θ) للحصول على IFSInstance قابلة للتقييم
- validate: فحص الفرضيات القياسية على شبكة منتظمة وإرجاع ValidationReport
"""

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from config import GRID_N, NORMALIZATION_TOL
from errors import (
    EvaluationError,
    ExpressionDomainError,
    IFSError,
    ParameterRangeError,
    ValidationFailure,
)
from expressions import Piecewise, diff_x, function_to_document, parse_expr, parse_function
from utils import format_float, validate_finite

logger = logging.getLogger(__name__)

# سماحية الخروج من [0,1] الناتجة عن التقريب العددي
UNIT_SLACK = 1e-12
EQUAL_DERIVATIVE_TOL = 1e-12


# ==================== 1. مواصفات العائلة ====================

def _as_range(value, name):
    if value is None:
        return None
    lo, hi = (validate_finite(v, name) for v in value)
    if lo > hi:
        raise IFSError(f"{name} must satisfy lo <= hi, got [{lo}, {hi}]")
    return (lo, hi)


@dataclass(frozen=True)
class FamilySpec:
    """
    عائلة IFS ذات معاملين

    Parameters:
    -----------
    maps : tuple[Expr]
        الخرائط T_i، المتغير p فيها هو λ
    weights : tuple[Expr | Piecewise]
        الأوزان g_i، المتغير p فيها هو θ
    lambda_range, theta_range : (lo, hi) أو None
        المجالات المعلنة؛ None تعني (−∞, ∞)
    """

    maps: tuple
    weights: tuple
    lambda_range: tuple = None
    theta_range: tuple = None
    name: str = "custom"

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(self.maps))
        object.__setattr__(self, "weights", tuple(self.weights))
        if len(self.maps) < 2:
            raise IFSError(f"an IFS needs at least 2 branches, got {len(self.maps)}")
        if len(self.maps) != len(self.weights):
            raise IFSError("every branch needs exactly one map and one weight")
        object.__setattr__(self, "lambda_range", _as_range(self.lambda_range, "lambda_range"))
        object.__setattr__(self, "theta_range", _as_range(self.theta_range, "theta_range"))
        for label, declared in (("lambda", self.lambda_range), ("theta", self.theta_range)):
            if declared is None:
                logger.warning("⚠️ العائلة %s بلا مجال معلن لـ %s، يُفترض (−∞, ∞)", self.name, label)

    @property
    def k(self):
        return len(self.maps)

    @property
    def has_discontinuous_weights(self):
        return any(isinstance(g, Piecewise) and g.is_discontinuous for g in self.weights)

    @classmethod
    def from_strings(cls, maps, weights, lambda_range=None, theta_range=None, name="custom"):
        return cls(
            maps=tuple(parse_expr(m) for m in maps),
            weights=tuple(parse_function(g) for g in weights),
            lambda_range=lambda_range,
            theta_range=theta_range,
            name=name,
        )

    def to_document(self):
        return {
            "maps": [str(m) for m in self.maps],
            "weights": [function_to_document(g) for g in self.weights],
            "lambda_range": list(self.lambda_range) if self.lambda_range else None,
            "theta_range": list(self.theta_range) if self.theta_range else None,
        }


# ==================== 2. النظام المربوط ====================

def _locate_failure(fn, x):
    """أول نقطة يفشل عندها التقييم، للإبلاغ عنها"""
    for point in np.atleast_1d(x):
        try:
            value = fn(float(point))
            if not np.isfinite(value):
                return float(point)
        except ExpressionDomainError:
            return float(point)
    return None


class IFSInstance:
    """
    نظام مربوط عند (λ, θ): خرائط ومشتقاتها وأوزان قابلة للاستدعاء على مصفوفات numpy.
    الفروع مرقمة من 0 داخلياً ومن 1 في الرسائل والكلمات الرمزية.
    """

    def __init__(self, spec, lam, theta):
        self.spec = spec
        self.lam = lam
        self.theta = theta
        self.k = spec.k
        self.map_functions = tuple(m.compile(lam) for m in spec.maps)
        self.derivative_functions = tuple(diff_x(m).compile(lam) for m in spec.maps)
        self.weight_functions = tuple(g.compile(theta) for g in spec.weights)

    def __repr__(self):
        return f"IFSInstance({self.spec.name}, lambda={self.lam!r}, theta={self.theta!r})"

    # --- التقييم مع الإبلاغ عن الفرع والنقطة ---
    def _call(self, functions, what, i, x):
        fn = functions[i]
        try:
            with np.errstate(invalid="ignore", over="ignore"):
                value = fn(x)
        except ExpressionDomainError as exc:
            raise EvaluationError(f"{what} evaluation failed: {exc}", branch=i + 1,
                                  x=_locate_failure(fn, x)) from exc
        if not np.all(np.isfinite(value)):
            raise EvaluationError(f"{what} is not finite", branch=i + 1, x=_locate_failure(fn, x))
        return value

    def apply_map(self, i, x):
        return self._call(self.map_functions, "map", i, x)

    def derivative(self, i, x):
        return self._call(self.derivative_functions, "derivative", i, x)

    def weight(self, i, x):
        return self._call(self.weight_functions, "weight", i, x)

    def maps_at(self, x):
        """مصفوفة (k, len(x)) من T_i(x)"""
        x = np.asarray(x, dtype=float)
        return np.stack([np.broadcast_to(self.apply_map(i, x), x.shape) for i in range(self.k)])

    def derivatives_at(self, x):
        x = np.asarray(x, dtype=float)
        return np.stack([np.broadcast_to(self.derivative(i, x), x.shape) for i in range(self.k)])

    def weights_at(self, x):
        x = np.asarray(x, dtype=float)
        return np.stack([np.broadcast_to(self.weight(i, x), x.shape) for i in range(self.k)])

    def apply_symbols(self, symbols, x):
        """T_{s_j}(x_j) لكل j، حيث s رموز مرقمة من 0"""
        images = self.maps_at(x)
        return np.take_along_axis(images, np.asarray(symbols)[None, :], axis=0)[0]

    # --- المشتقات الثانية ومشتقات الأوزان (لحدود الاقتطاع) ---
    @cached_property
    def second_derivative_functions(self):
        return tuple(diff_x(diff_x(m)).compile(self.lam) for m in self.spec.maps)

    @cached_property
    def weight_derivative_functions(self):
        return tuple(g.diff_x().compile(self.theta) for g in self.spec.weights)

    def second_derivative(self, i, x):
        return self._call(self.second_derivative_functions, "second derivative", i, x)

    def weight_derivative(self, i, x):
        return self._call(self.weight_derivative_functions, "weight derivative", i, x)

    # --- تقرير التحقق الافتراضي، يُحسب مرة واحدة ---
    @cached_property
    def report(self):
        return validate(self, GRID_N)

    def require(self, *verdicts):
        """رفع ValidationFailure إن لم تتحقق أي من الفرضيات المطلوبة"""
        report = self.report
        for verdict in verdicts:
            if not report.verdicts()[verdict]:
                raise ValidationFailure(verdict, report)
        return report


def bind(spec, lam, theta):
    """تثبيت المعاملين والتحقق من وقوعهما في المجالات المعلنة"""
    lam = validate_finite(lam, "lambda")
    theta = validate_finite(theta, "theta")
    for label, value, declared in (("lambda", lam, spec.lambda_range),
                                   ("theta", theta, spec.theta_range)):
        if declared is not None and not declared[0] <= value <= declared[1]:
            raise ParameterRangeError(
                f"{label}={value!r} outside declared interval [{declared[0]!r}, {declared[1]!r}]"
            )
    return IFSInstance(spec, lam, theta)


# ==================== 3. تقرير التحقق ====================

@dataclass(frozen=True)
class ValidationReport:
    lam: float
    theta: float
    grid_n: int
    lipschitz: tuple
    weight_sup: tuple
    L: float
    normalization_residual: float
    images: tuple
    disjoint: bool
    rho_est: float
    alpha: float
    min_weight: float
    inside_unit: bool
    equal_derivative: bool
    weight_lipschitz: tuple
    contraction_bound: float
    normalization_tol: float = NORMALIZATION_TOL
    warnings: tuple = field(default=())

    # --- الأحكام ---
    @property
    def contraction_ok(self):
        return self.L < 1.0

    @property
    def normalization_ok(self):
        return self.normalization_residual <= self.normalization_tol

    @property
    def positivity_ok(self):
        return self.min_weight > 0.0

    @property
    def derivative_bound_ok(self):
        return self.rho_est > 0.0

    def verdicts(self):
        return {
            "contraction": self.contraction_ok,
            "invariance": self.inside_unit,
            "positivity": self.positivity_ok,
            "normalization": self.normalization_ok,
            "disjoint": self.disjoint,
            "derivative_bound": self.derivative_bound_ok,
        }

    @property
    def passed(self):
        """أحكام الصلاحية؛ التفكك وحد المشتقة شروط لعمليات البعد فقط"""
        v = self.verdicts()
        return v["contraction"] and v["invariance"] and v["positivity"] and v["normalization"]

    def lines(self):
        """التقرير كنص key=value"""
        def joined(values):
            return ",".join(format_float(v) for v in values)

        out = [
            f"lambda={format_float(self.lam)}",
            f"theta={format_float(self.theta)}",
            f"grid_n={self.grid_n}",
            f"lip={joined(self.lipschitz)}",
            f"weight_sup={joined(self.weight_sup)}",
            f"L={format_float(self.L)}",
            f"contraction_bound={format_float(self.contraction_bound)}",
            f"normalization_residual={format_float(self.normalization_residual)}",
            "images=" + ";".join(f"[{format_float(lo)},{format_float(hi)}]" for lo, hi in self.images),
            f"rho={format_float(self.rho_est)}",
            f"alpha={format_float(self.alpha)}",
            f"equal_derivative={'true' if self.equal_derivative else 'false'}",
        ]
        out.extend(f"{name}={'PASS' if ok else 'FAIL'}" for name, ok in self.verdicts().items())
        out.extend(f"warning={w}" for w in self.warnings)
        return out


def validate(inst, grid_n=GRID_N):
    """
    فحص الفرضيات على grid_n+1 نقطة متساوية المسافات تشمل الطرفين.
    القيم تقديرية: قمة حادة بين نقطتي شبكة قد لا تُرى.
    """
    if int(grid_n) != grid_n or grid_n < 2:
        raise IFSError(f"grid_n must be an integer >= 2, got {grid_n!r}")
    grid = np.linspace(0.0, 1.0, int(grid_n) + 1)

    images_grid = inst.maps_at(grid)
    slopes = inst.derivatives_at(grid)
    weights = inst.weights_at(grid)

    lipschitz = np.abs(slopes).max(axis=1)
    weight_sup = np.abs(weights).max(axis=1)
    L = float(np.sum(weight_sup * lipschitz))
    residual = float(np.abs(weights.sum(axis=0) - 1.0).max())

    images = tuple((float(row.min()), float(row.max())) for row in images_grid)
    ordered = sorted(images)
    # الصور المغلقة المتلامسة تُعد غير منفصلة
    disjoint = all(a[1] < b[0] for a, b in zip(ordered, ordered[1:]))
    inside = all(lo >= -UNIT_SLACK and hi <= 1.0 + UNIT_SLACK for lo, hi in images)

    a = float(lipschitz.max())
    alpha = 1.0 if a <= 0.0 else min(1.0, -math.log(a) / math.log(2.0))
    equal_derivative = bool(np.ptp(slopes, axis=0).max() <= EQUAL_DERIVATIVE_TOL)

    step = 1.0 / grid_n
    weight_lipschitz = np.abs(np.diff(weights, axis=1)).max(axis=1) / step
    diameters = np.array([hi - lo for lo, hi in images])
    contraction_bound = L + float(np.sum(weight_lipschitz * diameters)) / 2.0

    warnings = []
    if inst.spec.has_discontinuous_weights:
        warnings.append("weights discontinuous at breakpoints")
    if a >= 1.0:
        warnings.append("largest Lipschitz estimate is not below 1")

    report = ValidationReport(
        lam=inst.lam,
        theta=inst.theta,
        grid_n=int(grid_n),
        lipschitz=tuple(float(v) for v in lipschitz),
        weight_sup=tuple(float(v) for v in weight_sup),
        L=L,
        normalization_residual=residual,
        images=images,
        disjoint=disjoint,
        rho_est=float(np.abs(slopes).min()),
        alpha=alpha,
        min_weight=float(weights.min()),
        inside_unit=inside,
        equal_derivative=equal_derivative,
        weight_lipschitz=tuple(float(v) for v in weight_lipschitz),
        contraction_bound=contraction_bound,
        warnings=tuple(warnings),
    )
    if report.passed:
        logger.info("✅ التحقق: L=%.6g، البقايا=%.3g", L, residual)
    else:
        failed = [name for name, ok in report.verdicts().items() if not ok]
        logger.info("⚠️ التحقق: أحكام غير محققة %s", failed)
    return report
