#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
محرك القياسات
=============
تقريب القياس الثابت μ لنظام IFS موزون:
- markov_step: مؤثر ماركوف 𝒮ν(f) = Σ_i ∫ g_i·(f∘T_i) dν
- depth_n_measure: مجموع كل الكلمات بطول n انطلاقاً من x0
- chaos_game: سلسلة ماركوف x ← T_I(x) مع P(I=i|x) = g_i(x)
- integrate / w1_distance / stationarity_residual
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.stats import wasserstein_distance

from config import ATOM_BUDGET, DEFAULT_BURN_IN
from errors import AtomBudgetError, EvaluationError, ExpressionDomainError, IFSError
from expressions import Expr, Piecewise
from extensions import make_rng
from utils import validate_count, validate_unit_point

logger = logging.getLogger(__name__)

UNIT_SLACK = 1e-12


# ==================== 1. الأنواع ====================

@dataclass(frozen=True)
class EvolveConfig:
    """
    ضبط التطور: prune_eps يحذف الذرات الأخف منه ثم يعيد التطبيع،
    و merge_tol يدمج الذرات الأقرب منه (مجموع الأوزان، موضع بمتوسط موزون).
    """

    prune_eps: float = 0.0
    merge_tol: float = 0.0
    atom_budget: int = ATOM_BUDGET

    def __post_init__(self):
        if self.prune_eps < 0 or self.merge_tol < 0:
            raise IFSError("prune_eps and merge_tol must be >= 0")
        if self.atom_budget < 1:
            raise IFSError("atom_budget must be >= 1")

    @property
    def is_trivial(self):
        return self.prune_eps == 0 and self.merge_tol == 0


class DiscreteMeasure:
    """قياس احتمالي منتهي الدعم على [0,1]: مواضع متزايدة تماماً وأوزان موجبة"""

    __slots__ = ("positions", "weights")

    def __init__(self, positions, weights):
        positions = np.array(positions, dtype=float)
        weights = np.array(weights, dtype=float)
        positions.flags.writeable = False
        weights.flags.writeable = False
        self.positions = positions
        self.weights = weights

    @classmethod
    def from_atoms(cls, positions, weights, normalize=True, merge_tol=0.0):
        """ترتيب الذرات، دمج المتطابقة (أو الأقرب من merge_tol)، ثم التطبيع"""
        positions = np.asarray(positions, dtype=float).ravel()
        weights = np.asarray(weights, dtype=float).ravel()
        if positions.shape != weights.shape:
            raise IFSError("positions and weights must have the same length")
        if np.any(weights < 0) or not np.all(np.isfinite(weights)):
            raise IFSError("atom weights must be finite and non-negative")
        keep = weights > 0
        positions, weights = positions[keep], weights[keep]
        if positions.size == 0:
            raise IFSError("a measure needs at least one atom with positive weight")
        if positions.min() < -UNIT_SLACK or positions.max() > 1.0 + UNIT_SLACK:
            raise IFSError("atom positions must lie in [0,1]")
        positions = np.clip(positions, 0.0, 1.0)

        order = np.argsort(positions, kind="stable")
        positions, weights = positions[order], weights[order]
        # الدمج المتسلسل: تبدأ مجموعة جديدة عندما تتجاوز الفجوة merge_tol
        starts = np.concatenate(([True], np.diff(positions) > merge_tol))
        groups = np.cumsum(starts) - 1
        merged_weights = np.bincount(groups, weights=weights)
        if merge_tol > 0:
            merged_positions = np.bincount(groups, weights=weights * positions) / merged_weights
        else:
            merged_positions = positions[starts]
        if normalize:
            merged_weights = merged_weights / merged_weights.sum()
        return cls(merged_positions, merged_weights)

    @classmethod
    def dirac(cls, x):
        return cls([validate_unit_point(x, "x")], [1.0])

    def __len__(self):
        return self.positions.size

    def __repr__(self):
        return f"DiscreteMeasure({len(self)} atoms)"

    @property
    def atoms(self):
        return list(zip(self.positions.tolist(), self.weights.tolist()))

    @property
    def total_mass(self):
        return float(self.weights.sum())

    def mean(self):
        return float(np.sum(self.weights * self.positions))

    def rows(self):
        return zip(self.positions.tolist(), self.weights.tolist())


# ==================== 2. مؤثر ماركوف والتوسيع ====================

def _branch_weights(inst, positions):
    """مصفوفة (k, n) من g_i عند الذرات، مع رفض القيم غير الموجبة"""
    weights = inst.weights_at(positions)
    bad = np.argwhere(weights <= 0)
    if bad.size:
        i, j = bad[0]
        raise EvaluationError("weight non-positive at an atom", branch=int(i) + 1, x=float(positions[j]))
    return weights


def _finalize(positions, weights, cfg):
    if cfg.prune_eps > 0:
        keep = weights >= cfg.prune_eps
        positions, weights = positions[keep], weights[keep]
    return DiscreteMeasure.from_atoms(positions, weights, merge_tol=cfg.merge_tol)


def markov_step(inst, nu, cfg=EvolveConfig()):
    """𝒮ν = Σ_j Σ_i w_j·g_i(x_j)·δ_{T_i(x_j)}"""
    inst.require("normalization")
    if inst.k * len(nu) > cfg.atom_budget:
        raise AtomBudgetError(f"markov step would create {inst.k * len(nu)} atoms (budget {cfg.atom_budget})")
    positions = nu.positions
    images = inst.maps_at(positions)
    weights = _branch_weights(inst, positions) * nu.weights
    return _finalize(images.ravel(), weights.ravel(), cfg)


def expand(inst, x0, n, atom_budget=ATOM_BUDGET):
    """
    التوسيع الخام بعمق n دون ترتيب أو دمج.

    Returns:
        (positions, weights) بترتيب معجمي للكلمات (i_1, ..., i_n)،
        الوزن g_{i1}(T_{i2}⋯T_{in}x0)⋯g_{in}(x0) والموضع T_{i1}⋯T_{in}x0
    """
    x0 = validate_unit_point(x0)
    n = validate_count(n, "n")
    if inst.k ** n > atom_budget:
        raise AtomBudgetError(f"{inst.k}^{n} atoms exceed the atom budget {atom_budget}")
    positions = np.array([x0])
    weights = np.array([1.0])
    for _ in range(n):
        # الرمز الجديد في مقدمة الكلمة: الفهرس = i·len + j
        branch_weights = _branch_weights(inst, positions)
        positions = inst.maps_at(positions).ravel()
        weights = (branch_weights * weights).ravel()
    return positions, weights


def depth_n_measure(inst, x0, n, cfg=EvolveConfig()):
    """القياس المنتهي بعمق n انطلاقاً من δ_{x0}"""
    inst.require("normalization")
    x0 = validate_unit_point(x0)
    n = validate_count(n, "n")
    if cfg.is_trivial:
        positions, weights = expand(inst, x0, n, cfg.atom_budget)
        measure = DiscreteMeasure.from_atoms(positions, weights)
    else:
        measure = DiscreteMeasure.dirac(x0)
        for _ in range(n):
            measure = markov_step(inst, measure, cfg)
    logger.info("✅ قياس بعمق %d: %d ذرة", n, len(measure))
    return measure


def truncation_bound(L, n):
    """W1(μ_n, μ) ≤ L^n·W1(δ_{x0}, μ) ≤ L^n على [0,1]"""
    return float(L) ** n


# ==================== 3. لعبة الفوضى ====================

def chaos_game(inst, x0, burn_in=DEFAULT_BURN_IN, samples=1, seed=0):
    """
    محاكاة السلسلة مع اختيار الفرع بمعكوس دالة التوزيع التراكمية
    للأوزان عند النقطة الحالية (مجاميع تراكمية بترتيب الفروع).
    """
    inst.require("normalization")
    x = validate_unit_point(x0)
    burn_in = validate_count(burn_in, "burn_in", minimum=0)
    samples = validate_count(samples, "samples")

    draws = make_rng(seed).random(burn_in + samples)
    maps, weights = inst.map_functions, inst.weight_functions
    last = inst.k - 1
    trajectory = np.empty(samples)
    try:
        for step, u in enumerate(draws):
            choice = last
            cumulative = 0.0
            for i in range(last):
                cumulative += weights[i](x)
                if u < cumulative:
                    choice = i
                    break
            x = float(maps[choice](x))
            if step >= burn_in:
                trajectory[step - burn_in] = x
    except ExpressionDomainError as exc:
        raise EvaluationError(f"chaos game evaluation failed: {exc}", x=x) from exc

    measure = DiscreteMeasure.from_atoms(trajectory, np.ones(samples))
    logger.info("✅ لعبة الفوضى: %d عينة، بذرة %d، %d ذرة مميزة", samples, seed, len(measure))
    return measure


# ==================== 4. التكامل والمسافات ====================

def as_function(f, p=0.0):
    """تحويل تعبير أو دالة مجزأة إلى دالة قابلة للاستدعاء"""
    if isinstance(f, (Expr, Piecewise)):
        return f.compile(p)
    if callable(f):
        return f
    raise IFSError(f"cannot integrate {f!r}")


def _values(f, positions):
    fn = as_function(f)
    try:
        with np.errstate(invalid="ignore", over="ignore"):
            try:
                values = fn(positions)
            except TypeError:
                values = np.array([fn(float(x)) for x in positions])
    except ExpressionDomainError as exc:
        raise EvaluationError(f"integrand evaluation failed: {exc}") from exc
    values = np.broadcast_to(np.asarray(values, dtype=float), positions.shape)
    if not np.all(np.isfinite(values)):
        raise EvaluationError("integrand is not finite on the support")
    return values


def integrate(nu, f):
    """Σ_j w_j f(x_j)"""
    return float(np.sum(nu.weights * _values(f, nu.positions)))


def w1_distance(mu, nu):
    """مسافة Wasserstein-1 الدقيقة على المستقيم: ∫|F_μ − F_ν| dt"""
    return float(wasserstein_distance(mu.positions, nu.positions, mu.weights, nu.weights))


def stationarity_residual(inst, nu, test_fns):
    """max_f |∫f dν − Σ_i ∫ g_i·(f∘T_i) dν|"""
    inst.require("normalization")
    positions = nu.positions
    images = inst.maps_at(positions)
    pushed = _branch_weights(inst, positions) * nu.weights
    residual = 0.0
    for f in test_fns:
        lhs = np.sum(nu.weights * _values(f, positions))
        rhs = np.sum(pushed * _values(f, images.ravel()).reshape(images.shape))
        residual = max(residual, abs(float(lhs - rhs)))
    return residual
