#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
البعد
=====
- bowen_root: بعد هاوسدورف للمجموعة النهائية كجذر معادلة Bowen
  B(t) = P(t·log|dT|) = 0، دالة متناقصة تماماً لأن log|dT| < 0
- moran_dimension: الجذر المغلق Σ r_i^s = 1 للأنظمة التآلفية المنفصلة
- measure_dimension: بعد القياس الثابت بمبرهنة الحجم HD(μ) = h/χ
"""

import logging
import math
from dataclasses import dataclass

from scipy.optimize import bisect

from config import BOWEN_MAX_STEPS, BOWEN_T_MAX, BOWEN_TOL, CYLINDER_DEPTH, TRANSFER_DEPTH
from errors import BracketError, IFSError
from symbolic_thermo import Potential, gibbs_entropy, gibbs_integral, pressure_value
from utils import validate_count

logger = logging.getLogger(__name__)

DIMENSION_HEADER = ["lambda", "theta", "t_star", "h", "chi", "hd_measure",
                    "bracket_lo", "bracket_hi", "depth", "method"]


@dataclass(frozen=True)
class DimensionResult:
    t_star: float = math.nan
    h: float = math.nan
    chi: float = math.nan
    hd_measure: float = math.nan
    bracket: tuple = (math.nan, math.nan)
    pressure_method: str = "transfer"
    depth: int = 0
    lam: float = math.nan
    theta: float = math.nan

    def merged(self, other):
        """دمج نتيجة الجذر مع نتيجة القياس في صف واحد"""
        return DimensionResult(
            t_star=self.t_star if not math.isnan(self.t_star) else other.t_star,
            h=other.h, chi=other.chi, hd_measure=other.hd_measure,
            bracket=self.bracket, pressure_method=self.pressure_method,
            depth=self.depth, lam=self.lam, theta=self.theta,
        )

    def row(self):
        return [self.lam, self.theta, self.t_star, self.h, self.chi, self.hd_measure,
                self.bracket[0], self.bracket[1], self.depth, self.pressure_method]


def bowen_function(inst, t, method="transfer", depth=TRANSFER_DEPTH):
    """B(t) = P(t·log|dT|)"""
    return pressure_value(Potential.scaled(t, Potential.derivative_log(inst)), method, depth)


def bowen_root(inst, method="transfer", depth=TRANSFER_DEPTH, tol=BOWEN_TOL, t_max=BOWEN_T_MAX):
    """تنصيف B على [0, t_max] حتى عرض ≤ tol"""
    inst.require("disjoint", "derivative_bound")
    depth = validate_count(depth, "depth")
    if not tol > 0:
        raise IFSError(f"tol must be positive, got {tol!r}")

    lo, hi = 0.0, float(t_max)
    b_lo, b_hi = bowen_function(inst, lo, method, depth), bowen_function(inst, hi, method, depth)
    if not (b_lo > 0.0 > b_hi):
        raise BracketError(f"Bowen function does not change sign on [0, {t_max}]: "
                           f"B(0)={b_lo!r}, B({t_max})={b_hi!r}")
    steps = 0
    while hi - lo > tol and steps < BOWEN_MAX_STEPS:
        mid = 0.5 * (lo + hi)
        if bowen_function(inst, mid, method, depth) > 0.0:
            lo = mid
        else:
            hi = mid
        steps += 1
        logger.debug("تنصيف Bowen %d: [%.17g, %.17g]", steps, lo, hi)

    t_star = 0.5 * (lo + hi)
    logger.info("✅ جذر Bowen: t*=%.12g بعد %d خطوة (%s، عمق %d)", t_star, steps, method, depth)
    return DimensionResult(t_star=t_star, bracket=(lo, hi), pressure_method=method,
                           depth=depth, lam=inst.lam, theta=inst.theta)


def moran_dimension(ratios):
    """الحل الوحيد s لـ Σ r_i^s = 1 بالتنصيف حتى 1e-12"""
    ratios = [float(r) for r in ratios]
    if not ratios:
        raise IFSError("moran_dimension needs at least one ratio")
    if any(not 0.0 < r < 1.0 for r in ratios):
        raise IFSError(f"contraction ratios must lie in (0,1), got {ratios}")
    if len(ratios) == 1:
        return 0.0

    def excess(s):
        return sum(r ** s for r in ratios) - 1.0

    upper = 1.0
    while excess(upper) > 0.0:
        upper *= 2.0
    return float(bisect(excess, 0.0, upper, xtol=1e-12))


def measure_dimension(inst, n=CYLINDER_DEPTH, potential=None):
    """
    h/χ على أسطوانات بطول n.

    Parameters:
    -----------
    potential : Potential أو None
        None: قياس Gibbs للجهد المطبّع log g، و h = −∫log g dν.
        غير ذلك: قياس Gibbs لهذا الجهد، و h = P(φ) − ∫φ dν.
    """
    n = validate_count(n, "n")
    inst.require("disjoint", "derivative_bound")
    derivative_log = Potential.derivative_log(inst)
    if potential is None:
        inst.require("normalization")
        h = -gibbs_integral(inst, Potential.weight_log(inst), n)
        chi = -gibbs_integral(inst, derivative_log, n)
        method = "gibbs"
    else:
        h, _ = gibbs_entropy(potential, n)
        chi = -gibbs_integral(inst, derivative_log, n, base=potential)
        method = "transfer"
    if chi <= 0.0:
        raise IFSError(f"Lyapunov exponent must be positive, got {chi!r}")
    hd = h / chi
    logger.info("✅ بعد القياس: h=%.10g، χ=%.10g، HD=%.10g (عمق %d)", h, chi, hd, n)
    return DimensionResult(h=h, chi=chi, hd_measure=hd, pressure_method=method,
                           depth=n, lam=inst.lam, theta=inst.theta)
