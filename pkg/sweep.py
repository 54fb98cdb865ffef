#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
المسح وتشخيص النعومة
====================
- run_sweep: جدول λ ↦ F(λ) (تكامل، بعد Bowen، بعد القياس، ضغط) على شبكة منتظمة
- smoothness_diagnostic: نمو حواصل الفروق المنتهية من الرتبة d مع تصغير الخطوة h
- preset: مواصفات المسح للأنظمة الجاهزة
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from math import comb

import numpy as np

from config import (
    ATOM_BUDGET,
    BOUNDED_SLOPE,
    BOWEN_TOL,
    CYLINDER_DEPTH,
    DEFAULT_BURN_IN,
    DEFAULT_DEPTH,
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    TRANSFER_DEPTH,
    DIAGNOSTIC_MAX_DEPTH,
    DIAGNOSTIC_WINDOW_POINTS,
    DIAGNOSTIC_WINDOW_SCALE,
    DIVERGING_SLOPE,
    GRID_N,
    LADDER_EXPONENTS,
    NOISE_MARGIN,
    POWER_TOL,
    THREADS,
)
from dimension import bowen_root, measure_dimension
from documents import load_preset
from errors import ConfigError, ExpressionSyntaxError, IFSError, NoiseFloorError, ValidationFailure
from expressions import parse_function
from ifs_core import bind
from measure_engine import chaos_game, expand
from symbolic_thermo import Potential, pressure_periodic, pressure_transfer
from utils import validate_count, validate_finite, validate_unit_point

logger = logging.getLogger(__name__)

PARAMETERS = ("lambda", "theta", "tied")
QUANTITIES = ("integral", "bowen_dimension", "measure_dimension", "pressure", "synthetic")
ENGINES = ("depth", "chaos")
METHODS = ("transfer", "periodic")

SWEEP_HEADER = ["param", "value", "err_estimate", "engine", "depth_or_samples", "seed", "error"]
DIAGNOSTIC_HEADER = ["h", "quotient", "order", "probe"]

EPS = float(np.finfo(float).eps)


# ==================== 1. الأنواع ====================

@dataclass(frozen=True)
class Grid:
    lo: float
    hi: float
    points: int

    def __post_init__(self):
        if not self.lo < self.hi:
            raise IFSError(f"sweep grid needs lo < hi, got [{self.lo}, {self.hi}]")
        validate_count(self.points, "points", minimum=2)

    @property
    def length(self):
        return self.hi - self.lo

    def values(self):
        return np.linspace(self.lo, self.hi, self.points)


@dataclass(frozen=True)
class Quantity:
    """
    الكمية المحسوبة عند كل قيمة معامل.

    Parameters:
    -----------
    kind : str
        integral, bowen_dimension, measure_dimension, pressure, synthetic
    integrand : Expr | Piecewise
        دالة الاختبار f للتكامل
    potential, scale : للضغط P(scale·potential)
    function : callable
        للكمية الاصطناعية F(param)
    """

    kind: str
    integrand: object = None
    potential: str = "weight_log"
    scale: float = 1.0
    function: object = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in QUANTITIES:
            raise IFSError(f"unknown quantity {self.kind!r}")
        if self.kind == "integral" and self.integrand is None:
            raise IFSError("integral quantity needs an integrand")
        if self.kind == "synthetic" and not callable(self.function):
            raise IFSError("synthetic quantity needs a callable")
        if self.potential not in ("weight_log", "derivative_log"):
            raise IFSError(f"unknown pressure potential {self.potential!r}")

    @classmethod
    def integral(cls, integrand):
        if isinstance(integrand, (str, dict)):
            integrand = parse_function(integrand)
        return cls("integral", integrand=integrand)

    @classmethod
    def synthetic(cls, function):
        return cls("synthetic", function=function)


@dataclass(frozen=True)
class EngineConfig:
    engine: str = "depth"
    depth: int = DEFAULT_DEPTH
    samples: int = DEFAULT_SAMPLES
    burn_in: int = DEFAULT_BURN_IN
    seed: int = DEFAULT_SEED
    method: str = "transfer"
    transfer_depth: int = TRANSFER_DEPTH
    cylinder_depth: int = CYLINDER_DEPTH
    tol: float = BOWEN_TOL
    x0: float = 0.0

    def __post_init__(self):
        if self.engine not in ENGINES:
            raise IFSError(f"unknown engine {self.engine!r}")
        if self.method not in METHODS:
            raise IFSError(f"unknown pressure method {self.method!r}")


@dataclass(frozen=True)
class SweepSpec:
    family: object
    parameter: str
    fixed: float
    grid: Grid
    quantity: Quantity
    engine: EngineConfig = EngineConfig()

    def __post_init__(self):
        if self.parameter not in PARAMETERS:
            raise IFSError(f"unknown sweep parameter {self.parameter!r}")
        if self.family is None:
            if self.quantity.kind != "synthetic":
                raise IFSError("only synthetic quantities can run without a family")
            return
        for declared in self._varied_ranges():
            if declared is not None and (self.grid.lo < declared[0] or self.grid.hi > declared[1]):
                raise IFSError(f"sweep grid [{self.grid.lo}, {self.grid.hi}] leaves the declared "
                               f"interval [{declared[0]}, {declared[1]}]")

    def _varied_ranges(self):
        if self.parameter == "lambda":
            return (self.family.lambda_range,)
        if self.parameter == "theta":
            return (self.family.theta_range,)
        return (self.family.lambda_range, self.family.theta_range)

    def bind_at(self, value):
        if self.parameter == "lambda":
            return bind(self.family, value, self.fixed)
        if self.parameter == "theta":
            return bind(self.family, self.fixed, value)
        return bind(self.family, value, value)


@dataclass(frozen=True)
class SweepRow:
    param: float
    value: float
    err_estimate: float
    engine: str
    depth_or_samples: int
    seed: int
    error: str = None

    def row(self):
        return [self.param, self.value, self.err_estimate, self.engine,
                self.depth_or_samples, self.seed, self.error or ""]


# ==================== 2. تقييم الكمية ====================

def _require_valid(inst):
    report = inst.report
    if not report.passed:
        failed = next(name for name, ok in report.verdicts().items() if not ok)
        raise ValidationFailure(failed, report)
    return report


def _integrand_lipschitz(integrand, p):
    """sup|f'| على الشبكة، بعيداً عن نقاط القفز"""
    grid = np.linspace(0.0, 1.0, GRID_N + 1)
    try:
        return float(np.max(np.abs(integrand.diff_x().evaluate(grid, p))))
    except IFSError:
        return math.inf


def _depth_integral(inst, integrand, x0, depth):
    """التكامل بالتوسيع الخام مع ضجيج التقريب المضمون eps·(n+1)·Σ|w·f|"""
    positions, weights = expand(inst, x0, depth)
    terms = weights * integrand.evaluate(positions, inst.lam)
    noise = EPS * (depth + 1) * float(np.sum(np.abs(terms)))
    return float(np.sum(terms)), noise


def engine_from_document(engine_doc):
    """EngineConfig من قسم engine في المستند"""
    try:
        return EngineConfig(
            engine=engine_doc["engine"],
            depth=validate_count(engine_doc["depth"], "depth"),
            samples=validate_count(engine_doc["samples"], "samples"),
            burn_in=validate_count(engine_doc["burn_in"], "burn_in", minimum=0),
            seed=validate_count(engine_doc["seed"], "seed", minimum=0),
            method=engine_doc["method"],
            transfer_depth=validate_count(engine_doc["transfer_depth"], "transfer_depth"),
            cylinder_depth=validate_count(engine_doc["cylinder_depth"], "cylinder_depth"),
            tol=validate_finite(engine_doc["tol"], "tol"),
            x0=validate_unit_point(engine_doc["x0"]),
        )
    except ConfigError:
        raise
    except (IFSError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid engine settings: {exc}") from exc


def integral_estimate(inst, integrand, engine, seed):
    """
    ∫f dμ بالمحرك المختار: (القيمة، تقدير الخطأ، اسم المحرك، العمق أو عدد العينات).

    depth: الخطأ = Lip(f)·L^n + ضجيج التقريب.
    chaos: الخطأ المعياري sqrt(Var/N).
    """
    report = _require_valid(inst)
    if engine.engine == "chaos":
        nu = chaos_game(inst, engine.x0, engine.burn_in, engine.samples, seed)
        values = integrand.evaluate(nu.positions, inst.lam)
        mean = float(np.sum(nu.weights * values))
        spread = float(np.sum(nu.weights * (values - mean) ** 2))
        return mean, math.sqrt(spread / engine.samples), "chaos", engine.samples
    result, noise = _depth_integral(inst, integrand, engine.x0, engine.depth)
    bias = _integrand_lipschitz(integrand, inst.lam) * report.L ** engine.depth
    return result, bias + noise, "depth", engine.depth


def evaluate_quantity(spec, value, seed):
    """(القيمة، تقدير الخطأ، اسم المحرك، العمق أو عدد العينات)"""
    quantity, engine = spec.quantity, spec.engine
    if quantity.kind == "synthetic":
        result = float(quantity.function(value))
        return result, 4.0 * EPS * abs(result), "synthetic", 0

    inst = spec.bind_at(value)
    report = _require_valid(inst)

    if quantity.kind == "integral":
        return integral_estimate(inst, quantity.integrand, engine, seed)

    if quantity.kind == "bowen_dimension":
        result = bowen_root(inst, engine.method, engine.transfer_depth, engine.tol)
        return result.t_star, result.bracket[1] - result.bracket[0], engine.method, engine.transfer_depth

    if quantity.kind == "measure_dimension":
        result = measure_dimension(inst, engine.cylinder_depth)
        a = max(report.lipschitz)
        return result.hd_measure, a ** engine.cylinder_depth, "gibbs", engine.cylinder_depth

    base = Potential.weight_log(inst) if quantity.potential == "weight_log" else Potential.derivative_log(inst)
    phi = Potential.scaled(quantity.scale, base)
    if engine.method == "transfer":
        estimate = pressure_transfer(phi, engine.transfer_depth)
    else:
        estimate = pressure_periodic(phi, engine.transfer_depth)
    return estimate.value, estimate.gap, engine.method, engine.transfer_depth


# ==================== 3. المسح ====================

def run_sweep(spec, threads=THREADS):
    """
    صف لكل نقطة من الشبكة بترتيبها؛ البذرة = البذرة الأساسية + فهرس النقطة.
    فشل نقطة يُسجل في عمود error ويستمر المسح.
    """
    threads = validate_count(threads, "threads")
    values = spec.grid.values()

    def task(index):
        param = float(values[index])
        seed = spec.engine.seed + index
        try:
            value, err, engine, size = evaluate_quantity(spec, param, seed)
            return SweepRow(param, value, err, engine, size, seed)
        except IFSError as exc:
            logger.warning("⚠️ فشل المسح عند %s=%.17g: %s", spec.parameter, param, exc)
            engine = spec.engine
            size = engine.samples if engine.engine == "chaos" else engine.depth
            return SweepRow(param, math.nan, math.nan, engine.engine, size, seed, str(exc))

    if threads == 1:
        rows = [task(i) for i in range(len(values))]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(task, range(len(values))))
    failed = sum(1 for row in rows if row.error)
    logger.info("✅ المسح: %d صف (%d فاشل)", len(rows), failed)
    return rows


# ==================== 4. تشخيص النعومة ====================

@dataclass(frozen=True)
class SmoothnessDiagnostic:
    order: int
    probe: float
    ladder: tuple
    quotients: tuple
    central: tuple
    forward: tuple
    backward: tuple
    growth_exponent: float
    verdict: str
    depth: int
    noise_floor: float
    noise_limit: float
    bias: float
    window_points: int
    certified: bool = True

    @property
    def label(self):
        """الحكم كما يُطبع: يُوسم بـ uncertified حين يتجاوز انحياز الاقتطاع حد الضجيج"""
        return self.verdict if self.certified else f"{self.verdict} (uncertified)"

    def rows(self):
        """صف لكل h: أعلى حاصل فرق على نافذة حول نقطة الفحص"""
        return [[h, q, self.order, self.probe] for h, q in zip(self.ladder, self.quotients)]


def default_ladder(grid):
    return tuple(grid.length * 2.0 ** -j for j in LADDER_EXPONENTS)


def _choose_depth(spec, probe, min_step, order):
    """أصغر n مع L^n < NOISE_MARGIN·min(h^d)، مقيداً بالحد الأقصى وميزانية الذرات"""
    inst = spec.bind_at(probe)
    L = _require_valid(inst).L
    target = NOISE_MARGIN * min_step ** order
    depth = DIAGNOSTIC_MAX_DEPTH if L <= 0 else max(1, math.ceil(math.log(target) / math.log(L)))
    by_budget = int(math.log(ATOM_BUDGET) / math.log(inst.k))
    depth = min(depth, DIAGNOSTIC_MAX_DEPTH, by_budget)
    return depth, L ** depth


def _evaluator(spec, probe, min_step, order):
    """دالة param ↦ (F, ضجيج مضمون) بمحرك حتمي، مع العمق والانحياز"""
    quantity = spec.quantity
    if quantity.kind == "synthetic":
        def synthetic(param):
            result = float(quantity.function(param))
            return result, 4.0 * EPS * abs(result)
        return synthetic, 0, 0.0

    if quantity.kind == "integral":
        depth, bias = _choose_depth(spec, probe, min_step, order)

        def integral(param):
            inst = spec.bind_at(param)
            return _depth_integral(inst, quantity.integrand, spec.engine.x0, depth)
        return integral, depth, bias

    deterministic = replace(spec, engine=replace(spec.engine, engine="depth"))

    def other(param):
        result, err, _, _ = evaluate_quantity(deterministic, param, spec.engine.seed)
        if quantity.kind == "bowen_dimension":
            return result, err
        return result, max(POWER_TOL, 4.0 * EPS * abs(result))
    return other, spec.engine.transfer_depth, 0.0


def _difference(F, nodes, step, order, offset):
    """Σ_j (−1)^(d−j)·C(d,j)·F(c + (j + offset)·h) / h^d"""
    total = 0.0
    for j in range(order + 1):
        total += (-1) ** (order - j) * comb(order, j) * F(nodes + (j + offset) * step)
    return total / step ** order


def smoothness_diagnostic(spec, probe, order, ladder=None,
                          window_points=DIAGNOSTIC_WINDOW_POINTS,
                          window_scale=DIAGNOSTIC_WINDOW_SCALE):
    """
    لكل h: أعلى |Δ^d_h F(c)|/h^d على مراكز c في نافذة نصف عرضها window_scale·sqrt(h·ℓ)
    حول نقطة الفحص (مقيدة بحيث تبقى كل نقاط الاستنسل داخل المجال)، ثم ميل
    log(الحاصل) مقابل log h بالمربعات الصغرى والحكم حسب العتبات.
    حين لا يكون انحياز الاقتطاع L^n دون حد الضجيج تُعاد النتيجة بـ certified=False.
    """
    order = validate_count(order, "order")
    if order > 3:
        raise IFSError(f"order must be 1, 2 or 3, got {order}")
    probe = validate_finite(probe, "probe")
    grid = spec.grid
    ladder = tuple(float(h) for h in (ladder or default_ladder(grid)))
    if len(ladder) < 4 or min(ladder) <= 0:
        raise IFSError("the step ladder needs at least 4 positive steps")
    if probe - max(ladder) * order < grid.lo or probe + max(ladder) * order > grid.hi:
        raise IFSError(f"probe {probe} ± {order}·max(h) leaves [{grid.lo}, {grid.hi}]")
    window_points = validate_count(window_points, "window_points")
    if window_points % 2 == 0:
        window_points += 1

    min_step = min(ladder)
    evaluate, depth, bias = _evaluator(spec, probe, min_step, order)
    cache = {}
    noise = [0.0]

    def F(params):
        out = np.empty(np.shape(params))
        for index, param in np.ndenumerate(np.asarray(params, dtype=float)):
            key = float(param)
            if key not in cache:
                cache[key] = evaluate(key)
            out[index] = cache[key][0]
            noise[0] = max(noise[0], cache[key][1])
        return out

    quotients, central, forward, backward = [], [], [], []
    room = min(probe - grid.lo, grid.hi - probe)
    for h in ladder:
        half_width = min(window_scale * math.sqrt(h * grid.length), room - order * h / 2.0)
        offsets = np.linspace(-1.0, 1.0, window_points) * max(half_width, 0.0)
        centers = probe + offsets
        values = _difference(F, centers, h, order, -order / 2.0)
        quotients.append(float(np.max(np.abs(values))))
        central.append(float(values[window_points // 2]))
        forward.append(float(_difference(F, np.array([probe]), h, order, 0.0)[0]))
        backward.append(float(_difference(F, np.array([probe]), h, order, -float(order))[0]))
        logger.debug("h=%.6g: أعلى حاصل %.6g، مركزي %.6g", h, quotients[-1], central[-1])

    noise_limit = NOISE_MARGIN * min_step ** order
    if not noise[0] < noise_limit:
        raise NoiseFloorError(f"evaluation noise {noise[0]:.3g} is not below {noise_limit:.3g}; "
                              f"refusing to classify")

    certified = bias < noise_limit
    if not certified:
        logger.warning("⚠️ انحياز الاقتطاع L^n=%.3g عند العمق %d ليس دون %.3g؛ الحكم غير مضمون",
                       bias, depth, noise_limit)

    tiny = np.finfo(float).tiny
    slope = float(np.polyfit(np.log(ladder), np.log(np.maximum(quotients, tiny)), 1)[0])
    if slope >= BOUNDED_SLOPE:
        verdict = "bounded"
    elif slope <= DIVERGING_SLOPE:
        verdict = "diverging"
    else:
        verdict = "inconclusive"
    result = SmoothnessDiagnostic(
        order=order, probe=probe, ladder=ladder, quotients=tuple(quotients),
        central=tuple(central), forward=tuple(forward), backward=tuple(backward),
        growth_exponent=slope, verdict=verdict, depth=depth, noise_floor=noise[0],
        noise_limit=noise_limit, bias=bias, window_points=window_points, certified=certified,
    )
    logger.info("✅ تشخيص النعومة d=%d عند %.6g: الميل %.4f → %s (عمق %s، ضجيج %.3g < %.3g)",
                order, probe, slope, result.label, depth, noise[0], noise_limit)
    return result


# ==================== 5. الأنظمة الجاهزة ====================

def spec_from_document(document):
    """SweepSpec من ConfigDocument"""
    family, engine_doc, sweep_doc = document.family, document.engine, document.sweep
    parameter = sweep_doc["parameter"]
    if parameter not in PARAMETERS:
        raise ConfigError(f"unknown sweep parameter {parameter!r}")
    declared = family.theta_range if parameter == "theta" else family.lambda_range
    lo = sweep_doc["lo"] if sweep_doc["lo"] is not None else (declared[0] if declared else None)
    hi = sweep_doc["hi"] if sweep_doc["hi"] is not None else (declared[1] if declared else None)
    if lo is None or hi is None:
        raise ConfigError("sweep needs lo/hi or a declared parameter interval")
    fixed = engine_doc["lambda"] if parameter == "theta" else engine_doc["theta"]

    kind = sweep_doc["quantity"]
    if kind not in ("integral", "pressure", "bowen_dimension", "measure_dimension"):
        raise ConfigError(f"quantity {kind!r} cannot be configured from a document")

    try:
        if kind == "integral":
            quantity = Quantity.integral(sweep_doc["integrand"])
        elif kind == "pressure":
            quantity = Quantity("pressure", potential=sweep_doc["potential"], scale=float(sweep_doc["scale"]))
        else:
            quantity = Quantity(kind)
        engine = engine_from_document(engine_doc)
        return SweepSpec(family, parameter, float(fixed), Grid(float(lo), float(hi), int(sweep_doc["points"])),
                         quantity, engine)
    except (ConfigError, ExpressionSyntaxError):
        raise
    except (IFSError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid engine or sweep settings: {exc}") from exc


def preset(name):
    """مواصفات المسح لأحد الأنظمة الجاهزة: simple_4_1, cantor, ex_4_3, ex_4_4"""
    return spec_from_document(load_preset(name))
