#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
الديناميكا الرمزية والشكلانية الحرارية
======================================
- SymbolWord ومسافة الإزاحة
- خريطة الإسقاط π: كلمة رمزية ← نقطة من المجموعة النهائية
- الجهود (Potential): log g (المطبّع)، log|dT|، ثابت، مضاعف، ومجموع
- الضغط بطريقتين: مجاميع المدارات الدورية، والقيمة الذاتية الرائدة لمؤثر النقل
- أوزان أسطوانات Gibbs والتكامل بالنسبة لها، وفحص مشتقة الضغط

كل تعداد للكلمات يتم بترتيب معجمي ثابت حتى تبقى النتائج مطابقة بتاً بتاً.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.special import logsumexp

from config import (
    ATOM_BUDGET,
    GRID_N,
    POWER_ITERS,
    POWER_TOL,
    PROJECTION_MAX_ITERS,
    PROJECTION_TOL,
    TRANSFER_DEPTH,
)
from errors import (
    AtomBudgetError,
    ConvergenceError,
    EvaluationError,
    IFSError,
    ProjectionError,
)
from measure_engine import expand
from utils import validate_count, validate_finite

logger = logging.getLogger(__name__)


# ==================== 1. الكلمات الرمزية ====================

@dataclass(frozen=True)
class SymbolWord:
    """كلمة منتهية فوق {1..k}؛ periodic تعني امتدادها الدوري اللانهائي"""

    symbols: tuple
    periodic: bool = False

    def __post_init__(self):
        symbols = tuple(int(s) for s in self.symbols)
        if not symbols:
            raise IFSError("a symbol word must be nonempty")
        if min(symbols) < 1:
            raise IFSError(f"symbols start at 1, got {symbols}")
        object.__setattr__(self, "symbols", symbols)

    @classmethod
    def parse(cls, text, periodic=False):
        """'121' أو '10.2.3' عند وجود رموز من أكثر من خانة"""
        parts = text.split(".") if "." in text else list(text)
        try:
            return cls(tuple(int(part) for part in parts), periodic)
        except ValueError:
            raise IFSError(f"malformed symbol word {text!r}") from None

    def __len__(self):
        return len(self.symbols)

    def __str__(self):
        if max(self.symbols) <= 9:
            return "".join(str(s) for s in self.symbols)
        return ".".join(str(s) for s in self.symbols)

    def check(self, k):
        if max(self.symbols) > k:
            raise IFSError(f"word {self} uses symbols beyond k={k}")
        return self

    def prefix(self, m):
        """أول m رمزاً (من الامتداد الدوري عند الحاجة)"""
        if m <= len(self.symbols):
            return self.symbols[:m]
        if not self.periodic:
            raise IFSError(f"finite word {self} is shorter than {m}")
        repeats = -(-m // len(self.symbols))
        return (self.symbols * repeats)[:m]

    def rotated(self):
        """σ على الامتداد الدوري: (w1, ..., w_{m-1}, w0)"""
        return SymbolWord(self.symbols[1:] + self.symbols[:1], periodic=True)


def shift_metric(x, y):
    """d(x,y) = Σ_n (1 − δ_{x_n}(y_n)) / 2^n مقتطعاً عند أطول الكلمتين"""
    m = max(len(x), len(y))
    a, b = x.prefix(m), y.prefix(m)
    return float(sum(0.5 ** n for n in range(m) if a[n] != b[n]))


def all_words(k, n):
    """مصفوفة (k^n, n) لكل الكلمات بطول n (رموز من 0) بترتيب معجمي"""
    index = np.arange(k ** n)
    powers = k ** np.arange(n - 1, -1, -1)
    return (index[:, None] // powers[None, :]) % k


def _check_budget(k, n, atom_budget):
    if k ** n > atom_budget:
        raise AtomBudgetError(f"{k}^{n} words exceed the atom budget {atom_budget}")


# ==================== 2. خريطة الإسقاط ====================

def periodic_points(inst, words, tol=PROJECTION_TOL, max_iters=PROJECTION_MAX_ITERS):
    """π(w^∞) لكل صف من words (رموز من 0): النقطة الثابتة لتركيب الدورة"""
    words = np.atleast_2d(words)
    x = np.zeros(words.shape[0])
    for _ in range(max_iters):
        y = x
        for j in range(words.shape[1] - 1, -1, -1):
            y = inst.apply_symbols(words[:, j], y)
        delta = float(np.max(np.abs(y - x)))
        x = y
        if delta < tol:
            return x
    raise ProjectionError(f"cycle projection did not converge in {max_iters} iterations")


def _project_tail(inst, symbols):
    """π للكلمة المنتهية (رموز من 0)؛ الكلمة الفارغة تعطي 0"""
    x = np.zeros(1)
    for s in symbols[::-1]:
        x = inst.apply_symbols(np.array([s]), x)
    return float(x[0])


def project(inst, w, tol=PROJECTION_TOL):
    """
    π للكلمة: للمنتهية T_{w0}∘⋯∘T_{w_{m-1}}(0) (على بعد ≤ a^m من π لأي امتداد)،
    وللدورية النقطة الثابتة لتركيب الدورة.
    """
    inst.require("contraction")
    w.check(inst.k)
    symbols = np.array(w.symbols) - 1
    if w.periodic:
        return float(periodic_points(inst, symbols[None, :], tol)[0])
    return _project_tail(inst, symbols)


# ==================== 3. الجهود ====================

POTENTIAL_KINDS = ("weight_log", "derivative_log", "constant", "scaled", "sum")


@dataclass(frozen=True)
class Potential:
    """
    جهد من خطوة واحدة: قيمته عند الكلمة x هي F(x_0, π(σx)).

    Parameters:
    -----------
    kind : str
        weight_log → log g_{x0}، derivative_log → log|dT_{x0}|،
        constant → value، scaled → value·parts[0]، sum → Σ parts
    instance : IFSInstance
        النظام الذي يُقيّم عليه الجهد
    """

    kind: str
    instance: object = field(default=None, compare=False)
    value: float = 0.0
    parts: tuple = ()

    def __post_init__(self):
        if self.kind not in POTENTIAL_KINDS:
            raise IFSError(f"unknown potential kind {self.kind!r}")
        if not math.isfinite(self.value):
            raise IFSError(f"potential {self.kind} needs a finite value, got {self.value!r}")
        if self.instance is None:
            raise IFSError("a potential needs a bound instance")

    # --- البناء ---
    @classmethod
    def weight_log(cls, inst):
        return cls("weight_log", inst)

    @classmethod
    def derivative_log(cls, inst):
        return cls("derivative_log", inst)

    @classmethod
    def constant(cls, c, inst):
        return cls("constant", inst, validate_finite(c, "constant"))

    @classmethod
    def scaled(cls, t, inner):
        return cls("scaled", inner.instance, validate_finite(t, "scale"), (inner,))

    @classmethod
    def sum(cls, *parts):
        if len(parts) < 2:
            raise IFSError("a sum potential needs at least two parts")
        return cls("sum", parts[0].instance, 0.0, tuple(parts))

    def __add__(self, other):
        return Potential.sum(self, other)

    @property
    def k(self):
        return self.instance.k

    @property
    def is_normalized_weight(self):
        return self.kind == "weight_log"

    def __str__(self):
        if self.kind == "constant":
            return f"constant({self.value!r})"
        if self.kind == "scaled":
            return f"scaled({self.value!r}, {self.parts[0]})"
        if self.kind == "sum":
            return " + ".join(str(part) for part in self.parts)
        return self.kind

    # --- التقييم ---
    def local(self, symbols, points):
        """F(s_j, y_j) لمصفوفتي الرموز (من 0) والنقاط"""
        symbols = np.asarray(symbols)
        points = np.asarray(points, dtype=float)
        if self.kind == "constant":
            return np.full(points.shape, self.value)
        if self.kind == "scaled":
            return self.value * self.parts[0].local(symbols, points)
        if self.kind == "sum":
            return sum(part.local(symbols, points) for part in self.parts)

        inst = self.instance
        if self.kind == "weight_log":
            table, what = inst.weights_at(points), "weight"
        else:
            table, what = np.abs(inst.derivatives_at(points)), "derivative"
        chosen = np.take_along_axis(table, symbols[None, :], axis=0)[0]
        bad = np.flatnonzero(chosen <= 0)
        if bad.size:
            j = bad[0]
            raise EvaluationError(f"{what} is not positive for {self.kind}", branch=int(symbols[j]) + 1,
                                  x=float(points[j]))
        return np.log(chosen)

    def lipschitz_bound(self, grid_n=GRID_N):
        """تقدير sup|∂F/∂y| على الشبكة (لا نهائي إن تعذر التقييم)"""
        if self.kind == "constant":
            return 0.0
        if self.kind == "scaled":
            return abs(self.value) * self.parts[0].lipschitz_bound(grid_n)
        if self.kind == "sum":
            return sum(part.lipschitz_bound(grid_n) for part in self.parts)
        inst = self.instance
        grid = np.linspace(0.0, 1.0, grid_n + 1)
        try:
            if self.kind == "weight_log":
                ratios = [inst.weight_derivative(i, grid) / inst.weight(i, grid) for i in range(inst.k)]
            else:
                ratios = [inst.second_derivative(i, grid) / inst.derivative(i, grid) for i in range(inst.k)]
        except IFSError:
            return math.inf
        return float(max(np.max(np.abs(r)) for r in ratios))


def eval_potential(phi, w):
    """قيمة الجهد عند الكلمة: دقيقة للدورية، ومقتطعة للمنتهية"""
    inst = phi.instance
    inst.require("contraction")
    w.check(inst.k)
    symbols = np.array(w.symbols) - 1
    if w.periodic:
        tail = periodic_points(inst, np.array(w.rotated().symbols)[None, :] - 1)[0]
    else:
        tail = _project_tail(inst, symbols[1:])
    return float(phi.local(symbols[:1], np.array([tail]))[0])


def potential_truncation_bound(phi, w):
    """حد خطأ تقييم الجهد على كلمة منتهية: Lip(F)·a^(len−1)؛ صفر للدورية"""
    if w.periodic:
        return 0.0
    a = max(phi.instance.report.lipschitz)
    return phi.lipschitz_bound() * a ** (len(w) - 1)


# ==================== 4. الضغط ====================

@dataclass(frozen=True)
class PressureEstimate:
    """gap: الفرق عن العمق السابق، None عند العمق 1"""

    value: float
    method: str
    depth: int
    gap: float = None
    iterations: int = None


def _birkhoff_sums(phi, words):
    """
    مجموع Birkhoff على المدار الدوري لكل كلمة:
    Σ_j F(w_j, z_{j+1}) حيث z_j = π(σ^j w^∞) و z_j = T_{w_j}(z_{j+1})
    """
    inst = phi.instance
    m = words.shape[1]
    z = periodic_points(inst, words)
    total = phi.local(words[:, m - 1], z)
    for j in range(m - 1, 0, -1):
        z = inst.apply_symbols(words[:, j], z)
        total = total + phi.local(words[:, j - 1], z)
    return total


def _periodic_value(phi, n, atom_budget):
    _check_budget(phi.k, n, atom_budget)
    sums = _birkhoff_sums(phi, all_words(phi.k, n))
    return float(logsumexp(sums)) / n


def pressure_periodic(phi, n, atom_budget=ATOM_BUDGET):
    """(1/n)·log Σ_{σ^n x = x} exp(S_n φ(x)) مع الفجوة إلى n−1"""
    n = validate_count(n, "n")
    phi.instance.require("contraction")
    value = _periodic_value(phi, n, atom_budget)
    gap = abs(value - _periodic_value(phi, n - 1, atom_budget)) if n >= 2 else None
    logger.info("✅ الضغط الدوري n=%d: %.12g (الفجوة %s)", n, value, gap)
    return PressureEstimate(value, "periodic", n, gap)


def transfer_matrix(phi, depth):
    """
    مصفوفة مؤثر النقل على الكلمات بطول depth: الحالة u تنتقل إلى v = (i, u_0..u_{D−2})
    بالقيمة exp(φ) مقيّماً عند الامتداد الدوري لـ i متبوعاً بـ u.
    """
    inst = phi.instance
    k = inst.k
    size = k ** depth
    points = periodic_points(inst, all_words(k, depth))
    rows = np.tile(np.arange(size), k)
    symbols = np.repeat(np.arange(k), size)
    cols = symbols * k ** (depth - 1) + rows // k
    data = np.exp(phi.local(symbols, np.tile(points, k)))
    return sparse.csr_matrix((data, (rows, cols)), shape=(size, size))


def leading_eigen(matrix, iters=POWER_ITERS, tol=POWER_TOL):
    """
    تكرار القوة من المتجه الثابت 1 مع حصر Collatz–Wielandt:
    min(My/y) ≤ ρ ≤ max(My/y)، والتوقف عند عرض نسبي ≤ tol.
    """
    vector = np.ones(matrix.shape[0])
    for iteration in range(1, iters + 1):
        image = matrix @ vector
        ratio = image / vector
        lo, hi = float(ratio.min()), float(ratio.max())
        vector = image / image.max()
        logger.debug("تكرار القوة %d: [%.17g, %.17g]", iteration, lo, hi)
        if hi - lo <= tol * hi:
            return (lo + hi) / 2.0, vector, iteration
    raise ConvergenceError(f"power iteration did not reach tolerance {tol} in {iters} iterations")


def _transfer_value(phi, depth, iters, tol, atom_budget=ATOM_BUDGET):
    _check_budget(phi.k, depth, atom_budget)
    rho, _, iterations = leading_eigen(transfer_matrix(phi, depth), iters, tol)
    return math.log(rho), iterations


def pressure_transfer(phi, depth=TRANSFER_DEPTH, iters=POWER_ITERS, tol=POWER_TOL):
    """log للقيمة الذاتية الرائدة لمصفوفة النقل، مع الفجوة إلى العمق depth−1"""
    depth = validate_count(depth, "depth")
    phi.instance.require("contraction")
    value, iterations = _transfer_value(phi, depth, iters, tol)
    gap = abs(value - _transfer_value(phi, depth - 1, iters, tol)[0]) if depth >= 2 else None
    logger.info("✅ ضغط النقل بعمق %d: %.12g (%d تكرار)", depth, value, iterations)
    return PressureEstimate(value, "transfer", depth, gap, iterations)


def pressure_value(phi, method="transfer", depth=TRANSFER_DEPTH, tol=POWER_TOL):
    """القيمة فقط، دون حساب الفجوة"""
    phi.instance.require("contraction")
    if method == "transfer":
        return _transfer_value(phi, depth, POWER_ITERS, tol)[0]
    if method == "periodic":
        return _periodic_value(phi, depth, ATOM_BUDGET)
    raise IFSError(f"unknown pressure method {method!r}")


# ==================== 5. قياسات Gibbs ====================

def cylinder_weights(inst, n, atom_budget=ATOM_BUDGET):
    """
    أوزان الأسطوانات بطول n بترتيب معجمي: g_{i1}(T_{i2}⋯T_{in}x0)⋯g_{in}(x0)
    بنقطة مرجعية واحدة x0 = π(1^∞) حتى تتداخل الجداءات وتجمع إلى 1.
    """
    inst.require("normalization", "contraction")
    x0 = project(inst, SymbolWord((1,), periodic=True))
    _, weights = expand(inst, x0, n, atom_budget)
    return weights


def gibbs_cylinder(inst, n, atom_budget=ATOM_BUDGET):
    """خريطة كلمة ← وزن لكل الكلمات بطول n"""
    n = validate_count(n, "n")
    weights = cylinder_weights(inst, n, atom_budget)
    words = all_words(inst.k, n) + 1
    return {SymbolWord(tuple(word)): float(w) for word, w in zip(words.tolist(), weights)}


def eigen_gibbs_weights(phi, n, iters=POWER_ITERS, tol=POWER_TOL):
    """قياس Gibbs لجهد عام: ν[u] ∝ ℓ_u·h_u من المتجهين الذاتيين الأيسر والأيمن"""
    _check_budget(phi.k, n, ATOM_BUDGET)
    matrix = transfer_matrix(phi, n)
    rho, right, _ = leading_eigen(matrix, iters, tol)
    _, left, _ = leading_eigen(matrix.T.tocsr(), iters, tol)
    weights = left * right
    return weights / weights.sum(), math.log(rho)


def _rotated_points(inst, n):
    """π(σ(w^∞)) لكل كلمة بطول n بالترتيب المعجمي"""
    k = inst.k
    words = all_words(k, n)
    points = periodic_points(inst, words)
    index = np.arange(k ** n)
    rotated = (index % k ** (n - 1)) * k + words[:, 0]
    return words, points[rotated]


def gibbs_integral(inst, phi, n, base=None):
    """
    Σ_w ν[w]·φ(w^∞) حيث ν أوزان أسطوانات Gibbs للجهد base
    (الجهد المطبّع log g افتراضياً، وإلا من بيانات مؤثر النقل).
    """
    n = validate_count(n, "n")
    if base is None or base.is_normalized_weight:
        weights = cylinder_weights(inst, n)
    else:
        inst.require("contraction")
        weights, _ = eigen_gibbs_weights(base, n)
    words, tails = _rotated_points(inst, n)
    values = phi.local(words[:, 0], tails)
    return float(np.sum(weights * values))


def gibbs_pushforward(inst, f, n):
    """Σ_w ν[w]·f(π(w^∞)): تكامل f∘π بالنسبة لأسطوانات Gibbs للجهد المطبّع"""
    n = validate_count(n, "n")
    weights = cylinder_weights(inst, n)
    points = periodic_points(inst, all_words(inst.k, n))
    return float(np.sum(weights * f.evaluate(points, inst.lam)))


def gibbs_entropy(phi, n):
    """h = P(φ) − ∫φ dν_φ (المبدأ التغايري) على العمق n"""
    inst = phi.instance
    weights, pressure = eigen_gibbs_weights(phi, n)
    words, tails = _rotated_points(inst, n)
    return pressure - float(np.sum(weights * phi.local(words[:, 0], tails))), weights


def pressure_derivative_check(inst, phi, psi, h=1e-4, n=TRANSFER_DEPTH):
    """
    (fd, gibbs): الفرق المركزي لـ t ↦ P(φ + tψ) عند 0، وتكامل ψ بالنسبة لقياس Gibbs للجهد φ
    """
    h = validate_finite(h, "h")
    plus = pressure_value(phi + Potential.scaled(h, psi), "transfer", n)
    minus = pressure_value(phi + Potential.scaled(-h, psi), "transfer", n)
    fd = (plus - minus) / (2.0 * h)
    gibbs = gibbs_integral(inst, psi, n, base=phi)
    logger.info("✅ مشتقة الضغط: فرق منته %.10g، تكامل Gibbs %.10g", fd, gibbs)
    return fd, gibbs


def pressure_second_derivative(phi, psi, h=1e-3, depth=TRANSFER_DEPTH):
    """الفرق المركزي الثاني لـ t ↦ P(φ + tψ) عند 0"""
    h = validate_finite(h, "h")
    center = pressure_value(phi, "transfer", depth)
    plus = pressure_value(phi + Potential.scaled(h, psi), "transfer", depth)
    minus = pressure_value(phi + Potential.scaled(-h, psi), "transfer", depth)
    return (plus - 2.0 * center + minus) / (h * h)
