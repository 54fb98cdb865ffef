#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
لغة التعابير
============
شجرة تعابير (AST) في المتغيرين x و p تصف الخرائط T_i والأوزان g_i لعائلة IFS.

القواعد:
    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := number | 'x' | 'p' | func '(' args ')' | '(' expr ')' | '-' factor
    func   ∈ {sin, cos, exp, log, abs, sign, pow, phi, dphi}

- pow(e, k) مع عدد صحيح حرفي k (قد يكون سالباً)
- phi(u, n) = u^(n+1)·sin(1/u) مع phi(0, n) = 0، و dphi مشتقتها بالنسبة إلى u
- الأرقام عشرية مع أس اختياري (1e-3) حتى يُعاد تحليل كل ما تطبعه الطابعة حرفياً

كل عقدة تعرف: الطباعة، الاشتقاق البنيوي بالنسبة إلى x، والترجمة إلى دالة numpy
بعد تثبيت p. التقييم يرفع ExpressionDomainError بدل إنتاج nan أو inf.
"""

import logging
import math
import operator
import re
from collections import namedtuple
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from errors import ExpressionDomainError, ExpressionSyntaxError, IFSError, UnknownIdentifierError

logger = logging.getLogger(__name__)

# تحت هذا الحد تُعامل phi ومشتقتها كصفر لتجنب فيضان 1/u
PHI_ZERO = 1e-300

# مستويات الأولوية للطابعة
ADDITIVE, MULTIPLICATIVE, UNARY, ATOM = 1, 2, 3, 4

UNARY_FUNCTIONS = ("sin", "cos", "exp", "log", "abs", "sign")
FUNCTIONS = UNARY_FUNCTIONS + ("pow", "phi", "dphi")


# ==================== 1. الدوال العددية المحمية ====================

def _checked_div(a, b):
    if np.ndim(b) == 0:
        if b == 0:
            raise ExpressionDomainError("division by zero")
    elif np.any(b == 0):
        raise ExpressionDomainError("division by zero")
    return a / b


def _checked_log(a):
    if np.any(np.asarray(a) <= 0):
        raise ExpressionDomainError("log of a non-positive value")
    return np.log(a)


def _checked_exp(a):
    with np.errstate(over="ignore"):
        result = np.exp(a)
    if not np.all(np.isfinite(result)):
        raise ExpressionDomainError("exp overflow")
    return result


def _checked_pow(a, k):
    if k < 0 and np.any(np.asarray(a) == 0):
        raise ExpressionDomainError("zero raised to a negative power")
    with np.errstate(over="ignore"):
        result = np.power(np.asarray(a, dtype=float), k)
    if not np.all(np.isfinite(result)):
        raise ExpressionDomainError("pow overflow")
    return result[()]


def phi(u, n):
    """phi(u, n) = u^(n+1)·sin(1/u)، وتساوي 0 عند |u| < PHI_ZERO"""
    u = np.asarray(u, dtype=float)
    tiny = np.abs(u) < PHI_ZERO
    safe = np.where(tiny, 1.0, u)
    value = safe ** (n + 1) * np.sin(1.0 / safe)
    return np.where(tiny, 0.0, value)[()]


def dphi(u, n):
    """مشتقة phi بالنسبة إلى u: (n+1)u^n sin(1/u) - u^(n-1) cos(1/u)، و0 عند الصفر"""
    u = np.asarray(u, dtype=float)
    tiny = np.abs(u) < PHI_ZERO
    safe = np.where(tiny, 1.0, u)
    inverse = 1.0 / safe
    value = (n + 1) * safe ** n * np.sin(inverse) - safe ** (n - 1) * np.cos(inverse)
    return np.where(tiny, 0.0, value)[()]


_UNARY_IMPL = {
    "sin": np.sin,
    "cos": np.cos,
    "exp": _checked_exp,
    "log": _checked_log,
    "abs": np.abs,
    "sign": np.sign,
}

_BINARY_IMPL = {
    "+": operator.add,
    "-": operator.sub,
    "*": operator.mul,
    "/": _checked_div,
}


# --- تركيب الدوال المترجمة: الثوابت تُطوى وقت الترجمة ---
def _unary(fn, a):
    if callable(a):
        return lambda x: fn(a(x))
    return fn(a)


def _binary(fn, a, b):
    if callable(a):
        if callable(b):
            return lambda x: fn(a(x), b(x))
        return lambda x: fn(a(x), b)
    if callable(b):
        return lambda x: fn(a, b(x))
    return fn(a, b)


def _constant_function(value):
    value = float(value)

    def constant(x):
        if np.ndim(x) == 0:
            return value
        return np.full(np.shape(x), value)

    return constant


def _identity(x):
    return x


# ==================== 2. عقد الشجرة ====================

class Expr:
    """الصنف الأساسي لعقد التعابير (غير قابلة للتعديل)"""

    precedence = ATOM

    @cached_property
    def depends_on_x(self):
        return any(child.depends_on_x for child in self.children())

    def children(self):
        return ()

    def compile(self, p=0.0):
        """ترجمة التعبير إلى دالة x -> قيمة بعد تثبيت p"""
        code = self._build(float(p))
        if callable(code):
            return code
        return _constant_function(code)

    def evaluate(self, x, p=0.0):
        with np.errstate(invalid="ignore"):
            value = self.compile(p)(x)
        if not np.all(np.isfinite(value)):
            raise ExpressionDomainError(f"non-finite value of {self}")
        return value

    def diff_x(self):
        return diff_x(self)

    def _build(self, p):
        raise NotImplementedError

    def _diff(self):
        raise NotImplementedError


@dataclass(frozen=True)
class Number(Expr):
    value: float

    @property
    def precedence(self):
        return UNARY if self.value < 0 else ATOM

    @cached_property
    def depends_on_x(self):
        return False

    def _build(self, p):
        return self.value

    def __str__(self):
        v = self.value
        if v.is_integer() and abs(v) < 1e15:
            return str(int(v))
        return repr(v)


@dataclass(frozen=True)
class Variable(Expr):
    name: str

    @cached_property
    def depends_on_x(self):
        return self.name == "x"

    def _build(self, p):
        return _identity if self.name == "x" else p

    def _diff(self):
        return ONE

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class BinaryOp(Expr):
    op: str
    left: Expr
    right: Expr

    @property
    def precedence(self):
        return ADDITIVE if self.op in "+-" else MULTIPLICATIVE

    def children(self):
        return (self.left, self.right)

    def _build(self, p):
        return _binary(_BINARY_IMPL[self.op], self.left._build(p), self.right._build(p))

    def _diff(self):
        dl, dr = diff_x(self.left), diff_x(self.right)
        if self.op == "+":
            return add(dl, dr)
        if self.op == "-":
            return sub(dl, dr)
        if self.op == "*":
            return add(mul(dl, self.right), mul(self.left, dr))
        if _is_zero(dr):
            return div(dl, self.right)
        return div(sub(mul(dl, self.right), mul(self.left, dr)), power(self.right, 2))

    def __str__(self):
        left, right = str(self.left), str(self.right)
        if self.left.precedence < self.precedence:
            left = f"({left})"
        # الطرف الأيمن بين أقواس عند تساوي الأولوية حتى يبقى ترتيب العمليات كما هو
        if self.right.precedence <= self.precedence:
            right = f"({right})"
        return f"{left} {self.op} {right}"


@dataclass(frozen=True)
class Negate(Expr):
    operand: Expr

    precedence = UNARY

    def children(self):
        return (self.operand,)

    def _build(self, p):
        return _unary(operator.neg, self.operand._build(p))

    def _diff(self):
        return neg(diff_x(self.operand))

    def __str__(self):
        inner = str(self.operand)
        if self.operand.precedence < UNARY:
            inner = f"({inner})"
        return f"-{inner}"


@dataclass(frozen=True)
class Function(Expr):
    name: str
    arg: Expr

    def children(self):
        return (self.arg,)

    def _build(self, p):
        return _unary(_UNARY_IMPL[self.name], self.arg._build(p))

    def _diff(self):
        da = diff_x(self.arg)
        if self.name == "sin":
            return mul(Function("cos", self.arg), da)
        if self.name == "cos":
            return neg(mul(Function("sin", self.arg), da))
        if self.name == "exp":
            return mul(self, da)
        if self.name == "log":
            return div(da, self.arg)
        if self.name == "abs":
            return mul(Function("sign", self.arg), da)
        return ZERO  # sign ثابتة قطعياً

    def __str__(self):
        return f"{self.name}({self.arg})"


@dataclass(frozen=True)
class Power(Expr):
    base: Expr
    exponent: int

    def children(self):
        return (self.base,)

    def _build(self, p):
        k = self.exponent
        return _unary(lambda a: _checked_pow(a, k), self.base._build(p))

    def _diff(self):
        k = self.exponent
        if k == 0:
            return ZERO
        return mul(mul(Number(float(k)), power(self.base, k - 1)), diff_x(self.base))

    def __str__(self):
        return f"pow({self.base}, {self.exponent})"


@dataclass(frozen=True)
class Phi(Expr):
    arg: Expr
    n: int

    def children(self):
        return (self.arg,)

    def _build(self, p):
        n = self.n
        return _unary(lambda u: phi(u, n), self.arg._build(p))

    def _diff(self):
        return mul(DPhi(self.arg, self.n), diff_x(self.arg))

    def __str__(self):
        return f"phi({self.arg}, {self.n})"


@dataclass(frozen=True)
class DPhi(Expr):
    arg: Expr
    n: int

    def children(self):
        return (self.arg,)

    def _build(self, p):
        n = self.n
        return _unary(lambda u: dphi(u, n), self.arg._build(p))

    def _diff(self):
        # الصيغة المغلقة؛ غير معرفة عند u=0
        u, n = self.arg, self.n
        inverse = div(ONE, u)
        closed = sub(
            mul(Number(float(n + 1)), mul(power(u, n), Function("sin", inverse))),
            mul(power(u, n - 1), Function("cos", inverse)),
        )
        return diff_x(closed)

    def __str__(self):
        return f"dphi({self.arg}, {self.n})"


ZERO = Number(0.0)
ONE = Number(1.0)


# ==================== 3. البناء مع التبسيط ====================

def _is_zero(e):
    return isinstance(e, Number) and e.value == 0.0


def _is_one(e):
    return isinstance(e, Number) and e.value == 1.0


def _folded(op, a, b):
    """طي ثابتين؛ الناتج غير المنتهي يبقى عقدة حتى تبقى الطباعة قابلة للتحليل"""
    value = _BINARY_IMPL[op](a.value, b.value)
    if math.isfinite(value):
        return Number(value)
    return BinaryOp(op, a, b)


def add(a, b):
    if _is_zero(a):
        return b
    if _is_zero(b):
        return a
    if isinstance(a, Number) and isinstance(b, Number):
        return _folded("+", a, b)
    return BinaryOp("+", a, b)


def sub(a, b):
    if _is_zero(b):
        return a
    if _is_zero(a):
        return neg(b)
    if isinstance(a, Number) and isinstance(b, Number):
        return _folded("-", a, b)
    return BinaryOp("-", a, b)


def mul(a, b):
    if _is_zero(a) or _is_zero(b):
        return ZERO
    if _is_one(a):
        return b
    if _is_one(b):
        return a
    if isinstance(a, Number) and isinstance(b, Number):
        return _folded("*", a, b)
    return BinaryOp("*", a, b)


def div(a, b):
    if _is_zero(a):
        return ZERO
    if _is_one(b):
        return a
    if isinstance(a, Number) and isinstance(b, Number) and b.value != 0.0:
        return _folded("/", a, b)
    return BinaryOp("/", a, b)


def neg(a):
    if isinstance(a, Number):
        return Number(-a.value)
    if isinstance(a, Negate):
        return a.operand
    return Negate(a)


def power(a, k):
    if k == 0:
        return ONE
    if k == 1:
        return a
    return Power(a, k)


def diff_x(e):
    """المشتقة البنيوية بالنسبة إلى x؛ صفر لكل عقدة ثابتة في x"""
    if not e.depends_on_x:
        return ZERO
    return e._diff()


# ==================== 4. المحلل ====================

Token = namedtuple("Token", ["kind", "text", "position"])

_TOKEN_RE = re.compile(
    r"(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/(),])"
)
_INTEGER_RE = re.compile(r"\d+")


def tokenize(source):
    """تقسيم النص إلى رموز مع مواضعها؛ رمز النهاية بعد آخر حرف غير فارغ"""
    tokens = []
    position = 0
    while position < len(source):
        if source[position].isspace():
            position += 1
            continue
        match = _TOKEN_RE.match(source, position)
        if not match:
            raise ExpressionSyntaxError(f"unexpected character {source[position]!r}", position, source)
        tokens.append(Token(match.lastgroup, match.group(), position))
        position = match.end()
    tokens.append(Token("end", "", len(source.rstrip())))
    return tokens


class _Parser:
    def __init__(self, source):
        self.source = source
        self.tokens = tokenize(source)
        self.index = 0

    @property
    def current(self):
        return self.tokens[self.index]

    def advance(self):
        token = self.tokens[self.index]
        self.index += 1
        return token

    def error(self, message, token=None):
        token = token or self.current
        return ExpressionSyntaxError(message, token.position, self.source)

    def expect(self, text):
        if self.current.text != text or self.current.kind == "end":
            raise self.error(f"expected {text!r}")
        return self.advance()

    def parse(self):
        tree = self.expr()
        if self.current.kind != "end":
            raise self.error(f"unexpected token {self.current.text!r}")
        return tree

    def expr(self):
        node = self.term()
        while self.current.kind == "op" and self.current.text in "+-":
            op = self.advance().text
            node = BinaryOp(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.current.kind == "op" and self.current.text in "*/":
            op = self.advance().text
            node = BinaryOp(op, node, self.factor())
        return node

    def factor(self):
        token = self.current
        if token.kind == "number":
            self.advance()
            value = float(token.text)
            if not math.isfinite(value):
                raise self.error("number literal out of range", token)
            return Number(value)
        if token.kind == "name":
            self.advance()
            if token.text in ("x", "p"):
                return Variable(token.text)
            if token.text in FUNCTIONS:
                return self.call(token)
            raise UnknownIdentifierError(f"unknown identifier {token.text!r}", token.position, self.source)
        if token.kind == "op" and token.text == "(":
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        if token.kind == "op" and token.text == "-":
            self.advance()
            return Negate(self.factor())
        if token.kind == "end":
            raise self.error("unexpected end of input")
        raise self.error(f"unexpected token {token.text!r}")

    def call(self, name):
        self.expect("(")
        arg = self.expr()
        if name.text in UNARY_FUNCTIONS:
            self.expect(")")
            return Function(name.text, arg)
        self.expect(",")
        k = self.integer(signed=name.text == "pow")
        self.expect(")")
        if name.text == "pow":
            return Power(arg, k)
        if k < 1:
            raise ExpressionSyntaxError(f"{name.text} order must be >= 1", name.position, self.source)
        return Phi(arg, k) if name.text == "phi" else DPhi(arg, k)

    def integer(self, signed):
        sign = 1
        if signed and self.current.text == "-":
            self.advance()
            sign = -1
        token = self.current
        if token.kind != "number" or not _INTEGER_RE.fullmatch(token.text):
            raise self.error("expected an integer literal")
        self.advance()
        return sign * int(token.text)


def parse_expr(source):
    """تحليل نص إلى شجرة تعبير"""
    if not isinstance(source, str):
        raise IFSError(f"expression source must be text, got {type(source).__name__}")
    return _Parser(source).parse()


# ==================== 5. الدوال المجزأة ====================

@dataclass(frozen=True)
class Piecewise:
    """
    دالة مجزأة: القطعة j تُطبق على [b_(j-1), b_j) والأخيرة مغلقة عند 1.
    النقطة المساوية لنقطة فصل تأخذ القطعة التي على يمينها.
    """

    breakpoints: tuple
    pieces: tuple

    def __post_init__(self):
        if len(self.pieces) != len(self.breakpoints) + 1:
            raise IFSError("piecewise needs exactly one more piece than breakpoints")
        if any(b >= c for b, c in zip(self.breakpoints, self.breakpoints[1:])):
            raise IFSError("piecewise breakpoints must be strictly increasing")

    precedence = ATOM

    @property
    def depends_on_x(self):
        return bool(self.breakpoints) or any(piece.depends_on_x for piece in self.pieces)

    @property
    def is_discontinuous(self):
        return bool(self.breakpoints)

    def compile(self, p=0.0):
        functions = [piece.compile(p) for piece in self.pieces]
        breakpoints = np.asarray(self.breakpoints, dtype=float)

        def piecewise(x):
            if np.ndim(x) == 0:
                return functions[int(np.searchsorted(breakpoints, x, side="right"))](x)
            x = np.asarray(x, dtype=float)
            index = np.searchsorted(breakpoints, x, side="right")
            out = np.empty(x.shape)
            for j, fn in enumerate(functions):
                mask = index == j
                if mask.any():
                    out[mask] = fn(x[mask])
            return out

        return piecewise

    def evaluate(self, x, p=0.0):
        value = self.compile(p)(x)
        if not np.all(np.isfinite(value)):
            raise ExpressionDomainError(f"non-finite value of {self}")
        return value

    def diff_x(self):
        return Piecewise(self.breakpoints, tuple(diff_x(piece) for piece in self.pieces))

    def to_document(self):
        return {"breakpoints": list(self.breakpoints), "pieces": [str(piece) for piece in self.pieces]}

    def __str__(self):
        cuts = ", ".join(repr(b) for b in self.breakpoints)
        return f"piecewise([{cuts}]; {'; '.join(str(piece) for piece in self.pieces)})"


def parse_function(document):
    """نص تعبير، أو كائن {breakpoints, pieces} لدالة مجزأة"""
    if isinstance(document, str):
        return parse_expr(document)
    if isinstance(document, dict) and set(document) == {"breakpoints", "pieces"}:
        breakpoints = tuple(float(b) for b in document["breakpoints"])
        return Piecewise(breakpoints, tuple(parse_expr(piece) for piece in document["pieces"]))
    raise IFSError(f"expected an expression string or a piecewise object, got {document!r}")


def function_to_document(function):
    if isinstance(function, Piecewise):
        return function.to_document()
    return str(function)
