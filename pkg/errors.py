#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
الأخطاء
=======
تسلسل الاستثناءات المشترك. كل صنف يحمل exit_code الذي تستخدمه واجهة الأوامر:
2 لأخطاء الصياغة والربط، و1 لإخفاقات المجال.
"""


class IFSError(ValueError):
    """الأصل المشترك لكل أخطاء المكتبة"""

    exit_code = 1


# === أخطاء الصياغة والإعداد (exit 2) ===

class ExpressionSyntaxError(IFSError):
    """تعبير غير صالح نحوياً، مع موضع الخطأ"""

    exit_code = 2

    def __init__(self, message, position, source=""):
        self.position = position
        self.source = source
        super().__init__(f"{message} at offset {position}: {source!r}")


class UnknownIdentifierError(ExpressionSyntaxError):
    """معرّف غير x أو p أو دالة معروفة"""


class ConfigError(IFSError):
    exit_code = 2


class ParameterRangeError(IFSError):
    """قيمة λ أو θ خارج المجال المعلن"""

    exit_code = 2


# === أخطاء التقييم ===

class ExpressionDomainError(IFSError):
    """قسمة على صفر، لوغاريتم لقيمة غير موجبة، أو نتيجة غير منتهية"""


class EvaluationError(IFSError):
    """فشل تقييم خريطة أو وزن لفرع معين عند نقطة معينة"""

    def __init__(self, message, branch=None, x=None):
        self.branch = branch
        self.x = x
        where = []
        if branch is not None:
            where.append(f"branch={branch}")
        if x is not None:
            where.append(f"x={x!r}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(f"{message}{suffix}")


class ValidationFailure(IFSError):
    """فرضية مطلوبة للعملية لم تتحقق"""

    def __init__(self, verdict, report=None, message=None):
        self.verdict = verdict
        self.report = report
        super().__init__(message or f"hypothesis '{verdict}' does not hold for this instance")


# === أخطاء الحساب ===

class AtomBudgetError(IFSError):
    pass


class ProjectionError(IFSError):
    pass


class ConvergenceError(IFSError):
    pass


class BracketError(IFSError):
    pass


class NoiseFloorError(IFSError):
    """لا يمكن ضمان أن ضجيج التقييم أقل من مقياس الفروق المنتهية"""
