#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
واجهة سطر الأوامر
=================
الأوامر: validate, measure, cylinders, integrate, pressure, dimension, sweep, diagnose

المخرجات CSV مع أسطر بيانات وصفية تبدأ بـ #، على stdout (--out -) أو في ملف.
رموز الخروج: 0 نجاح، 1 فشل في المجال (تحقق، تقارب، جذر)، 2 خطأ في الاستخدام أو الصياغة.
"""

import argparse
import json
import logging
import sys

from config import THREADS
from documents import ConfigDocument, load_preset, preset_names
from errors import ConfigError, IFSError
from extensions import VERSION, init_logging
from services import AnalysisService, SweepService
from sweep import ENGINES, METHODS
from utils import write_table

logger = logging.getLogger(__name__)

COMMANDS = {
    "validate": "فحص فرضيات النظام عند (λ, θ)",
    "measure": "القياس الثابت كذرات position,weight",
    "cylinders": "أوزان أسطوانات Gibbs word,weight",
    "integrate": "∫f dμ بمحرك العمق أو لعبة الفوضى",
    "pressure": "الضغط P(scale·φ)",
    "dimension": "جذر Bowen وبعد القياس",
    "sweep": "جدول param ↦ F(param) على شبكة",
    "diagnose": "تشخيص نعومة F عند نقطة فحص",
}

# المعاملات الخاصة ببعض الأوامر فقط
SWEEP_COMMANDS = ("sweep", "diagnose")
POTENTIAL_COMMANDS = ("pressure", "sweep", "diagnose")
INTEGRAND_COMMANDS = ("integrate", "sweep", "diagnose")
SWEEP_QUANTITIES = ("integral", "pressure", "bowen_dimension", "measure_dimension")


# ==================== 1. المحلل ====================

def _common_parser():
    common = argparse.ArgumentParser(add_help=False)
    source = common.add_mutually_exclusive_group()
    source.add_argument("--config", metavar="PATH", help="مستند إعداد JSON")
    source.add_argument("--preset", choices=preset_names(), help="نظام جاهز")
    common.add_argument("--lambda", dest="lam", type=float, metavar="R")
    common.add_argument("--theta", type=float, metavar="R")
    common.add_argument("--seed", type=int, metavar="U64")
    common.add_argument("--depth", type=int, metavar="N",
                        help="عمق التوسيع أو مصفوفة النقل أو الأسطوانات حسب الأمر")
    common.add_argument("--samples", type=int, metavar="N")
    common.add_argument("--method", choices=ENGINES + METHODS,
                        help="depth/chaos تختار محرك القياس، transfer/periodic طريقة الضغط")
    common.add_argument("--engine", choices=ENGINES)
    common.add_argument("--tol", type=float, metavar="R")
    common.add_argument("--out", metavar="PATH", help="- للمخرج القياسي")
    common.add_argument("--threads", type=int, default=THREADS, metavar="N")
    common.add_argument("--emit-config", action="store_true",
                        help="طباعة مستند الإعداد الفعلي والخروج")
    common.add_argument("--no-timestamp", action="store_true",
                        help="حذف سطر الطابع الزمني من البيانات الوصفية")
    common.add_argument("--log-level", choices=("DEBUG", "INFO", "WARNING", "ERROR"))
    return common


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ifs-thermo",
        description="القياسات الثابتة والضغط والبعد لأنظمة الدوال المكررة على [0,1]",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {VERSION}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    common = _common_parser()
    for name, help_text in COMMANDS.items():
        sub = subparsers.add_parser(name, parents=[common], help=help_text)
        if name in INTEGRAND_COMMANDS:
            sub.add_argument("--f", dest="f", metavar="EXPR", help="دالة الاختبار")
        if name in POTENTIAL_COMMANDS:
            sub.add_argument("--potential", choices=("weight_log", "derivative_log"))
            sub.add_argument("--scale", type=float, metavar="R")
        if name in SWEEP_COMMANDS:
            sub.add_argument("--parameter", choices=("lambda", "theta", "tied"))
            sub.add_argument("--quantity", choices=SWEEP_QUANTITIES)
            sub.add_argument("--lo", type=float, metavar="R")
            sub.add_argument("--hi", type=float, metavar="R")
            sub.add_argument("--points", type=int, metavar="N")
            sub.add_argument("--probe", type=float, metavar="R")
            sub.add_argument("--order", type=int, choices=(1, 2, 3))
    return parser


# ==================== 2. المستند الفعلي ====================

def _load_document(args):
    if args.config:
        return ConfigDocument.load(args.config)
    if args.preset:
        return load_preset(args.preset)
    raise ConfigError("one of --config or --preset is required")


def _depth_key(command, sweep):
    """أي عمق يضبطه --depth"""
    if command == "cylinders":
        return "cylinder_depth"
    if command in ("pressure", "dimension"):
        return "transfer_depth"
    if command in SWEEP_COMMANDS:
        quantity = sweep["quantity"]
        if quantity == "measure_dimension":
            return "cylinder_depth"
        if quantity in ("bowen_dimension", "pressure"):
            return "transfer_depth"
    return "depth"


def effective_document(args):
    """المستند بعد تطبيق خيارات سطر الأوامر"""
    document = _load_document(args)
    sweep = {}
    if args.command in INTEGRAND_COMMANDS:
        sweep["integrand"] = args.f
    if args.command in POTENTIAL_COMMANDS:
        sweep.update(potential=args.potential, scale=args.scale)
    if args.command in SWEEP_COMMANDS:
        sweep.update(parameter=args.parameter, quantity=args.quantity, lo=args.lo, hi=args.hi,
                     points=args.points, probe=args.probe, order=args.order)
    document = document.with_overrides(sweep=sweep)

    engine = {
        "lambda": args.lam,
        "theta": args.theta,
        "seed": args.seed,
        "samples": args.samples,
        "tol": args.tol,
        "engine": args.engine,
    }
    if args.method in ENGINES:
        engine["engine"] = args.method
    elif args.method in METHODS:
        engine["method"] = args.method
    if args.depth is not None:
        engine[_depth_key(args.command, document.sweep)] = args.depth
    return document.with_overrides(engine=engine, output=args.out)


# ==================== 3. الأوامر ====================

def _emit_table(table, out, with_timestamp):
    if out == "-":
        write_table(sys.stdout, table.header, table.rows, table.metadata, with_timestamp)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="") as handle:
            write_table(handle, table.header, table.rows, table.metadata, with_timestamp)
    except OSError as exc:
        raise ConfigError(f"cannot write {out}: {exc}") from exc
    logger.info("✅ كتابة %d صف في %s", len(table.rows), out)


def _emit_text(text, out):
    if out == "-":
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    except OSError as exc:
        raise ConfigError(f"cannot write {out}: {exc}") from exc


def run(args):
    """تنفيذ الأمر وإرجاع رمز الخروج (الاستثناءات تُترك للمستدعي)"""
    document = effective_document(args)
    out = document.output

    if args.emit_config:
        _emit_text(json.dumps(document.to_dict(), indent=2, ensure_ascii=False) + "\n", out)
        return 0

    if args.command == "validate":
        report = AnalysisService(document).validate()
        _emit_text("".join(line + "\n" for line in report.lines()), out)
        if not report.passed:
            logger.warning("⚠️ فشل التحقق: %s",
                           ", ".join(name for name, ok in report.verdicts().items() if not ok))
        return 0 if report.passed else 1

    if args.command in SWEEP_COMMANDS:
        service = SweepService(document)
        if args.command == "sweep":
            table = service.sweep(args.threads)
        else:
            table, _ = service.diagnose()
    else:
        service = AnalysisService(document)
        if args.command == "measure":
            table = service.measure()
        elif args.command == "cylinders":
            table = service.cylinders()
        elif args.command == "integrate":
            table = service.integrate()
        elif args.command == "pressure":
            table = service.pressure(document.sweep["potential"], float(document.sweep["scale"]))
        else:
            table = service.dimension()

    _emit_table(table, out, not args.no_timestamp)
    return 0


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2

    init_logging(args.log_level)
    try:
        return run(args)
    except IFSError as exc:
        logger.debug("تفاصيل الخطأ", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
