#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
أدوات مساعدة
=============
دوال عامة: التحقق من المدخلات العددية، تنسيق CSV، وترويسة البيانات الوصفية
"""

import csv
import datetime
import hashlib
import json
import math

from errors import IFSError


# === دوال التحقق من المدخلات ===
def validate_count(value, name, minimum=1):
    """التحقق من عدد صحيح لا يقل عن الحد الأدنى"""
    if isinstance(value, bool) or int(value) != value or value < minimum:
        raise IFSError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def validate_finite(value, name):
    """التحقق من عدد حقيقي منتهٍ"""
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise IFSError(f"{name} must be a real number, got {value!r}") from None
    if not math.isfinite(value):
        raise IFSError(f"{name} must be finite, got {value!r}")
    return value


def validate_unit_point(value, name="x0"):
    """التحقق من نقطة داخل [0,1]"""
    value = validate_finite(value, name)
    if not 0.0 <= value <= 1.0:
        raise IFSError(f"{name} must lie in [0,1], got {value!r}")
    return value


# === تنسيق الأرقام ===
def format_float(value):
    """17 رقماً معنوياً، يكفي لإعادة القراءة بدقة تامة"""
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    return format(float(value), ".17g")


def format_cell(value):
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    return format_float(value)


# === البيانات الوصفية ===
def config_fingerprint(document):
    """بصمة sha256 للمستند بصيغة JSON مرتبة المفاتيح"""
    canonical = json.dumps(document, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def metadata_lines(metadata, with_timestamp=True):
    """أسطر # key=value تسبق ترويسة CSV"""
    lines = [f"# {key}={format_cell(value)}" for key, value in metadata.items()]
    if with_timestamp:
        stamp = datetime.datetime.now(datetime.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
        lines.append(f"# timestamp={stamp}")
    return lines


def write_table(stream, header, rows, metadata=None, with_timestamp=True):
    """كتابة الجدول: البيانات الوصفية ثم الترويسة ثم الصفوف"""
    for line in metadata_lines(metadata or {}, with_timestamp):
        stream.write(line + "\n")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(cell) for cell in row])
