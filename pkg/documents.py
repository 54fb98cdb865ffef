#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
مستندات الإعداد
===============
ConfigDocument: وصف JSON لنظام IFS (الخرائط والأوزان كنصوص تعابير) مع قيم المحرك
الافتراضية وإعدادات المسح ومسار المخرجات. الأنظمة الجاهزة (presets) مخزنة
كمستندات بنفس الصيغة حتى يمكن تصديرها بـ --emit-config وتعديلها.
"""

import copy
import json
import logging
from dataclasses import dataclass

from config import (
    BOWEN_TOL,
    CYLINDER_DEPTH,
    DEFAULT_BURN_IN,
    DEFAULT_DEPTH,
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    SWEEP_POINTS,
    TRANSFER_DEPTH,
)
from errors import ConfigError, ExpressionSyntaxError, IFSError
from ifs_core import FamilySpec, bind

logger = logging.getLogger(__name__)

DEFAULT_ENGINE = {
    "lambda": None,
    "theta": None,
    "engine": "depth",
    "depth": DEFAULT_DEPTH,
    "samples": DEFAULT_SAMPLES,
    "burn_in": DEFAULT_BURN_IN,
    "seed": DEFAULT_SEED,
    "method": "transfer",
    "transfer_depth": TRANSFER_DEPTH,
    "cylinder_depth": CYLINDER_DEPTH,
    "tol": BOWEN_TOL,
    "x0": 0.0,
}

DEFAULT_SWEEP = {
    "parameter": "lambda",
    "lo": None,
    "hi": None,
    "points": SWEEP_POINTS,
    "quantity": "integral",
    "integrand": "x",
    "potential": "weight_log",
    "scale": 1.0,
    "probe": None,
    "order": 2,
}

SECTIONS = ("name", "system", "engine", "sweep", "output")


# ==================== 1. الأنظمة الجاهزة ====================

def _example_document(name, n):
    """عائلة λx + φ(λ−1/4, n) بأوزان قطعية متقطعة عند 1/2 ودالة اختبار قطعية"""
    window = [1.0 / 6.0, 1.0 / 3.0]
    return {
        "name": name,
        "system": {
            "maps": [f"p*x + phi(p - 0.25, {n}) + 0.01", f"p*x + 2/3 + phi(p - 0.25, {n})"],
            "weights": [
                {"breakpoints": [0.5], "pieces": ["p", "1 - p"]},
                {"breakpoints": [0.5], "pieces": ["1 - p", "p"]},
            ],
            "lambda_range": list(window),
            "theta_range": list(window),
        },
        "engine": {"lambda": 0.25, "theta": 0.25},
        "sweep": {
            "parameter": "tied",
            "lo": window[0],
            "hi": window[1],
            "points": 65,
            "quantity": "integral",
            "integrand": {"breakpoints": [0.5], "pieces": ["-x", "x*x"]},
            "probe": 0.25,
            "order": 2,
        },
    }


PRESET_DOCUMENTS = {
    "simple_4_1": {
        "name": "simple_4_1",
        "system": {
            "maps": ["p*x", "p*x + p"],
            "weights": ["p", "1 - p"],
            "lambda_range": [0.05, 0.5],
            "theta_range": [0.01, 0.99],
        },
        "engine": {"lambda": 0.5, "theta": 0.5},
        "sweep": {"parameter": "theta", "lo": 0.1, "hi": 0.9, "points": 9,
                  "quantity": "integral", "integrand": "x", "probe": 0.5, "order": 1},
    },
    # النسبة a = 1/3 + λ، فالقيمة λ = 0 تعطي مجموعة كانتور الثلاثية
    "cantor": {
        "name": "cantor",
        "system": {
            "maps": ["(1/3 + p)*x", "(1/3 + p)*x + 2/3 - p"],
            "weights": ["p", "1 - p"],
            "lambda_range": [0.05 - 1.0 / 3.0, 0.49 - 1.0 / 3.0],
            "theta_range": [0.01, 0.99],
        },
        "engine": {"lambda": 0.0, "theta": 0.5},
        "sweep": {"parameter": "lambda", "lo": 0.2 - 1.0 / 3.0, "hi": 0.45 - 1.0 / 3.0, "points": 31,
                  "quantity": "bowen_dimension", "probe": 0.0, "order": 1},
    },
    "ex_4_3": _example_document("ex_4_3", 3),
    "ex_4_4": _example_document("ex_4_4", 1),
}


# ==================== 2. المستند ====================

def _merged(defaults, given, section):
    if given is None:
        return dict(defaults)
    if not isinstance(given, dict):
        raise ConfigError(f"section '{section}' must be an object")
    unknown = set(given) - set(defaults)
    if unknown:
        raise ConfigError(f"unknown keys in '{section}': {sorted(unknown)}")
    merged = dict(defaults)
    merged.update(given)
    return merged


def _midpoint(declared, fallback):
    if declared is None:
        return fallback
    return 0.5 * (declared[0] + declared[1])


@dataclass(frozen=True)
class ConfigDocument:
    name: str
    family: FamilySpec
    engine: dict
    sweep: dict
    output: str = "-"

    @classmethod
    def from_dict(cls, document):
        if not isinstance(document, dict):
            raise ConfigError("config document must be a JSON object")
        unknown = set(document) - set(SECTIONS)
        if unknown:
            raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
        system = document.get("system")
        if not isinstance(system, dict) or "maps" not in system or "weights" not in system:
            raise ConfigError("config needs a 'system' object with 'maps' and 'weights'")
        name = str(document.get("name", "custom"))
        try:
            family = FamilySpec.from_strings(
                system["maps"],
                system["weights"],
                lambda_range=system.get("lambda_range"),
                theta_range=system.get("theta_range"),
                name=name,
            )
        except ExpressionSyntaxError:
            raise
        except (IFSError, TypeError) as exc:
            raise ConfigError(f"invalid system: {exc}") from exc
        engine = _merged(DEFAULT_ENGINE, document.get("engine"), "engine")
        if engine["lambda"] is None:
            engine["lambda"] = _midpoint(family.lambda_range, 0.5)
        if engine["theta"] is None:
            engine["theta"] = _midpoint(family.theta_range, 0.5)
        sweep = _merged(DEFAULT_SWEEP, document.get("sweep"), "sweep")

        # ربط تجريبي عند منتصف المجالات
        bind(family, _midpoint(family.lambda_range, engine["lambda"]),
             _midpoint(family.theta_range, engine["theta"]))
        return cls(name=name, family=family, engine=engine, sweep=sweep,
                   output=str(document.get("output", "-")))

    @classmethod
    def load(cls, path):
        try:
            with open(path, encoding="utf-8") as handle:
                document = json.load(handle)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        logger.info("✅ تحميل الإعداد من %s", path)
        return cls.from_dict(document)

    def to_dict(self):
        sweep = dict(self.sweep)
        return {
            "name": self.name,
            "system": self.family.to_document(),
            "engine": dict(self.engine),
            "sweep": sweep,
            "output": self.output,
        }

    def with_overrides(self, engine=None, sweep=None, output=None):
        """نسخة جديدة بقيم تتجاوز المستند (القيم None تُتجاهل)"""
        new_engine = dict(self.engine)
        new_engine.update({k: v for k, v in (engine or {}).items() if v is not None})
        new_sweep = dict(self.sweep)
        new_sweep.update({k: v for k, v in (sweep or {}).items() if v is not None})
        unknown = (set(new_engine) - set(DEFAULT_ENGINE)) | (set(new_sweep) - set(DEFAULT_SWEEP))
        if unknown:
            raise ConfigError(f"unknown override keys: {sorted(unknown)}")
        return ConfigDocument(self.name, self.family, new_engine, new_sweep,
                              output if output is not None else self.output)

    def bind(self):
        return bind(self.family, self.engine["lambda"], self.engine["theta"])


def preset_names():
    return sorted(PRESET_DOCUMENTS)


def load_preset(name):
    if name not in PRESET_DOCUMENTS:
        raise ConfigError(f"unknown preset {name!r}; choose one of {preset_names()}")
    return ConfigDocument.from_dict(copy.deepcopy(PRESET_DOCUMENTS[name]))
