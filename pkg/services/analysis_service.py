#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
خدمة التحليل
============
تحويل مستند الإعداد إلى جداول جاهزة للكتابة: التحقق، القياس، الأسطوانات،
التكامل، الضغط، والبعد
"""

import logging
import math
from collections import namedtuple

from dimension import DIMENSION_HEADER, bowen_root, measure_dimension
from errors import IFSError
from expressions import parse_function
from extensions import RNG_ALGORITHM, VERSION
from measure_engine import chaos_game, depth_n_measure
from sweep import engine_from_document, integral_estimate
from symbolic_thermo import Potential, gibbs_cylinder, pressure_periodic, pressure_transfer
from utils import config_fingerprint

logger = logging.getLogger(__name__)

Table = namedtuple("Table", ["header", "rows", "metadata"])

POTENTIALS = ("weight_log", "derivative_log")


def base_metadata(document, command, **extra):
    """البيانات الوصفية المشتركة لكل المخرجات"""
    engine = document.engine
    metadata = {
        "version": VERSION,
        "command": command,
        "system": document.name,
        "lambda": engine["lambda"],
        "theta": engine["theta"],
        "seed": engine["seed"],
        "rng": RNG_ALGORITHM,
        "config_sha256": config_fingerprint(document.to_dict()),
    }
    metadata.update(extra)
    return metadata


class AnalysisService:
    """خدمة العمليات على نظام واحد مربوط"""

    def __init__(self, document):
        """
        تهيئة الخدمة

        Parameters:
        -----------
        document : ConfigDocument
            المستند بعد تطبيق خيارات سطر الأوامر
        """
        self.document = document
        self.settings = engine_from_document(document.engine)

    def instance(self):
        return self.document.bind()

    def validate(self):
        return self.instance().report

    def measure(self):
        inst = self.instance()
        settings = self.settings
        if settings.engine == "chaos":
            nu = chaos_game(inst, settings.x0, settings.burn_in, settings.samples, settings.seed)
            size = settings.samples
        else:
            nu = depth_n_measure(inst, settings.x0, settings.depth)
            size = settings.depth
        metadata = base_metadata(self.document, "measure", method=settings.engine,
                                 depth_or_samples=size, atoms=len(nu))
        return Table(["position", "weight"], list(nu.rows()), metadata)

    def cylinders(self):
        inst = self.instance()
        depth = self.settings.cylinder_depth
        weights = gibbs_cylinder(inst, depth)
        rows = [[str(word), weight] for word, weight in weights.items()]
        return Table(["word", "weight"], rows, base_metadata(self.document, "cylinders", depth=depth))

    def integrate(self, source=None):
        """تكامل f بالنسبة للقياس الثابت بالمحرك المختار"""
        integrand = parse_function(source if source is not None else self.document.sweep["integrand"])
        inst = self.instance()
        seed = self.settings.seed
        value, err, engine, size = integral_estimate(inst, integrand, self.settings, seed)
        metadata = base_metadata(self.document, "integrate", method=engine, integrand=str(integrand))
        return Table(["value", "err_estimate", "engine", "depth_or_samples", "seed"],
                     [[value, err, engine, size, seed]], metadata)

    def pressure(self, potential="weight_log", scale=1.0):
        if potential not in POTENTIALS:
            raise IFSError(f"unknown potential {potential!r}; choose one of {POTENTIALS}")
        inst = self.instance()
        base = Potential.weight_log(inst) if potential == "weight_log" else Potential.derivative_log(inst)
        phi = base if scale == 1.0 else Potential.scaled(scale, base)
        depth = self.settings.transfer_depth
        if self.settings.method == "periodic":
            estimate = pressure_periodic(phi, depth)
        else:
            estimate = pressure_transfer(phi, depth)
        metadata = base_metadata(self.document, "pressure", method=estimate.method, potential=str(phi))
        return Table(["value", "method", "depth", "gap"],
                     [[estimate.value, estimate.method, estimate.depth, estimate.gap]], metadata)

    def dimension(self):
        """جذر Bowen، ومعه بعد القياس عندما تكون الأوزان مطبّعة"""
        inst = self.instance()
        settings = self.settings
        result = bowen_root(inst, settings.method, settings.transfer_depth, settings.tol)
        if inst.report.normalization_ok:
            result = result.merged(measure_dimension(inst, settings.cylinder_depth))
        else:
            logger.warning("⚠️ الأوزان غير مطبّعة: بعد القياس غير محسوب")
        metadata = base_metadata(self.document, "dimension", method=settings.method, tol=settings.tol,
                                 cylinder_depth=settings.cylinder_depth)
        if math.isnan(result.hd_measure):
            metadata["hd_measure"] = "not computed"
        return Table(DIMENSION_HEADER, [result.row()], metadata)
