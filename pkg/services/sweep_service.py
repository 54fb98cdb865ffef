#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
خدمة المسح
==========
تشغيل المسح وتشخيص النعومة من مستند الإعداد وإرجاع جداول جاهزة للكتابة
"""

import logging

from errors import ConfigError
from sweep import (
    DIAGNOSTIC_HEADER,
    SWEEP_HEADER,
    run_sweep,
    smoothness_diagnostic,
    spec_from_document,
)
from .analysis_service import Table, base_metadata

logger = logging.getLogger(__name__)


class SweepService:
    """خدمة المسح على معامل واحد"""

    def __init__(self, document):
        """
        تهيئة الخدمة

        Parameters:
        -----------
        document : ConfigDocument
            المستند بعد تطبيق خيارات سطر الأوامر (قسم sweep يحدد المعامل والشبكة)
        """
        self.document = document
        self.spec = spec_from_document(document)

    def _metadata(self, command, **extra):
        spec = self.spec
        return base_metadata(
            self.document, command,
            parameter=spec.parameter, quantity=spec.quantity.kind,
            lo=spec.grid.lo, hi=spec.grid.hi, points=spec.grid.points, **extra,
        )

    def sweep(self, threads=1):
        rows = run_sweep(self.spec, threads)
        failed = sum(1 for row in rows if row.error)
        if failed:
            logger.warning("⚠️ %d من %d نقطة فشلت", failed, len(rows))
        metadata = self._metadata("sweep", engine=self.spec.engine.engine,
                                  method=self.spec.engine.method, threads=threads, failed=failed)
        return Table(SWEEP_HEADER, [row.row() for row in rows], metadata)

    def diagnose(self, probe=None, order=None, ladder=None):
        """تشخيص النعومة عند probe (افتراضياً من قسم sweep)"""
        probe = probe if probe is not None else self.document.sweep["probe"]
        order = order if order is not None else self.document.sweep["order"]
        if probe is None:
            raise ConfigError("diagnose needs a probe value (--probe or sweep.probe)")
        result = smoothness_diagnostic(self.spec, probe, order, ladder)
        metadata = self._metadata(
            "diagnose",
            growth_exponent=result.growth_exponent,
            verdict=result.label,
            certified="true" if result.certified else "false",
            depth=result.depth,
            noise_floor=result.noise_floor,
            noise_limit=result.noise_limit,
            bias=result.bias,
            window_points=result.window_points,
            central=" ".join(repr(v) for v in result.central),
            forward=" ".join(repr(v) for v in result.forward),
            backward=" ".join(repr(v) for v in result.backward),
        )
        return Table(DIAGNOSTIC_HEADER, result.rows(), metadata), result
