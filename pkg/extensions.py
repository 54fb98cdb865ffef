#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
extensions.py - الكائنات المشتركة بين الملفات
يحل مشكلة Circular Imports: السجلات، رقم الإصدار، ومولد الأرقام العشوائية
"""

import logging

import numpy as np

from config import LOG_FORMAT, LOG_LEVEL

VERSION = "1.0.0"

# اسم خوارزمية المولد كما يُسجل في ترويسة المخرجات
RNG_ALGORITHM = "numpy.PCG64"

logger = logging.getLogger(__name__)

_logging_ready = False


def init_logging(level=None):
    """تهيئة السجلات مرة واحدة (stderr)"""
    global _logging_ready

    level = (level or LOG_LEVEL).upper()
    if not _logging_ready:
        logging.basicConfig(level=level, format=LOG_FORMAT)
        _logging_ready = True
    logging.getLogger().setLevel(level)
    logger.debug("✅ السجلات جاهزة بمستوى %s", level)


def make_rng(seed):
    """
    مولد أرقام عشوائية قابل للإعادة

    Parameters:
    -----------
    seed : int
        البذرة (عدد صحيح غير سالب، 64 بت)
    """
    seed = int(seed)
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    return np.random.Generator(np.random.PCG64(seed))
