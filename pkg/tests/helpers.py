#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
دوال مساعدة للاختبارات
"""

from documents import load_preset
from ifs_core import FamilySpec, bind

PRESETS = ("simple_4_1", "cantor", "ex_4_3", "ex_4_4")


def preset_instance(name, lam=None, theta=None):
    """نظام جاهز مربوط عند قيمه الافتراضية أو عند (lam, theta)"""
    document = load_preset(name).with_overrides(engine={"lambda": lam, "theta": theta})
    return document.bind()


def make_instance(maps, weights, lam=0.5, theta=0.5, lambda_range=(0.0, 2.0), theta_range=(0.0, 1.0)):
    family = FamilySpec.from_strings(maps, weights, lambda_range, theta_range, name="test")
    return bind(family, lam, theta)
