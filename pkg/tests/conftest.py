#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
أدوات الاختبار المشتركة
=======================
"""

import pytest

from tests.helpers import make_instance, preset_instance


@pytest.fixture
def cantor():
    return preset_instance("cantor")


@pytest.fixture
def simple():
    return preset_instance("simple_4_1")


@pytest.fixture
def ex_4_3():
    return preset_instance("ex_4_3")


@pytest.fixture
def unnormalized():
    """أوزان مجموعها 1.2"""
    return make_instance(["x/2", "x/2 + 1/2"], ["0.6", "0.6"])
