#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
حزمة الخدمات
============
تصدير خدمات التحليل والمسح
"""

from .analysis_service import AnalysisService, Table, base_metadata
from .sweep_service import SweepService

__all__ = ['AnalysisService', 'SweepService', 'Table', 'base_metadata']
