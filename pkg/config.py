#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
الإعدادات
=========
كل القيم الافتراضية القابلة للضبط، تُقرأ من متغيرات البيئة IFS_* مع قيمة احتياطية
"""

import os

# --- التحقق من الأنظمة ---
GRID_N = int(os.environ.get("IFS_GRID_N", 4096))
NORMALIZATION_TOL = float(os.environ.get("IFS_NORMALIZATION_TOL", 1e-9))

# --- محرك القياس ---
ATOM_BUDGET = int(os.environ.get("IFS_ATOM_BUDGET", 2 ** 24))
DEFAULT_DEPTH = int(os.environ.get("IFS_DEPTH", 16))
DEFAULT_SAMPLES = int(os.environ.get("IFS_SAMPLES", 1_000_000))
DEFAULT_BURN_IN = int(os.environ.get("IFS_BURN_IN", 1000))
DEFAULT_SEED = int(os.environ.get("IFS_SEED", 0))

# --- الضغط وخريطة الإسقاط ---
TRANSFER_DEPTH = int(os.environ.get("IFS_TRANSFER_DEPTH", 8))
CYLINDER_DEPTH = int(os.environ.get("IFS_CYLINDER_DEPTH", 12))
POWER_ITERS = int(os.environ.get("IFS_POWER_ITERS", 10_000))
POWER_TOL = float(os.environ.get("IFS_POWER_TOL", 1e-13))
PROJECTION_TOL = float(os.environ.get("IFS_PROJECTION_TOL", 1e-15))
PROJECTION_MAX_ITERS = int(os.environ.get("IFS_PROJECTION_MAX_ITERS", 10_000))

# --- البعد ---
BOWEN_T_MAX = float(os.environ.get("IFS_BOWEN_T_MAX", 2.0))
BOWEN_TOL = float(os.environ.get("IFS_BOWEN_TOL", 1e-10))
BOWEN_MAX_STEPS = int(os.environ.get("IFS_BOWEN_MAX_STEPS", 200))

# --- المسح وتشخيص النعومة ---
SWEEP_POINTS = int(os.environ.get("IFS_SWEEP_POINTS", 33))
THREADS = int(os.environ.get("IFS_THREADS", 1))
DIAGNOSTIC_MAX_DEPTH = int(os.environ.get("IFS_DIAGNOSTIC_MAX_DEPTH", 16))
DIAGNOSTIC_WINDOW_POINTS = int(os.environ.get("IFS_DIAGNOSTIC_WINDOW_POINTS", 25))
DIAGNOSTIC_WINDOW_SCALE = float(os.environ.get("IFS_DIAGNOSTIC_WINDOW_SCALE", 2.0))
# أسس السلم الثنائي h = ℓ·2^-j، مفصولة بفواصل
LADDER_EXPONENTS = tuple(int(j) for j in os.environ.get("IFS_LADDER_EXPONENTS", "5,6,7,8,9,10").split(","))

# عتبات الحكم على ميل النمو
BOUNDED_SLOPE = -0.1
DIVERGING_SLOPE = -0.5
NOISE_MARGIN = 0.01

# --- السجلات ---
LOG_LEVEL = os.environ.get("IFS_LOG_LEVEL", "WARNING")
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
