#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
اختبارات محرك القياسات
"""

import numpy as np
import pytest

from errors import AtomBudgetError, IFSError, ValidationFailure
from expressions import parse_expr
from measure_engine import (
    DiscreteMeasure,
    EvolveConfig,
    chaos_game,
    depth_n_measure,
    expand,
    integrate,
    markov_step,
    stationarity_residual,
    truncation_bound,
    w1_distance,
)
from tests.helpers import preset_instance

X = parse_expr("x")
X2 = parse_expr("x*x")


# ==================== القياس المنفصل ====================

def test_from_atoms_merges_and_normalizes():
    nu = DiscreteMeasure.from_atoms([0.5, 0.2, 0.5], [1.0, 1.0, 2.0])
    assert nu.positions.tolist() == [0.2, 0.5]
    assert nu.weights.tolist() == [0.25, 0.75]
    assert nu.total_mass == pytest.approx(1.0)


def test_from_atoms_merge_tolerance():
    nu = DiscreteMeasure.from_atoms([0.1, 0.1 + 1e-9, 0.9], [1.0, 1.0, 2.0], merge_tol=1e-6)
    assert len(nu) == 2
    assert nu.positions[0] == pytest.approx(0.1 + 5e-10)
    assert nu.weights.tolist() == [0.5, 0.5]


def test_from_atoms_drops_zero_weights():
    nu = DiscreteMeasure.from_atoms([0.1, 0.2], [0.0, 3.0])
    assert nu.atoms == [(0.2, 1.0)]


@pytest.mark.parametrize("positions, weights", [
    ([0.5], [-1.0]),
    ([1.5], [1.0]),
    ([0.1, 0.2], [1.0]),
    ([0.1], [0.0]),
])
def test_from_atoms_rejects(positions, weights):
    with pytest.raises(IFSError):
        DiscreteMeasure.from_atoms(positions, weights)


def test_measure_is_read_only():
    nu = DiscreteMeasure.dirac(0.3)
    with pytest.raises(ValueError):
        nu.positions[0] = 0.5


def test_dirac_and_mean():
    assert DiscreteMeasure.dirac(0.3).mean() == 0.3
    with pytest.raises(IFSError):
        DiscreteMeasure.dirac(1.5)


# ==================== مؤثر ماركوف والتوسيع ====================

def test_markov_step_from_dirac_is_depth_one(cantor):
    step = markov_step(cantor, DiscreteMeasure.dirac(0.0))
    depth_one = depth_n_measure(cantor, 0.0, 1)
    assert step.positions.tolist() == depth_one.positions.tolist()
    assert step.weights.tolist() == depth_one.weights.tolist()
    assert step.positions == pytest.approx([0.0, 2.0 / 3.0])


def test_expand_is_lexicographic():
    positions, weights = expand(preset_instance("cantor", theta=0.3), 0.0, 2)
    # الكلمات 11, 12, 21, 22: الرمز الأول هو الخريطة الخارجية
    assert positions == pytest.approx([0.0, 2.0 / 9.0, 2.0 / 3.0, 8.0 / 9.0])
    assert weights == pytest.approx([0.09, 0.21, 0.21, 0.49])


def test_depth_n_measure_atoms(cantor):
    nu = depth_n_measure(cantor, 0.0, 10)
    assert len(nu) == 2 ** 10
    assert nu.total_mass == pytest.approx(1.0)
    assert np.all(np.diff(nu.positions) > 0)


def test_atom_budget(cantor):
    with pytest.raises(AtomBudgetError):
        expand(cantor, 0.0, 30)
    with pytest.raises(AtomBudgetError):
        depth_n_measure(cantor, 0.0, 12, EvolveConfig(merge_tol=1e-12, atom_budget=1000))


def test_requires_normalization(unnormalized):
    with pytest.raises(ValidationFailure):
        markov_step(unnormalized, DiscreteMeasure.dirac(0.0))
    with pytest.raises(ValidationFailure):
        depth_n_measure(unnormalized, 0.0, 4)


def test_lebesgue_moments_by_depth(simple):
    nu = depth_n_measure(simple, 0.0, 16)
    assert integrate(nu, X) == pytest.approx(0.5, abs=1e-3)
    assert integrate(nu, X2) == pytest.approx(1.0 / 3.0, abs=1e-3)
    assert integrate(nu, lambda x: 1.0 + 0.0 * x) == pytest.approx(1.0)


def test_merged_evolution_keeps_moments(simple):
    nu = depth_n_measure(simple, 0.0, 14, EvolveConfig(merge_tol=1e-3))
    assert len(nu) < 2 ** 14
    assert integrate(nu, X) == pytest.approx(0.5, abs=1e-3)


def test_pruned_evolution():
    inst = preset_instance("simple_4_1", theta=0.1)
    nu = depth_n_measure(inst, 0.0, 10, EvolveConfig(prune_eps=1e-6))
    assert len(nu) < 2 ** 10
    assert nu.total_mass == pytest.approx(1.0)


def test_truncation_bound():
    assert truncation_bound(0.5, 3) == 0.125


# ==================== لعبة الفوضى ====================

def test_chaos_game_is_reproducible(simple):
    a = chaos_game(simple, 0.0, burn_in=100, samples=1000, seed=42)
    b = chaos_game(simple, 0.0, burn_in=100, samples=1000, seed=42)
    c = chaos_game(simple, 0.0, burn_in=100, samples=1000, seed=43)
    assert np.array_equal(a.positions, b.positions) and np.array_equal(a.weights, b.weights)
    assert not np.array_equal(a.positions, c.positions)


def test_chaos_game_mean(simple):
    nu = chaos_game(simple, 0.0, burn_in=1000, samples=200_000, seed=0)
    assert integrate(nu, X) == pytest.approx(0.5, abs=5e-3)


@pytest.mark.slow
def test_lebesgue_moments_by_chaos_game(simple):
    nu = chaos_game(simple, 0.0, burn_in=1000, samples=1_000_000, seed=0)
    assert integrate(nu, X) == pytest.approx(0.5, abs=1e-3)
    assert integrate(nu, X2) == pytest.approx(1.0 / 3.0, abs=1e-3)


def test_chaos_game_rejects_bad_counts(simple):
    with pytest.raises(IFSError):
        chaos_game(simple, 0.0, burn_in=-1, samples=10)
    with pytest.raises(IFSError):
        chaos_game(simple, 0.0, samples=0)


# ==================== المسافات والبقايا ====================

def test_w1_distance_of_diracs():
    assert w1_distance(DiscreteMeasure.dirac(0.0), DiscreteMeasure.dirac(1.0)) == pytest.approx(1.0)
    assert w1_distance(DiscreteMeasure.dirac(0.2), DiscreteMeasure.dirac(0.5)) == pytest.approx(0.3)


def _random_measure(rng):
    size = int(rng.integers(1, 101))
    return DiscreteMeasure.from_atoms(rng.random(size), rng.random(size) + 1e-3)


@pytest.mark.parametrize("name, theta", [("simple_4_1", 0.5), ("simple_4_1", 0.3), ("cantor", 0.5), ("cantor", 0.2)])
def test_markov_operator_contracts_w1(name, theta):
    inst = preset_instance(name, theta=theta)
    L = inst.report.L
    rng = np.random.default_rng(2024)
    for _ in range(50):
        mu, nu = _random_measure(rng), _random_measure(rng)
        before = w1_distance(mu, nu)
        after = w1_distance(markov_step(inst, mu), markov_step(inst, nu))
        assert after <= L * before * (1 + 1e-9) + 1e-15


@pytest.mark.parametrize("name", ["simple_4_1", "cantor"])
def test_stationarity_residual_decays_by_L(name):
    inst = preset_instance(name)
    L = inst.report.L
    residuals = [stationarity_residual(inst, depth_n_measure(inst, 0.0, n), [X, X2]) for n in range(4, 13)]
    for previous, current in zip(residuals, residuals[1:]):
        assert current / previous <= L * (1 + 1e-6)
        assert current / previous == pytest.approx(L, rel=1e-6)


# ==================== التقارب نحو القياس الثابت ====================

def test_markov_step_of_dirac_at_zero(simple):
    assert markov_step(simple, DiscreteMeasure.dirac(0.0)).atoms == [(0.0, 0.5), (0.5, 0.5)]


def test_stationarity_residual_of_dirac_on_cantor(cantor):
    # |0 − (0/2 + (2/3)/2)|
    assert stationarity_residual(cantor, DiscreteMeasure.dirac(0.0), [X]) == pytest.approx(1.0 / 3.0)


@pytest.mark.parametrize("name", ["simple_4_1", "ex_4_3"])
@pytest.mark.parametrize("n", [2, 5, 8])
def test_depth_n_matches_iterated_markov_steps(name, n):
    inst = preset_instance(name)
    nu = DiscreteMeasure.dirac(0.0)
    for _ in range(n):
        nu = markov_step(inst, nu)
    direct = depth_n_measure(inst, 0.0, n)
    assert len(direct) == len(nu) == 2 ** n
    assert np.max(np.abs(direct.positions - nu.positions)) <= 1e-12
    assert np.max(np.abs(direct.weights - nu.weights)) <= 1e-12


@pytest.mark.parametrize("name, theta", [("simple_4_1", 0.5), ("simple_4_1", 0.3), ("cantor", 0.5), ("cantor", 0.2)])
def test_cauchy_decay(name, theta):
    inst = preset_instance(name, theta=theta)
    L = inst.report.L
    measures = [DiscreteMeasure.dirac(0.0)]
    for _ in range(13):
        measures.append(markov_step(inst, measures[-1]))
    first = w1_distance(measures[0], measures[1])
    for n in range(1, 13):
        assert w1_distance(measures[n], measures[n + 1]) <= L ** n * first * (1 + 1e-9) + 1e-15


@pytest.mark.parametrize("name, theta", [("simple_4_1", 0.5), ("simple_4_1", 0.3), ("cantor", 0.5), ("cantor", 0.2)])
def test_limit_does_not_depend_on_start_point(name, theta):
    inst = preset_instance(name, theta=theta)
    bound = 2.0 * inst.report.L ** 14
    measures = [depth_n_measure(inst, x0, 14) for x0 in (0.0, 0.5, 1.0)]
    for i in range(3):
        for j in range(i + 1, 3):
            assert w1_distance(measures[i], measures[j]) <= bound


@pytest.mark.parametrize("name", ["simple_4_1", "cantor", "ex_4_3", "ex_4_4"])
def test_chaos_game_agrees_with_depth_measure(name):
    inst = preset_instance(name)
    depth = depth_n_measure(inst, 0.0, 14)
    chaos = chaos_game(inst, 0.0, burn_in=1000, samples=100_000, seed=11)
    assert integrate(chaos, X) == pytest.approx(integrate(depth, X), abs=1e-2)
    assert w1_distance(chaos, depth) <= 2e-2
