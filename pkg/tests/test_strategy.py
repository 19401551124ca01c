import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cegt.config import SimConfig
from cegt.core import RngStreams, RunHistory, VehicleHistory, VehicleState, WorldState
from cegt.strategy import (IMITATION, MUTATION, imitate_speed, imitation_mutation_probabilities,
                           imitation_target, mutation_search, select_speed_cegt,
                           select_speed_egt)
from oracles import brute_force_search

cfg = SimConfig()


def test_probabilities_examples():
    assert imitation_mutation_probabilities(0.3, 0.3, 4.0) == (0.5, 0.5)
    assert imitation_mutation_probabilities(1e6, 0.0, 1.0) == (1.0, 0.0)
    p, q = imitation_mutation_probabilities(2.0, 0.0, 1.0)
    assert p == pytest.approx(0.880797077977882, abs=1e-15)


@given(st.floats(-1e3, 1e3), st.floats(-10, 10), st.floats(-10, 10))
def test_probabilities_sum_to_one(a, alpha, beta):
    p, q = imitation_mutation_probabilities(a, alpha, beta)
    assert p + q == 1.0
    assert 0.0 <= p <= 1.0


@given(st.floats(-5, 5), st.floats(1e-3, 5), st.floats(0.1, 5))
def test_probabilities_increasing(a, da, beta):
    assert imitation_mutation_probabilities(a + da, 0.0, beta)[0] > imitation_mutation_probabilities(a, 0.0, beta)[0]


def test_imitation_target():
    assert imitation_target([1, 9, 3, 2], 0) == 1
    assert imitation_target([5, 5, 5, 5], 2) == 0
    assert imitation_target([1, 9, 3, 2], 1) == 2
    assert imitation_target([3.0], 0) is None


def test_imitate_speed():
    rng = np.random.default_rng(0)
    assert imitate_speed(12.3, 0.0, rng) == 12.3
    assert all(imitate_speed(25.0, 1.0, rng, 0.0, 25.0) <= 25.0 for _ in range(100))
    draws = np.array([imitate_speed(10.0, 0.3, rng) for _ in range(100_000)]) - 10.0
    assert abs(draws.std() - 0.3) < 0.05 * 0.3


def random_world(rng, n=4):
    xs = np.sort(rng.uniform(0, 60, n))[::-1]
    return WorldState(tuple(VehicleState(k + 1, float(xs[k]), 0.0, float(rng.uniform(0, 25)), 0)
                            for k in range(n)))


def test_mutation_search_matches_brute_force():
    rng = np.random.default_rng(5)
    for _ in range(200):
        w = random_world(rng)
        i = int(rng.integers(4))
        a, coop = rng.normal(), -abs(rng.normal())
        v, r = mutation_search(w, None, i, a, coop, cfg)
        bv, br = brute_force_search(w, i, a, coop, cfg)
        assert v == pytest.approx(bv, abs=1e-12) and r == pytest.approx(br, abs=1e-9)


def test_mutation_tie_break_lowest():
    flat = dataclasses.replace(cfg, r_safety_base=0.0, r_efficiency_base=0.0)
    w = WorldState((VehicleState(1, 0.0, 0.0, 10.0, 0),))
    v, _ = mutation_search(w, None, 0, 0.0, 0.0, flat)
    assert v == pytest.approx(8.0)


def test_mutation_degenerate_grid():
    pinned = dataclasses.replace(cfg, v_min=12.0, v_max=12.0)
    w = WorldState((VehicleState(1, 0.0, 0.0, 12.0, 0),))
    assert mutation_search(w, None, 0, 0.0, 0.0, pinned)[0] == 12.0


@given(st.floats(-50, 50))
@settings(max_examples=30)
def test_mutation_argmax_shift_invariant(c):
    w = random_world(np.random.default_rng(3))
    assert mutation_search(w, None, 2, 0.0, 0.0, cfg)[0] == mutation_search(w, None, 2, c, 0.0, cfg)[0]


def history_with_mean(n, value):
    per = tuple(VehicleHistory([1.0], [1.0], [value]) for _ in range(n))
    return RunHistory(per_vehicle=per, total_rewards=[4.0], collisions_per_step=[0])


def test_cegt_saturated_imitation():
    c = dataclasses.replace(cfg, beta=1e6, alpha=0.0, cm=0.0)
    w = random_world(np.random.default_rng(0))
    rh = history_with_mean(4, 0.5)
    for seed in range(20):
        d = select_speed_cegt(w, rh, 1, c, RngStreams(seed, 4))
        assert d.mode == IMITATION and d.p_imitation == 1.0


def test_cegt_saturated_mutation():
    c = dataclasses.replace(cfg, beta=1e3, alpha=0.0, cm=0.0)
    w = random_world(np.random.default_rng(0))
    rh = history_with_mean(4, -0.9)
    for seed in range(20):
        assert select_speed_cegt(w, rh, 1, c, RngStreams(seed, 4)).mode == MUTATION


def test_cegt_deterministic():
    w = random_world(np.random.default_rng(0))
    rh = history_with_mean(4, 0.1)
    a = select_speed_cegt(w, rh, 2, cfg, RngStreams(4, 4))
    b = select_speed_cegt(w, rh, 2, cfg, RngStreams(4, 4))
    assert a == b


def test_egt_fixed_rates():
    w = random_world(np.random.default_rng(1))
    rh = history_with_mean(4, 0.0)
    always = dataclasses.replace(cfg, p_imitation_fixed=1.0)
    never = dataclasses.replace(cfg, p_imitation_fixed=0.0)
    for seed in range(20):
        assert select_speed_egt(w, rh, 0, always, RngStreams(seed, 4)).mode == IMITATION
        d = select_speed_egt(w, rh, 0, never, RngStreams(seed, 4), coop_draw=-1.0)
        assert d.mode == MUTATION and d.a_causal == 0.0
        assert d.chosen_speed == mutation_search(w, rh, 0, 0.0, -1.0, never)[0]


def test_single_vehicle_falls_back_to_mutation():
    w = WorldState((VehicleState(1, 0.0, 0.0, 10.0, 0),))
    rh = RunHistory.empty(1)
    always = dataclasses.replace(cfg, p_imitation_fixed=1.0)
    assert select_speed_egt(w, rh, 0, always, RngStreams(0, 1)).mode == MUTATION


@given(st.integers(0, 2**32 - 1), st.integers(0, 3))
@settings(max_examples=50)
def test_chosen_speed_in_bounds(seed, i):
    w = random_world(np.random.default_rng(seed))
    rh = history_with_mean(4, 0.0)
    for select in (select_speed_cegt, select_speed_egt):
        d = select(w, rh, i, cfg, RngStreams(seed, 4))
        assert cfg.v_min <= d.chosen_speed <= cfg.v_max
        assert 0.0 <= d.p_imitation <= 1.0
