import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cegt.rewards import (RewardBreakdown, cooperation_reward, efficiency_reward, safety_reward,
                          total_reward)


def test_safety_reward():
    assert safety_reward(5.0, 10.0) == 2.0
    assert safety_reward(0.5, 10.0) == 10.0
    assert safety_reward(math.inf, 10.0) == 0.0


@given(st.floats(1, 1e4), st.floats(1, 1e4))
def test_safety_monotone(g1, g2):
    lo, hi = sorted((g1, g2))
    assert safety_reward(hi, 10.0) <= safety_reward(lo, 10.0)


@given(st.floats(1e-6, 1))
def test_safety_flat_below_one(g):
    assert safety_reward(g, 7.0) == 7.0


def test_efficiency_reward():
    assert efficiency_reward(15, [15, 15, 15, 15], 10) == 10.0
    assert efficiency_reward(20, [20, 10, 10, 0], 10) == 20.0
    assert efficiency_reward(0, [0, 10, 10, 10], 10) == 0.0
    assert efficiency_reward(0, [0, 0], 10) == 0.0


@given(st.lists(st.floats(0.1, 40), min_size=1, max_size=8))
def test_efficiency_fleet_sum(vs):
    assert sum(efficiency_reward(v, vs, 10.0) for v in vs) == pytest.approx(10.0 * len(vs))


def test_cooperation_examples():
    rng = np.random.default_rng(0)
    assert cooperation_reward(4, 0.9, 1.0, [], rng) == 0.0
    assert cooperation_reward(4, 0.9, 1.0, [2, 2, 2], rng) == pytest.approx(-5.4)


def test_cooperation_bounds():
    rng = np.random.default_rng(1)
    bound = -(4 - 1) * 0.9 * 1.0 * 3
    vals = [cooperation_reward(4, 0.9, 1.0, [0, 3], rng) for _ in range(10_000)]
    assert min(vals) >= bound and max(vals) <= 0.0


@given(st.lists(st.integers(0, 10), max_size=20), st.integers(1, 8), st.floats(0.01, 0.99),
       st.floats(0.01, 10), st.integers(0, 2**32 - 1))
def test_cooperation_nonpositive(hist, n, gamma, lam, seed):
    r = cooperation_reward(n, gamma, lam, hist, np.random.default_rng(seed))
    assert r <= 0.0
    if not any(hist):
        assert r == 0.0


def test_total_reward():
    assert total_reward(RewardBreakdown(2, 10, -5.4, 0.05)) == pytest.approx(6.65)
    assert total_reward(RewardBreakdown(0, 0, 0, 0)) == 0
    rng = np.random.default_rng(2)
    for _ in range(20):
        c = rng.normal(size=4)
        assert RewardBreakdown(*c).total == pytest.approx(c[0] + c[1] + c[2] + c[3], abs=1e-12)
