import math
import itertools

import numpy as np
from hypothesis import given, strategies as st

from cegt.config import SimConfig
from cegt.core import VehicleState, WorldState
from cegt.safety import (apply_collision_response, detect_collisions, effective_lane, eq27_gate,
                         front_neighbors, laterally_close, ttc)

cfg = SimConfig()


def test_ttc_closing():
    strict, signed = ttc(0.0, 25.0, 15.0, 10.0, 5.0)
    assert strict == 4.0 and signed == 4.0


def test_ttc_equal_speeds():
    assert ttc(0.0, 25.0, 10.0, 10.0, 5.0) == (math.inf, math.inf)


def test_ttc_opening_signed():
    strict, signed = ttc(0.0, 15.0, 8.0, 10.0, 5.0)
    assert strict == math.inf
    assert signed == -5.0


@given(st.floats(-100, 100), st.floats(0, 100), st.floats(0, 40), st.floats(0, 40))
def test_ttc_properties(x_i, d, v_i, v_j):
    strict, signed = ttc(x_i, x_i + d, v_i, v_j, 5.0)
    if v_i <= v_j:
        assert strict == math.inf
    else:
        assert strict == signed
    if abs(v_i - v_j) > 1e-6:
        assert math.isfinite(signed)


def world(*specs):
    return WorldState(vehicles=tuple(VehicleState(k + 1, x, y, v, round(y / 3.75))
                                     for k, (x, y, v) in enumerate(specs)))


def test_collision_same_lane():
    events = detect_collisions(world((3.0, 0.0, 10), (0.0, 0.0, 12)), cfg)
    assert len(events) == 1 and events[0].pair == (1, 2) and events[0].gap == 3.0


def test_no_collision_adjacent_lane():
    for gap in (0.0, 1.0, 3.0, 4.9):
        assert detect_collisions(world((gap, 3.75, 10), (0.0, 0.0, 12)), cfg) == []


def test_collision_mid_maneuver():
    assert len(detect_collisions(world((3.0, 1.0, 10), (0.0, 0.0, 12)), cfg)) == 1


def test_collision_boundary_is_strict():
    assert detect_collisions(world((5.0, 0.0, 10), (0.0, 0.0, 12)), cfg) == []


@given(st.lists(st.tuples(st.floats(0, 30), st.sampled_from([0.0, 1.0, 2.5, 3.75])),
                min_size=2, max_size=5))
def test_detection_order_independent(specs):
    w = world(*[(x, y, 10.0) for x, y in specs])
    base = {frozenset(e.pair) for e in detect_collisions(w, cfg)}
    perm = list(reversed(range(len(specs))))
    w2 = world(*[(specs[k][0], specs[k][1], 10.0) for k in perm])
    # map permuted ids back to original ids
    back = {frozenset(perm[i - 1] + 1 for i in e.pair) for e in detect_collisions(w2, cfg)}
    assert base == back


def test_lane_gates_agree_off_maneuver():
    # integer lanes: index gate with eps 0.5 and the lateral-distance gate coincide
    for li, lj in itertools.product(range(3), repeat=2):
        yi, yj = li * cfg.lane_width, lj * cfg.lane_width
        assert eq27_gate(li, lj, cfg.eps_lane) == laterally_close(yi, yj, cfg.lane_width)


@given(st.floats(0, 3.75), st.floats(0, 3.75))
def test_lane_index_gate_implies_lateral_gate(yi, yj):
    if eq27_gate(effective_lane(yi, 3.75), effective_lane(yj, 3.75), 0.5):
        assert laterally_close(yi, yj, 3.75)


def test_response_penalty_and_speed():
    w = world((3.0, 0.0, 8.0), (0.0, 0.0, 12.0))
    events = detect_collisions(w, cfg)
    w2, r = apply_collision_response(w, [1.0, 2.0], events, cfg)
    assert r == [-99.0, -98.0]
    assert [s.v for s in w2.vehicles] == [8.0, 8.0]


def test_response_identity_without_events():
    w = world((30.0, 0.0, 8.0), (0.0, 0.0, 12.0))
    w2, r = apply_collision_response(w, [1.0, 2.0], [], cfg)
    assert w2 == w and r == [1.0, 2.0]


def test_response_additive_penalties():
    w = world((4.0, 0.0, 8.0), (2.0, 0.0, 9.0), (0.0, 0.0, 12.0))
    events = detect_collisions(w, cfg)
    assert len(events) == 3
    w2, r = apply_collision_response(w, [0.0, 0.0, 0.0], events, cfg)
    assert r == [-200.0, -200.0, -200.0]
    v = [s.v for s in w2.vehicles]
    assert v[1] <= v[0] and v[2] <= v[1]


def test_front_neighbors():
    x = np.array([20.0, 10.0, 0.0, 15.0])
    y = np.array([0.0, 0.0, 0.0, 3.75])
    assert list(front_neighbors(x, y, 3.75)) == [-1, 0, 1, -1]
