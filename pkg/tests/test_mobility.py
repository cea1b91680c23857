import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from marsim.kernel import RandomStream
from marsim.mobility import (UAV_SPEED, Agent, MissionArea, SteeringConfig, SteeringOutput,
                             SwarmMobility, TraceError, TraceMobility, WaypointQueue,
                             alignment_step, cohesion_step, collision_avoidance_step,
                             combine_steerings, controlled_waypoint_step, load_trace,
                             locomotion_apply, parse_trace, trace_position, write_trace)

AREA = MissionArea((500.0, 500.0, 250.0))


def queue(*wps):
    return WaypointQueue(AREA, RandomStream(1, 0), waypoints=[np.array(w, float) for w in wps])


def test_speed_is_50_kmh():
    assert UAV_SPEED == pytest.approx(13.889, abs=1e-3)


def test_combine_single():
    assert np.allclose(combine_steerings([SteeringOutput(np.array([2.0, 0, 0]), 1)]), [2, 0, 0])


def test_combine_exploration_and_avoidance_weights():
    out = combine_steerings([SteeringOutput(np.array([1.0, 0, 0]), 1),
                             SteeringOutput(np.array([0, 1.0, 0]), 10)])
    assert np.allclose(out, [1 / 11, 10 / 11, 0])


def test_combine_symmetric_cancellation():
    out = combine_steerings([SteeringOutput(np.array([3.0, 0, 0]), 2),
                             SteeringOutput(np.array([-3.0, 0, 0]), 2)])
    assert np.allclose(out, 0)


def test_combine_requires_active_steering():
    with pytest.raises(ValueError):
        combine_steerings([SteeringOutput(np.ones(3), 0.0)])
    with pytest.raises(ValueError):
        SteeringOutput(np.ones(3), -1)


vec3 = st.lists(st.floats(-50, 50), min_size=3, max_size=3)


@given(st.lists(st.tuples(vec3, st.floats(0.01, 20)), min_size=1, max_size=6),
       st.floats(0.01, 100))
def test_combine_scale_invariant(pairs, c):
    outs = [SteeringOutput(np.array(v), w) for v, w in pairs]
    scaled = [SteeringOutput(np.array(v), w * c) for v, w in pairs]
    assert np.allclose(combine_steerings(outs), combine_steerings(scaled), atol=1e-12, rtol=1e-12)


def test_waypoint_step_along_x():
    out = controlled_waypoint_step(np.zeros(3), queue((100, 0, 0)), 13.889)
    assert np.allclose(out.desired, [13.889, 0, 0])


def test_waypoint_step_along_z():
    out = controlled_waypoint_step(np.zeros(3), queue((0, 0, 50)), 13.889)
    assert np.allclose(out.desired, [0, 0, 13.889])


def test_waypoint_arrival_pops_head():
    q = queue((10, 10, 10), (200, 10, 10))
    out = controlled_waypoint_step(np.array([12.0, 10, 10]), q, 5.0)
    assert np.allclose(q.head, [200, 10, 10])
    assert len(q) == 3
    assert np.allclose(out.desired, [5, 0, 0])


def test_waypoints_stay_inside_area():
    q = WaypointQueue(AREA, RandomStream(9, 0))
    for _ in range(200):
        q.advance()
        assert all(AREA.contains(w) for w in q.waypoints)
    with pytest.raises(ValueError):
        WaypointQueue(AREA, RandomStream(9, 0), waypoints=[(600, 0, 0)])


def test_avoidance_outside_threshold_is_inert():
    out = collision_avoidance_step(np.zeros(3), [np.array([40.0, 0, 0])], 30)
    assert np.allclose(out.desired, 0)
    assert out.weight == 0


def test_avoidance_linear_ramp():
    out = collision_avoidance_step(np.zeros(3), [np.array([10.0, 0, 0])], 30)
    assert np.allclose(out.desired, [-2 / 3, 0, 0])
    scaled = collision_avoidance_step(np.zeros(3), [np.array([10.0, 0, 0])], 30, v_max=13.889)
    assert np.allclose(scaled.desired, [-2 / 3 * 13.889, 0, 0])
    assert scaled.weight == 10


def test_avoidance_symmetric_neighbors_cancel():
    out = collision_avoidance_step(np.zeros(3), [np.array([10.0, 0, 0]), np.array([-10.0, 0, 0])], 30)
    assert np.allclose(out.desired, 0)


def test_avoidance_coincident_fallback():
    out = collision_avoidance_step(np.zeros(3), [np.zeros(3)], 30)
    assert np.allclose(out.desired, [1, 0, 0])


def test_locomotion_clamps_speed():
    p = locomotion_apply(np.array([100.0, 100, 100]), np.array([20.0, 0, 0]), 0.25, 13.889, AREA)
    assert np.linalg.norm(p - [100, 100, 100]) == pytest.approx(13.889 * 0.25)


def test_locomotion_zero_velocity():
    p = np.array([1.0, 2, 3])
    assert np.array_equal(locomotion_apply(p, np.zeros(3), 0.25, 13.889, AREA), p)


def test_locomotion_box_clamp():
    p = locomotion_apply(np.array([499.0, 10, 10]), np.array([13.0, 0, 0]), 0.25, 13.889, AREA)
    assert p[0] == 500.0


@settings(max_examples=200)
@given(st.lists(st.floats(0, 500), min_size=3, max_size=3), vec3, st.floats(0.01, 1.0))
def test_locomotion_invariants(pos, v, dt):
    pos = np.minimum(np.array(pos), AREA.upper)
    new = locomotion_apply(pos, np.array(v) * 3, dt, UAV_SPEED, AREA)
    assert AREA.contains(new)
    assert np.linalg.norm(new - pos) <= UAV_SPEED * dt + 1e-9


def test_cohesion_and_alignment():
    c = cohesion_step(np.zeros(3), [np.array([10.0, 0, 0]), np.array([10.0, 10, 0])], 2.0)
    assert np.allclose(c.desired, 2 * np.array([10, 5, 0]) / math.hypot(10, 5))
    a = alignment_step([np.array([1.0, 0, 0]), np.array([0, 1.0, 0])], 3)
    assert np.allclose(a.desired, [0.5, 0.5, 0]) and a.weight == 3
    assert cohesion_step(np.zeros(3), [], 1).weight == 0


def _head_on(avoidance: bool) -> float:
    a = Agent(0, np.array([100.0, 250, 100]), queue((400, 250, 100), (400, 250, 100), (400, 250, 100)))
    b = Agent(1, np.array([400.0, 250, 100]), queue((100, 250, 100), (100, 250, 100), (100, 250, 100)))
    swarm = SwarmMobility([a, b], AREA, steering=SteeringConfig(avoidance=avoidance))
    closest = math.inf
    for _ in range(120):
        swarm.tick(0.25)
        closest = min(closest, float(np.linalg.norm(a.pos - b.pos)))
    return closest


def test_collision_avoidance_keeps_distance_head_on():
    with_ca = _head_on(True)
    without = _head_on(False)
    assert with_ca > without
    assert with_ca > 20.0


def test_trace_interpolation():
    tr = parse_trace("0.0,0,0,0,0\n1.0,0,10,0,0\n")
    assert np.allclose(trace_position(tr, 0, 0.5), [5, 0, 0])
    assert np.allclose(trace_position(tr, 0, -1), [0, 0, 0])
    assert np.allclose(trace_position(tr, 0, 7), [10, 0, 0])


def test_trace_errors():
    with pytest.raises(TraceError, match="no samples"):
        parse_trace("# only a comment\n")
    with pytest.raises(TraceError, match="line 2"):
        parse_trace("0,0,0,0,0\n1,0,zz,0,0\n")
    with pytest.raises(TraceError, match="line 2"):
        parse_trace("1,0,0,0,0\n0.5,0,1,0,0\n")


def test_single_sample_is_stationary():
    tr = parse_trace("3.0,4,1,2,3\n")
    mob = TraceMobility(tr, AREA)
    for _ in range(10):
        mob.tick(0.25)
        assert np.allclose(mob.agents[0].pos, [1, 2, 3])


def test_trace_replay_is_exact(tmp_path):
    swarm = SwarmMobility.random(4, AREA, RandomStream(5, 0))
    samples = [(0.0, a.node, a.pos.copy()) for a in swarm.agents]
    truth = {0: {a.node: a.pos.copy() for a in swarm.agents}}
    for k in range(1, 41):
        swarm.tick(0.25)
        samples += [(k * 0.25, a.node, a.pos.copy()) for a in swarm.agents]
        truth[k] = {a.node: a.pos.copy() for a in swarm.agents}
    path = tmp_path / "trace.csv"
    with open(path, "w") as fh:
        write_trace(fh, samples)
    replay = TraceMobility(load_trace(path), AREA)
    for k in range(1, 41):
        replay.tick(0.25)
        for a in replay.agents:
            assert np.array_equal(a.pos, truth[k][a.node])
