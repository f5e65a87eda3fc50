import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lmexplorer import cspace, fixtures, scene
from lmexplorer.cspace import CompositeSpace, wrap_angle


def _space_for(fixture_name):
    return cspace.full_space(scene.load_scene(fixtures.scene_doc(fixture_name)))


@pytest.fixture(scope="module")
def crossing_space():
    return _space_for("crossing_disks")


@pytest.fixture(scope="module")
def se2_space():
    return _space_for("se2_corridor")


def test_wrap_angle_values():
    assert wrap_angle(0.0) == 0.0
    assert wrap_angle(math.pi) == pytest.approx(-math.pi)  # [-pi, pi)
    assert wrap_angle(3 * math.pi / 2) == pytest.approx(-math.pi / 2)
    # wrapped separation of -3.1 and 3.1 is 2*pi - 6.2
    assert abs(wrap_angle(3.1 - (-3.1))) == pytest.approx(2 * math.pi - 6.2)
    assert abs(wrap_angle(3.1 - (-3.1))) == pytest.approx(0.0831853, abs=1e-6)


def test_empty_composite_sample(rng):
    space = CompositeSpace(None, [])
    x = space.sample_uniform(rng)
    assert x.shape == (0,)
    assert space.dimension == 0


def test_uniform_sampling_mean(empty_square_space, rng):
    # per-axis mean of the unit-ish box: bounds [-0.1, 1.1] after inset? no:
    # sampling is over raw bounds [-0.2, 1.2], mean 0.5, spread 1.4
    n = 10_000
    X = np.array([empty_square_space.sample_uniform(rng) for _ in range(n)])
    sigma = 1.4 / math.sqrt(12) / math.sqrt(n)
    assert np.allclose(X.mean(axis=0), 0.5, atol=4 * sigma + 1e-9)


def test_sampling_deterministic(crossing_space):
    a = [crossing_space.sample_uniform(np.random.default_rng(42)) for _ in range(5)]
    b = [crossing_space.sample_uniform(np.random.default_rng(42)) for _ in range(5)]
    assert all(np.array_equal(x, y) for x, y in zip(a, b))


def test_distance_euclidean(empty_square_space):
    a = np.array([0.0, 0.0])
    b = np.array([3.0 / 5, 4.0 / 5])
    # scaled into bounds: direct computation
    assert empty_square_space.distance(a, b) == pytest.approx(1.0)
    assert empty_square_space.distance(a, a) == 0.0


def test_se2_distance_wraps(se2_space):
    a = np.array([0.5, 0.5, -3.1])
    b = np.array([0.5, 0.5, 3.1])
    w_theta = se2_space.components[0].weights[2]
    assert se2_space.distance(a, b) == pytest.approx(w_theta * (2 * math.pi - 6.2))


def test_interpolate_midpoint(empty_square_space):
    a, b = np.array([0.0, 0.0]), np.array([1.0, 0.0])
    assert np.allclose(empty_square_space.interpolate(a, b, 0.5), [0.5, 0.0])
    assert np.array_equal(empty_square_space.interpolate(a, b, 1.0), b)
    assert np.array_equal(empty_square_space.interpolate(a, b, 0.0), a)


def test_interpolate_theta_shortest_arc(se2_space):
    a = np.array([0.5, 0.5, 3.0])
    b = np.array([0.5, 0.5, -3.0])
    mid = se2_space.interpolate(a, b, 0.5)
    assert abs(mid[2]) == pytest.approx(math.pi, abs=1e-9)  # wraps through +-pi
    assert np.allclose(se2_space.interpolate(a, b, 1.0), se2_space.normalize(b))


def test_config_feasibility_crossing(crossing_space):
    start = np.array([0.0, 0.0])
    assert crossing_space.config_feasible(start)
    both_center = np.array([0.5, 0.5])  # both disks at the segment crossing
    assert not crossing_space.config_feasible(both_center)


def test_single_robot_level_feasible(crossing_space):
    sc = crossing_space.scene
    comp = cspace.component_for_robot(sc.workspace.bounds, 0, sc.robots[0].space, sc.robots[0].shape)
    level1 = CompositeSpace(sc, [comp])
    assert level1.config_feasible(np.array([0.5]))


def test_segment_feasibility(empty_square_space):
    a, b = np.array([0.0, 0.0]), np.array([1.0, 1.0])
    assert empty_square_space.segment_feasible(a, b)
    assert empty_square_space.segment_feasible(a, a)


def test_segment_through_obstacle_infeasible():
    doc = {
        "name": "blocked",
        "workspace": {
            "bounds": [0, 0, 1, 1],
            "obstacles": [{"type": "disk", "center": [0.5, 0.5], "radius": 0.15}],
        },
        "robots": [
            {"name": "bot", "shape": {"type": "disk", "radius": 0.05}, "space": "R2",
             "start": [0.1, 0.5], "goal": [0.9, 0.5]},
        ],
    }
    space = cspace.full_space(scene.load_scene(doc))
    a, b = np.array([0.1, 0.5]), np.array([0.9, 0.5])
    assert not space.segment_feasible(a, b)  # midpoint sits inside the obstacle
    assert space.segment_feasible(np.array([0.1, 0.1]), np.array([0.9, 0.1]))


def test_segment_feasibility_symmetric(crossing_space, rng):
    for _ in range(50):
        a = crossing_space.sample_uniform(rng)
        b = crossing_space.sample_uniform(rng)
        assert crossing_space.segment_feasible(a, b) == crossing_space.segment_feasible(b, a)


def test_measure_values(crossing_space):
    # unit square R2
    doc = {
        "name": "sq",
        "workspace": {"bounds": [0, 0, 1, 1], "obstacles": []},
        "robots": [
            {"name": "a", "shape": {"type": "disk", "radius": 0.01}, "space": "R2",
             "start": [0.5, 0.1], "goal": [0.5, 0.9]},
        ],
    }
    sq = cspace.full_space(scene.load_scene(doc))
    assert sq.measure == pytest.approx(math.sqrt(2))
    # R1 segment has unit parameter extent
    comp = crossing_space.components[0]
    single = CompositeSpace(crossing_space.scene, [comp])
    assert single.measure == pytest.approx(1.0)
    # two unit squares -> sqrt(2 + 2)
    doc["robots"].append(
        {"name": "b", "shape": {"type": "disk", "radius": 0.01}, "space": "R2",
         "start": [0.1, 0.5], "goal": [0.9, 0.5]}
    )
    two = cspace.full_space(scene.load_scene(doc))
    assert two.measure == pytest.approx(2.0)


@settings(max_examples=150, deadline=None)
@given(data=st.data())
def test_metric_axioms(data, se2_space):
    def cfg():
        return np.array(
            [
                data.draw(st.floats(0, 1)),
                data.draw(st.floats(0, 1)),
                data.draw(st.floats(-math.pi, math.pi - 1e-9)),
            ]
        )

    a, b, c = cfg(), cfg(), cfg()
    dab = se2_space.distance(a, b)
    assert dab >= 0
    assert se2_space.distance(a, a) == 0
    assert dab == se2_space.distance(b, a)  # exact symmetry
    assert dab <= se2_space.distance(a, c) + se2_space.distance(c, b) + 1e-12


def test_interpolate_endpoints_bit_exact(empty_square_space, rng):
    for _ in range(100):
        a = empty_square_space.sample_uniform(rng)
        b = empty_square_space.sample_uniform(rng)
        assert np.array_equal(empty_square_space.interpolate(a, b, 0.0), a)
        assert np.array_equal(empty_square_space.interpolate(a, b, 1.0), b)


def test_configs_feasible_scalar_vector_agree(crossing_space, rng):
    X = np.array([crossing_space.sample_uniform(rng) for _ in range(200)])
    batch = crossing_space.configs_feasible(X)
    single = np.array([crossing_space.config_feasible(x) for x in X])
    assert np.array_equal(batch, single)


def test_margin_tightens_feasibility(crossing_space):
    # exactly at contact distance: infeasible; just beyond: feasible at
    # zero margin but infeasible once a margin is demanded
    x = np.array([0.5, 0.5 - (0.22 + 1e-4) / 0.7])
    assert crossing_space.config_feasible(x)
    assert not crossing_space.config_feasible(x, margin=0.01)
