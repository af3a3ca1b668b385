import math

import numpy as np
import pytest
from scipy import stats

from services.errors import UsageError
from services.geometry_service import ORIGIN, TWO_PI, ConvexPolygon, Point2, contains
from services.oracle_service import hull_of, same_vertex_set, segment_hits_interior, unit_steps
from services.rancher_service import RancherService, RancherState, checkpoint_set
from services.rng_service import derive

SQUARE = [Point2(0, 0), Point2(1, 0), Point2(1, 1), Point2(0, 1)]

service = RancherService()


def test_single_point_allows_full_circle():
    assert service.allowed_arc(RancherState.start()) == (0.0, TWO_PI)


def test_segment_allows_full_circle():
    state = RancherState(hull=ConvexPolygon(ORIGIN).insert_adjacent(Point2(1, 0)), n=1)
    assert service.allowed_arc(state)[1] == TWO_PI


@pytest.mark.parametrize("cursor", range(4))
def test_square_corner_allows_three_quarters(cursor):
    state = RancherState(hull=ConvexPolygon.from_vertices(SQUARE, cursor=cursor))
    _, measure = service.allowed_arc(state)
    assert measure == pytest.approx(1.5 * math.pi)


def test_arc_matches_segment_oracle():
    """Directions in the arc never enter the hull; directions in the excluded cone always do"""
    checked = 0
    for seed in range(20):
        stream = derive(seed, 0)
        check = derive(seed, 1)
        state = RancherState.start()
        for _ in range(60):
            service.step(state, stream)
            if state.hull.is_degenerate():
                continue
            start, measure = service.allowed_arc(state)
            here = state.position
            hull = state.hull

            legal = start + check.uniform(0.0, measure)
            illegal = start + measure + (TWO_PI - measure) * check.uniform(0.05, 0.95)
            for angle, enters in ((legal, False), (illegal, True)):
                there = Point2(here.x + math.cos(angle), here.y + math.sin(angle))
                assert segment_hits_interior(hull, here, there) is enters
            checked += 1
    assert checked > 1000


def test_sampled_angles_are_uniform_on_the_arc():
    stream = derive(17, 0)
    offsets = []
    for _ in range(10_000):
        state = RancherState(hull=ConvexPolygon.from_vertices(SQUARE, cursor=1))
        start, measure = service.allowed_arc(state)
        service.step(state, stream)
        there = state.position
        theta = math.atan2(there.y, there.x - 1.0)
        offsets.append(((theta - start) % TWO_PI) / measure)
    assert stats.kstest(offsets, "uniform").pvalue > 1e-3


def test_first_step_is_isotropic():
    stream = derive(21, 0)
    ends = []
    for _ in range(100_000):
        state = service.step(RancherState.start(), stream)
        ends.append(state.position)
    mean = np.mean(np.array(ends), axis=0)
    assert abs(mean[0]) < 0.02
    assert abs(mean[1]) < 0.02


def test_walk_keeps_hull_invariants():
    walker = RancherService(keep_path=True)
    insertions = removals = 0
    for seed in range(5):
        stream = derive(seed, 0)
        state = RancherState.start(keep_path=True)
        for _ in range(400):
            before = state.hull.copy()
            here = state.position
            walker.step(state, stream)
            assert not segment_hits_interior(before, here, state.position)
            assert all(contains(state.hull, v) for v in before.vertices())
        assert same_vertex_set(state.hull, hull_of(state.path))
        assert all(contains(state.hull, p) for p in state.path)
        assert unit_steps(state.path) <= 1e-12
        insertions += state.hull.insertions
        removals += state.hull.removals
    assert removals <= insertions


def test_empty_run():
    records = service.run(steps=0, seed=1)
    assert len(records) == 1
    assert records[0].n == 0
    assert records[0].norm == 0.0
    assert records[0].width is None


def test_segment_hull_has_zero_width():
    record = service.run(steps=1, seed=1)[-1]
    assert record.n == 1
    assert record.width == pytest.approx(0.0, abs=1e-12)
    assert record.extras["hull_size"] == 2.0
    assert record.extras["alpha"] is None


def test_records_at_checkpoints():
    records = service.run(steps=500, seed=2, checkpoints=[0, 1, 100, 500], record_beta=True)
    assert [r.n for r in records] == [0, 1, 100, 500]
    last = records[-1]
    assert last.width >= 0
    assert last.extras["d"] >= 0
    assert 0 <= last.extras["alpha"] <= math.pi
    assert -math.pi < last.extras["beta"] <= math.pi
    assert last.direction == pytest.approx(math.atan2(last.extras["y"], last.extras["x"]))
    assert records[1].extras["beta"] is None


def test_same_seed_same_records():
    assert service.run(steps=300, seed=5) == service.run(steps=300, seed=5)


def test_distance_gain_is_nonnegative_on_average():
    gains = []
    for index in range(10):
        stream = derive(6, index)
        state = RancherState.start()
        for _ in range(10_000):
            service.step(state, stream)
            gains.append(state.gain)
    assert np.mean(gains) > -1e-3


@pytest.mark.parametrize("marks", [[5, 3], [0, 11]])
def test_bad_checkpoints(marks):
    with pytest.raises(UsageError):
        checkpoint_set(10, marks)


def test_state_built_from_a_hull_measures_its_own_radius():
    hull = ConvexPolygon.from_vertices([Point2(0, 0), Point2(4, 0), Point2(0.5, 1)], cursor=2)
    diag = RancherState(hull=hull).diagnostics()
    assert diag.big_r == pytest.approx(4.0)
    assert diag.d == pytest.approx(4.0 - math.hypot(0.5, 1.0))
