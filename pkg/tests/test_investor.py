from typing import Sequence

import numpy as np
import pytest

from services.errors import NoPastError
from services.geometry_service import Point2
from services.investor_service import InvestorService, InvestorState
from services.oracle_service import naive_chord_width, naive_rates
from services.rng_service import derive


def state_from(xs: Sequence[float], alpha: float = 1.0) -> InvestorState:
    """Investor state whose graph is the given path"""
    state = InvestorState.start(alpha)
    for m, x in enumerate(xs[1:], start=1):
        state.graph_hull.insert_adjacent(Point2(float(m), float(x)))
    state.n = len(xs) - 1
    state.x = float(xs[-1])
    return state


service = InvestorService()


class TestExtremalRates:

    def test_single_past_point(self):
        assert service.extremal_rates(state_from([0, 1])) == (1.0, 1.0)

    def test_convex_path(self):
        rmax, rmin = service.extremal_rates(state_from([0, 1, 3]))
        assert rmax == pytest.approx(2.0)
        assert rmin == pytest.approx(1.5)

    def test_dip(self):
        rmax, rmin = service.extremal_rates(state_from([0, -1, 0.5]))
        assert rmax == pytest.approx(1.5)
        assert rmin == pytest.approx(0.25)

    def test_no_past(self):
        with pytest.raises(NoPastError):
            service.extremal_rates(state_from([0]))

    def test_squares(self):
        n = 40
        rmax, rmin = service.extremal_rates(state_from([m * m for m in range(n + 1)]))
        assert rmax == pytest.approx(2 * n - 1)
        assert rmin == pytest.approx(n)


class TestWidth:

    def test_linear_path(self):
        assert service.width(state_from([0, 1, 2])) == pytest.approx(0.0)

    def test_tent(self):
        assert service.width(state_from([0, 1, 0])) == pytest.approx(1.0)

    def test_no_past(self):
        with pytest.raises(NoPastError):
            service.width(state_from([0]))


def test_rates_and_width_match_naive_scans():
    investor = InvestorService(keep_path=True)
    for seed in range(10):
        stream = derive(seed, 0)
        state = InvestorState.start(1.0, keep_path=True)
        for _ in range(200):
            investor.step(state, stream)
            rmax, rmin = investor.extremal_rates(state)
            slow_max, slow_min = naive_rates(state.path)
            assert rmax == pytest.approx(slow_max, rel=1e-9, abs=1e-9)
            assert rmin == pytest.approx(slow_min, rel=1e-9, abs=1e-9)
            assert rmin <= rmax
            assert investor.width(state) == pytest.approx(naive_chord_width(state.path), rel=1e-9, abs=1e-9)


def test_first_increment_is_pure_gaussian():
    state = InvestorState.start(1.0)
    service.step(state, derive(11, 0))
    assert state.x == derive(11, 0).gaussian()


def test_zero_alpha_is_a_gaussian_walk():
    finals = [service.walk(100, 0.0, seed=3, index=i).x for i in range(2000)]
    assert np.var(finals) == pytest.approx(100.0, rel=0.15)


def test_zero_alpha_has_no_speed():
    ratios = [abs(service.walk(10_000, 0.0, seed=4, index=i).x) / 10_000 for i in range(100)]
    assert np.mean(ratios) < 0.05


def test_run_records():
    records = InvestorService().run(steps=50, alpha=1.0, seed=8, checkpoints=[0, 10, 50])
    assert [r.n for r in records] == [0, 10, 50]
    assert records[0].width is None
    for record in records[1:]:
        assert record.status == "ok"
        assert record.width >= 0
        assert record.extras["rmin"] <= record.extras["rmax"]
        assert record.extras["ratio"] == pytest.approx(record.extras["x"] / record.n)


def test_graph_abscissas_increase():
    investor = InvestorService(keep_path=True)
    state = investor.walk(300, 1.0, seed=5)
    xs = sorted(v.x for v in state.graph_hull.vertices())
    assert xs[0] == 0.0
    assert xs[-1] == 300.0
    assert state.graph_hull.cursor.x == 300.0


def test_strong_feedback_ends_with_blowup_marker():
    records = InvestorService().run(steps=2000, alpha=4.0, seed=1, checkpoints=[0, 2000])
    assert records[-1].status == "blowup"
    assert records[-1].n < 2000
    assert records[-1].width is None


def test_negative_alpha_is_rejected():
    with pytest.raises(ValueError):
        InvestorState.start(-0.5)


def test_same_seed_same_walk():
    first = InvestorService().run(steps=200, alpha=1.0, seed=99)
    second = InvestorService().run(steps=200, alpha=1.0, seed=99)
    assert first == second
