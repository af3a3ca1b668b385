import pytest

from services.geometry_service import ORIGIN, ConvexPolygon, Point2, farthest_from_line
from services.oracle_service import (
    hull_of,
    naive_chord_width,
    naive_rates,
    naive_width_path,
    same_vertex_set,
    segment_hits_interior,
    unit_steps,
)
from tools.validator import OracleValidatorTool

SQUARE = [Point2(0, 0), Point2(1, 0), Point2(1, 1), Point2(0, 1)]


class TestHullOf:

    def test_singleton(self):
        hull = hull_of([Point2(0, 0)])
        assert hull.size == 1

    def test_interior_point_dropped(self):
        hull = hull_of([Point2(0, 0), Point2(1, 0), Point2(0.5, 0.1), Point2(0.5, 1)])
        assert sorted(hull.vertices()) == [Point2(0, 0), Point2(0.5, 1), Point2(1, 0)]

    @pytest.mark.parametrize("order", [(0, 1, 2, 3), (3, 1, 0, 2), (2, 0, 3, 1)])
    def test_square_in_any_order(self, order):
        hull = hull_of([SQUARE[i] for i in order])
        assert same_vertex_set(hull, ConvexPolygon.from_vertices(SQUARE))

    def test_collinear_points_dropped(self):
        hull = hull_of([Point2(0, 0), Point2(1, 0), Point2(2, 0), Point2(1, 1)])
        assert sorted(hull.vertices()) == [Point2(0, 0), Point2(1, 1), Point2(2, 0)]

    def test_empty_input(self):
        with pytest.raises(ValueError):
            hull_of([])


class TestSegmentHitsInterior:

    def test_segment_from_inside(self):
        assert segment_hits_interior(hull_of(SQUARE), Point2(0.5, 0.5), Point2(2, 2))

    def test_segment_along_extended_edge(self):
        assert not segment_hits_interior(hull_of(SQUARE), Point2(1, 0), Point2(2, 0))

    def test_segment_through_the_square(self):
        assert segment_hits_interior(hull_of(SQUARE), Point2(-1, 0.5), Point2(2, 0.5))

    def test_segment_outside(self):
        assert not segment_hits_interior(hull_of(SQUARE), Point2(2, 0), Point2(2, 3))

    def test_two_point_hull(self):
        segment = ConvexPolygon(ORIGIN).insert_adjacent(Point2(1, 0))
        assert not segment_hits_interior(segment, Point2(0.5, -1), Point2(0.5, 1))


class TestNaiveScans:

    def test_rates(self):
        assert naive_rates([0, 1, 3]) == (2.0, 1.5)

    def test_linear_rates(self):
        assert naive_rates([0, 0.5, 1.0, 1.5]) == (0.5, 0.5)

    def test_rates_need_a_past(self):
        with pytest.raises(ValueError):
            naive_rates([0])

    def test_width_path_mirrors_hull_width(self):
        path = [Point2(0, 0), Point2(1, 0), Point2(1, 1)]
        assert naive_width_path(path, Point2(0, 0), Point2(1, 1)) == pytest.approx(
            farthest_from_line(hull_of(path), Point2(0, 0), Point2(1, 1))
        )

    def test_width_path_undefined_line(self):
        with pytest.raises(ValueError):
            naive_width_path([Point2(0, 0)], Point2(1, 1), Point2(1, 1))

    def test_chord_width(self):
        assert naive_chord_width([0, 1, 0]) == 1.0

    def test_unit_steps(self):
        assert unit_steps([Point2(0, 0), Point2(1, 0), Point2(1, 1)]) == 0.0


class TestValidatorTool:

    def test_rancher_replay_passes(self):
        result = OracleValidatorTool().execute({"model": "rancher", "steps": 300, "seed": 4, "stride": 5})
        assert result["success"]
        assert result["data"]["passed"], result["data"]["mismatches"]

    def test_investor_replay_passes(self):
        result = OracleValidatorTool().execute({"model": "investor", "steps": 300, "seed": 4, "alpha": 1.0})
        assert result["success"]
        assert result["data"]["passed"], result["data"]["mismatches"]

    def test_unknown_model(self):
        result = OracleValidatorTool().execute({"model": "brownian", "steps": 10, "seed": 0})
        assert not result["success"]
        assert "brownian" in result["error"]

    def test_schema(self):
        schema = OracleValidatorTool().get_schema()
        assert schema["name"] == "validate_walk"
        assert schema["parameters"]["required"] == ["model", "steps", "seed"]
