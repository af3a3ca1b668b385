import math

import pytest

from services.errors import DegenerateHullError, HullPreconditionError, InvalidLineError, UndefinedAngleError
from services.geometry_service import (
    ORIGIN,
    ConvexPolygon,
    Orientation,
    Point2,
    chains,
    contains,
    diagnostics,
    farthest_from_line,
    insert_adjacent,
    interior_angle_at_cursor,
    orient,
)
from services.oracle_service import hull_of, same_vertex_set

SQUARE = [Point2(0, 0), Point2(1, 0), Point2(1, 1), Point2(0, 1)]


def square(cursor: int) -> ConvexPolygon:
    return ConvexPolygon.from_vertices(SQUARE, cursor=cursor)


class TestOrient:

    def test_left(self):
        assert orient(Point2(0, 0), Point2(1, 0), Point2(0, 1)) is Orientation.LEFT

    def test_collinear(self):
        assert orient(Point2(0, 0), Point2(1, 0), Point2(2, 0)) is Orientation.COLLINEAR

    def test_right(self):
        assert orient(Point2(0, 0), Point2(0, 1), Point2(1, 1)) is Orientation.RIGHT

    def test_tolerance_scales_with_coordinates(self):
        # cross product 1e-3 against scale 1e10
        assert orient(Point2(0, 0), Point2(1e10, 0), Point2(2e10, 1e-13)) is Orientation.COLLINEAR


class TestInsertAdjacent:

    def test_first_step_makes_a_segment(self):
        hull = ConvexPolygon(ORIGIN)
        insert_adjacent(hull, Point2(1, 0))
        assert hull.size == 2
        assert hull.cursor == Point2(1, 0)
        assert sorted(hull.vertices()) == [Point2(0, 0), Point2(1, 0)]

    def test_point_outside_one_edge_is_added(self):
        hull = square(cursor=1)
        hull.insert_adjacent(Point2(2, 0.5))
        assert hull.cursor == Point2(2, 0.5)
        assert hull.vertices() == [Point2(2, 0.5), Point2(1, 1), Point2(0, 1), Point2(0, 0), Point2(1, 0)]
        assert hull.removals == 0

    def test_far_point_beside_one_edge_keeps_every_corner(self):
        hull = square(cursor=1)
        hull.insert_adjacent(Point2(5, 0.5))
        assert hull.size == 5
        assert same_vertex_set(hull, hull_of(SQUARE + [Point2(5, 0.5)]))

    def test_point_beyond_two_edges_removes_the_corner_between(self):
        hull = square(cursor=1)
        hull.insert_adjacent(Point2(3, -0.5))
        assert hull.vertices() == [Point2(3, -0.5), Point2(1, 1), Point2(0, 1), Point2(0, 0)]
        assert hull.removals == 1

    def test_collinear_extension_of_segment(self):
        hull = ConvexPolygon(ORIGIN).insert_adjacent(Point2(1, 0))
        hull.insert_adjacent(Point2(2, 0))
        assert sorted(hull.vertices()) == [Point2(0, 0), Point2(2, 0)]
        assert hull.cursor == Point2(2, 0)

    def test_point_inside_segment_is_rejected(self):
        hull = ConvexPolygon(ORIGIN).insert_adjacent(Point2(1, 0))
        with pytest.raises(HullPreconditionError):
            hull.insert_adjacent(Point2(0.5, 0))

    def test_interior_point_is_rejected(self):
        with pytest.raises(HullPreconditionError):
            square(cursor=2).insert_adjacent(Point2(0.5, 0.5))

    def test_duplicate_of_singleton_is_rejected(self):
        with pytest.raises(HullPreconditionError):
            ConvexPolygon(ORIGIN).insert_adjacent(ORIGIN)

    def test_collinear_tangent_vertex_is_dropped(self):
        hull = square(cursor=1)
        # (2, 0) continues the bottom edge, so (1, 0) stops being extreme
        hull.insert_adjacent(Point2(2, 0))
        assert sorted(hull.vertices()) == [Point2(0, 0), Point2(0, 1), Point2(1, 1), Point2(2, 0)]


class TestInteriorAngle:

    @pytest.mark.parametrize("cursor", range(4))
    def test_square_corner(self, cursor):
        assert interior_angle_at_cursor(square(cursor)) == pytest.approx(math.pi / 2)

    def test_equilateral_triangle(self):
        triangle = ConvexPolygon.from_vertices([Point2(0, 0), Point2(1, 0), Point2(0.5, math.sqrt(3) / 2)], cursor=2)
        assert interior_angle_at_cursor(triangle) == pytest.approx(math.pi / 3)

    def test_apex(self):
        hull = ConvexPolygon.from_vertices([Point2(0, 0), Point2(2, 0), Point2(1, 1)], cursor=2)
        assert interior_angle_at_cursor(hull) == pytest.approx(math.pi / 2)

    def test_segment_is_degenerate(self):
        with pytest.raises(DegenerateHullError):
            interior_angle_at_cursor(ConvexPolygon(ORIGIN).insert_adjacent(Point2(1, 0)))


class TestDiagnostics:

    def test_segment_is_degenerate(self):
        with pytest.raises(DegenerateHullError):
            diagnostics(ConvexPolygon(ORIGIN).insert_adjacent(Point2(1, 0)))

    def test_cursor_at_origin(self):
        hull = ConvexPolygon.from_vertices([Point2(0, 0), Point2(1, 0), Point2(0, 1)], cursor=0)
        with pytest.raises(UndefinedAngleError):
            diagnostics(hull)

    def test_triangle_arc_identity(self):
        hull = ConvexPolygon.from_vertices([Point2(0, 0), Point2(1, 0), Point2(0.5, 0.5)], cursor=1)
        diag = diagnostics(hull)
        assert diag.big_r == pytest.approx(1.0)
        assert diag.d == pytest.approx(0.0)
        assert diag.alpha == pytest.approx(math.pi)
        assert diag.alpha_prime == pytest.approx(3 * math.pi / 4)
        assert diag.alpha + diag.alpha_prime == pytest.approx(2 * math.pi - diag.interior_angle, abs=1e-9)

    def test_ranges(self):
        hull = ConvexPolygon.from_vertices([Point2(-1, -1), Point2(2, -0.5), Point2(1.5, 1), Point2(-0.5, 2)], cursor=2)
        diag = diagnostics(hull)
        assert diag.d >= 0
        assert 0 <= diag.alpha <= math.pi
        assert 0 <= diag.alpha_prime <= math.pi

    def test_running_radius_is_used(self):
        hull = square(cursor=2)
        diag = diagnostics(hull, big_r=5.0)
        assert diag.d == pytest.approx(5.0 - math.sqrt(2))


class TestFarthestFromLine:

    def test_right_angle_path(self):
        hull = hull_of([Point2(0, 0), Point2(1, 0), Point2(1, 1)])
        assert farthest_from_line(hull, Point2(0, 0), Point2(1, 1)) == pytest.approx(1 / math.sqrt(2))

    def test_collinear_path(self):
        hull = hull_of([Point2(0, 0), Point2(1, 1), Point2(3, 3)])
        assert farthest_from_line(hull, Point2(0, 0), Point2(3, 3)) == pytest.approx(0.0)

    def test_singleton(self):
        assert farthest_from_line(ConvexPolygon(ORIGIN), Point2(1, 0), Point2(1, 1)) == pytest.approx(1.0)

    def test_undefined_line(self):
        with pytest.raises(InvalidLineError):
            farthest_from_line(square(0), Point2(1, 1), Point2(1, 1))


class TestContains:

    def test_centroid(self):
        assert contains(square(0), Point2(0.5, 0.5))

    def test_far_exterior(self):
        assert not contains(square(0), Point2(2, 2))

    def test_boundary(self):
        assert contains(square(0), Point2(1, 0.5))

    def test_segment_and_point(self):
        segment = ConvexPolygon(ORIGIN).insert_adjacent(Point2(2, 0))
        assert contains(segment, Point2(1, 0))
        assert not contains(segment, Point2(1, 0.1))
        assert contains(ConvexPolygon(ORIGIN), ORIGIN)


def test_chains_of_square():
    upper, lower = chains(square(3))
    assert lower == [Point2(0, 0), Point2(1, 0)]
    assert upper == [Point2(0, 0), Point2(0, 1), Point2(1, 1), Point2(1, 0)]


def test_copy_is_independent():
    hull = square(1)
    clone = hull.copy()
    hull.insert_adjacent(Point2(3, -0.5))
    assert clone.size == 4
    assert clone.cursor == Point2(1, 0)
