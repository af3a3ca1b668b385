import math
from enum import Enum
from typing import Dict, Iterator, List, NamedTuple, Optional, Sequence, Tuple

from loguru import logger

from config import app_settings
from services.errors import (
    DegenerateHullError,
    HullPreconditionError,
    InvalidLineError,
    UndefinedAngleError,
)

EPS_GEOM: float = app_settings.RANCHER_EPS_GEOM
TWO_PI = 2.0 * math.pi


class Point2(NamedTuple):
    x: float
    y: float


ORIGIN = Point2(0.0, 0.0)


class Orientation(str, Enum):
    LEFT = "left"
    RIGHT = "right"
    COLLINEAR = "collinear"


class HullDiagnostics(NamedTuple):
    """Angles (radians) and distances describing the cursor relative to the enclosing circle"""
    alpha: float
    alpha_prime: float
    d: float
    big_r: float
    interior_angle: float


def turn(a: Point2, b: Point2, c: Point2) -> int:
    """+1 for a left turn, -1 for a right turn, 0 within the collinearity tolerance"""
    cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    scale = max(abs(a[0]), abs(a[1]), abs(b[0]), abs(b[1]), abs(c[0]), abs(c[1]))
    if abs(cross) <= EPS_GEOM * scale:
        return 0
    return 1 if cross > 0 else -1


def orient(a: Point2, b: Point2, c: Point2) -> Orientation:
    """Sign of (b - a) x (c - a)"""
    sign = turn(a, b, c)
    if sign > 0:
        return Orientation.LEFT
    if sign < 0:
        return Orientation.RIGHT
    return Orientation.COLLINEAR


def _on_segment(a: Point2, b: Point2, p: Point2) -> bool:
    """p collinear with a, b lies within the closed segment"""
    return (
        min(a[0], b[0]) - EPS_GEOM <= p[0] <= max(a[0], b[0]) + EPS_GEOM
        and min(a[1], b[1]) - EPS_GEOM <= p[1] <= max(a[1], b[1]) + EPS_GEOM
    )


def _sees(a: Point2, b: Point2, p: Point2) -> bool:
    """Edge a->b of a counterclockwise hull is visible from p (collinear beyond the edge counts)"""
    side = turn(a, b, p)
    return side < 0 or (side == 0 and not _on_segment(a, b, p))


def _angle_between(ux: float, uy: float, vx: float, vy: float) -> float:
    """Unsigned angle in [0, pi] between two nonzero vectors"""
    return math.atan2(abs(ux * vy - uy * vx), ux * vx + uy * vy)


class ConvexPolygon:
    """
    Convex hull stored as a doubly linked counterclockwise cycle with a cursor.

    The cursor is the walker's vertex. Points are only ever added next to it,
    so insertion walks outward from the cursor and removes the vertices that
    stop being extreme; each vertex is removed at most once.
    """

    def __init__(self, start: Point2):
        self._points: Dict[int, Point2] = {0: Point2(float(start[0]), float(start[1]))}
        self._next: Dict[int, int] = {0: 0}
        self._prev: Dict[int, int] = {0: 0}
        self._cursor = 0
        self._serial = 1
        self.insertions = 0
        self.removals = 0

    @classmethod
    def from_vertices(cls, vertices: Sequence[Point2], cursor: int = 0) -> "ConvexPolygon":
        """Build from vertices already in counterclockwise order"""
        if not vertices:
            raise ValueError("A polygon needs at least one vertex")

        polygon = cls(vertices[0])
        ids = [0]
        for vertex in vertices[1:]:
            ids.append(polygon._add(Point2(float(vertex[0]), float(vertex[1]))))

        count = len(ids)
        for i, node in enumerate(ids):
            polygon._next[node] = ids[(i + 1) % count]
            polygon._prev[node] = ids[(i - 1) % count]
        polygon._cursor = ids[cursor % count]
        return polygon

    def _add(self, p: Point2) -> int:
        node = self._serial
        self._serial += 1
        self._points[node] = p
        return node

    def _drop(self, node: int) -> None:
        before, after = self._prev[node], self._next[node]
        self._next[before] = after
        self._prev[after] = before
        del self._points[node], self._next[node], self._prev[node]
        self.removals += 1

    def _link_after(self, before: int, node: int) -> None:
        after = self._next[before]
        self._next[before] = node
        self._prev[node] = before
        self._next[node] = after
        self._prev[after] = node

    @property
    def size(self) -> int:
        return len(self._points)

    @property
    def cursor(self) -> Point2:
        return self._points[self._cursor]

    def neighbors(self) -> Tuple[Point2, Point2]:
        """(clockwise, counterclockwise) neighbors of the cursor"""
        return self._points[self._prev[self._cursor]], self._points[self._next[self._cursor]]

    def vertices(self) -> List[Point2]:
        """Counterclockwise vertex list starting at the cursor"""
        return list(self._iter_from(self._cursor))

    def _iter_from(self, start: int) -> Iterator[Point2]:
        node = start
        while True:
            yield self._points[node]
            node = self._next[node]
            if node == start:
                return

    def is_degenerate(self) -> bool:
        return len(self._points) < 3

    def copy(self) -> "ConvexPolygon":
        return ConvexPolygon.from_vertices(self.vertices(), cursor=0)

    def insert_adjacent(self, p: Point2) -> "ConvexPolygon":
        """
        Add p, reachable from the cursor without entering the interior, and move the cursor to it.
        """
        p = Point2(float(p[0]), float(p[1]))
        size = len(self._points)
        c = self._cursor

        if size == 1:
            if p == self._points[c]:
                raise HullPreconditionError(f"Point {p} duplicates the only vertex")
            node = self._add(p)
            self._link_after(c, node)
        elif size == 2:
            node = self._insert_into_segment(p)
        else:
            node = self._insert_into_polygon(p)

        self._cursor = node
        self.insertions += 1
        return self

    def _insert_into_segment(self, p: Point2) -> int:
        c = self._cursor
        other = self._next[c]
        a, b = self._points[c], self._points[other]
        side = turn(a, b, p)

        if side != 0:
            node = self._add(p)
            # counterclockwise order is a -> b -> p when p is left of a->b
            self._link_after(other if side > 0 else c, node)
            return node

        if _on_segment(a, b, p):
            raise HullPreconditionError(f"Point {p} lies inside the segment hull {a}-{b}")

        # collinear beyond one end: the endpoint between the other two drops out
        keep = other if _on_segment(p, b, a) else c
        drop = c if keep == other else other
        node = self._add(p)
        self._link_after(keep, node)
        self._drop(drop)
        return node

    def _insert_into_polygon(self, p: Point2) -> int:
        pts, nxt, prv = self._points, self._next, self._prev
        c = self._cursor
        size = len(pts)

        # walk counterclockwise over the edges visible from p
        hi, steps = c, 0
        while _sees(pts[hi], pts[nxt[hi]], p):
            hi = nxt[hi]
            steps += 1
            if steps >= size:
                raise HullPreconditionError(f"Point {p} sees every edge of the hull")

        # and clockwise
        lo = c
        while _sees(pts[prv[lo]], pts[lo], p):
            lo = prv[lo]
            steps += 1
            if steps >= size:
                raise HullPreconditionError(f"Point {p} sees every edge of the hull")

        if lo == c and hi == c:
            cursor, ccw = pts[c], pts[nxt[c]]
            if turn(cursor, ccw, p) == 0 and _on_segment(cursor, ccw, p):
                before = c
            elif turn(pts[prv[c]], cursor, p) == 0 and _on_segment(pts[prv[c]], cursor, p):
                before = prv[c]
            else:
                raise HullPreconditionError(f"Point {p} is not reachable from cursor {cursor}")
            logger.debug(f"Point {p} lands on a hull edge; kept as a vertex")
            node = self._add(p)
            self._link_after(before, node)
            return node

        node_after = nxt[lo]
        while node_after != hi:
            following = nxt[node_after]
            self._drop(node_after)
            node_after = following

        node = self._add(p)
        self._link_after(lo, node)

        # tangent vertices collinear with p are no longer extreme
        while len(pts) > 3 and turn(pts[prv[lo]], pts[lo], p) == 0:
            before = prv[lo]
            self._drop(lo)
            lo = before
        while len(pts) > 3 and turn(p, pts[hi], pts[nxt[hi]]) == 0:
            after = nxt[hi]
            self._drop(hi)
            hi = after

        return node

    def __repr__(self) -> str:
        return f"ConvexPolygon(size={self.size}, cursor={self.cursor})"


def insert_adjacent(hull: ConvexPolygon, p: Point2) -> ConvexPolygon:
    return hull.insert_adjacent(p)


def interior_angle_at_cursor(hull: ConvexPolygon) -> float:
    """Angle of the polygon at the cursor, in (0, pi)"""
    if hull.is_degenerate():
        raise DegenerateHullError(f"Hull with {hull.size} vertices has no interior angle")

    x = hull.cursor
    cw, ccw = hull.neighbors()
    if turn(cw, x, ccw) == 0:
        raise DegenerateHullError("Hull has zero area at the cursor")
    return _angle_between(cw.x - x.x, cw.y - x.y, ccw.x - x.x, ccw.y - x.y)


def diagnostics(hull: ConvexPolygon, origin: Point2 = ORIGIN, big_r: Optional[float] = None) -> HullDiagnostics:
    """
    alpha, alpha_prime, d and the radius of the smallest origin-centred circle C holding the hull.

    y (clockwise side) is where the half-line from the cursor along its clockwise
    edge meets C; since y - x is parallel to that edge, the angle o-x-y is the
    angle between the edge and the direction to the origin. big_r may be passed in
    by callers that track the running maximum.
    """
    interior = interior_angle_at_cursor(hull)

    x = hull.cursor
    ox, oy = origin.x - x.x, origin.y - x.y
    if ox == 0.0 and oy == 0.0:
        raise UndefinedAngleError("Cursor coincides with the origin")

    if big_r is None:
        big_r = max(math.hypot(v.x - origin.x, v.y - origin.y) for v in hull.vertices())
    norm = math.hypot(ox, oy)

    cw, ccw = hull.neighbors()
    alpha = math.pi - _angle_between(ox, oy, cw.x - x.x, cw.y - x.y)
    alpha_prime = math.pi - _angle_between(ox, oy, ccw.x - x.x, ccw.y - x.y)

    return HullDiagnostics(
        alpha=alpha,
        alpha_prime=alpha_prime,
        d=max(0.0, big_r - norm),
        big_r=big_r,
        interior_angle=interior,
    )


def point_line_distance(p: Point2, a: Point2, b: Point2) -> float:
    dx, dy = b.x - a.x, b.y - a.y
    length = math.hypot(dx, dy)
    if length == 0.0:
        raise InvalidLineError(f"Line through {a} and {b} is undefined")
    return abs(dx * (p.y - a.y) - dy * (p.x - a.x)) / length


def farthest_from_line(hull: ConvexPolygon, a: Point2, b: Point2) -> float:
    """Largest distance of a hull vertex (hence of any hulled point) from the line through a and b"""
    if a == b:
        raise InvalidLineError(f"Line through {a} and {b} is undefined")
    return max(point_line_distance(v, a, b) for v in hull.vertices())


def contains(hull: ConvexPolygon, p: Point2) -> bool:
    """Closed containment with boundary slack"""
    vertices = hull.vertices()
    if len(vertices) == 1:
        v = vertices[0]
        return abs(v.x - p[0]) <= EPS_GEOM and abs(v.y - p[1]) <= EPS_GEOM
    if len(vertices) == 2:
        return turn(vertices[0], vertices[1], p) == 0 and _on_segment(vertices[0], vertices[1], p)

    count = len(vertices)
    return all(turn(vertices[i], vertices[(i + 1) % count], p) >= 0 for i in range(count))


def chains(hull: ConvexPolygon) -> Tuple[List[Point2], List[Point2]]:
    """(upper, lower) chains between the leftmost and rightmost vertices, both left to right"""
    vertices = hull.vertices()
    if len(vertices) == 1:
        return list(vertices), list(vertices)

    left = min(range(len(vertices)), key=lambda i: (vertices[i].x, vertices[i].y))
    ordered = vertices[left:] + vertices[:left]
    right = max(range(len(ordered)), key=lambda i: (ordered[i].x, -ordered[i].y))

    lower = ordered[: right + 1]
    upper = [ordered[0]] + list(reversed(ordered[right:]))
    return upper, lower
