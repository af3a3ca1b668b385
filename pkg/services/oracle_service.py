"""
Slow reference implementations for tests and --validate runs.

They share the geometry tolerance so that a disagreement points at logic,
not at the epsilon policy.
"""
import math
from typing import List, Sequence, Tuple

from services.geometry_service import EPS_GEOM, ConvexPolygon, Point2, point_line_distance, turn


def hull_of(points: Sequence[Point2]) -> ConvexPolygon:
    """Monotone-chain hull, counterclockwise, collinear points dropped"""
    if not points:
        raise ValueError("hull_of needs at least one point")

    unique = sorted({Point2(float(p[0]), float(p[1])) for p in points})
    if len(unique) == 1:
        return ConvexPolygon(unique[0])

    def half(chain_points: Sequence[Point2]) -> List[Point2]:
        chain: List[Point2] = []
        for p in chain_points:
            while len(chain) >= 2 and turn(chain[-2], chain[-1], p) <= 0:
                chain.pop()
            chain.append(p)
        return chain

    lower = half(unique)
    upper = half(list(reversed(unique)))
    vertices = lower[:-1] + upper[:-1]
    return ConvexPolygon.from_vertices(vertices)


def same_vertex_set(first: ConvexPolygon, second: ConvexPolygon, tol: float = 1e-9) -> bool:
    a, b = sorted(first.vertices()), sorted(second.vertices())
    if len(a) != len(b):
        return False
    return all(abs(p.x - q.x) <= tol and abs(p.y - q.y) <= tol for p, q in zip(a, b))


def segment_hits_interior(hull: ConvexPolygon, a: Point2, b: Point2) -> bool:
    """
    Whether the open segment (a, b) meets the open interior of the hull.

    Clips the parameter interval (0, 1) against every edge half-plane; the
    segment hits the interior when a piece of positive length survives
    strictly inside all of them.
    """
    vertices = hull.vertices()
    count = len(vertices)
    if count < 3:
        return False

    scale = max(max(abs(v.x), abs(v.y)) for v in vertices)
    scale = max(scale, abs(a.x), abs(a.y), abs(b.x), abs(b.y))
    slack = EPS_GEOM * scale

    t_lo, t_hi = 0.0, 1.0
    for i in range(count):
        u, w = vertices[i], vertices[(i + 1) % count]
        ex, ey = w.x - u.x, w.y - u.y
        # signed area of (u, w, a + t (b - a)), positive inside
        g0 = ex * (a.y - u.y) - ey * (a.x - u.x)
        g1 = ex * (b.y - u.y) - ey * (b.x - u.x)
        slope = g1 - g0
        if slope == 0.0:
            if g0 <= slack:
                return False
            continue
        t_cross = (slack - g0) / slope
        if slope > 0:
            t_lo = max(t_lo, t_cross)
        else:
            t_hi = min(t_hi, t_cross)
        if t_hi - t_lo <= 0.0:
            return False

    return t_hi - t_lo > 0.0


def naive_rates(xs: Sequence[float]) -> Tuple[float, float]:
    """(r_max, r_min) at the last time by scanning every past point"""
    if len(xs) < 2:
        raise ValueError("naive_rates needs at least two values")
    n = len(xs) - 1
    slopes = [(xs[n] - xs[m]) / (n - m) for m in range(n)]
    return max(slopes), min(slopes)


def naive_width_path(path: Sequence[Point2], a: Point2, b: Point2) -> float:
    if a == b:
        raise ValueError(f"Line through {a} and {b} is undefined")
    return max(point_line_distance(p, a, b) for p in path)


def naive_chord_width(xs: Sequence[float]) -> float:
    """Largest |x_m - (m / n) x_n| over the whole path"""
    if len(xs) < 2:
        raise ValueError("naive_chord_width needs at least two values")
    n = len(xs) - 1
    return max(abs(xs[m] - m / n * xs[n]) for m in range(n + 1))


def unit_steps(path: Sequence[Point2]) -> float:
    """Largest deviation of a step length from 1"""
    return max((abs(math.hypot(q.x - p.x, q.y - p.y) - 1.0) for p, q in zip(path, path[1:])), default=0.0)
