"""
Standalone SVG figures written as plain markup: walk paths with their hull,
investor graphs with the upper and lower hull chains, and log-log scatters
with the fitted line.
"""
import math
from typing import List, Optional, Sequence, Tuple
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 640, 480
MARGIN = 60

Pair = Tuple[float, float]


def nice_ticks(lo: float, hi: float, count: int = 5) -> List[float]:
    """Round tick values covering [lo, hi]"""
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        return [lo] if math.isfinite(lo) else []
    raw = (hi - lo) / max(1, count)
    magnitude = 10.0 ** math.floor(math.log10(raw))
    step = next(m * magnitude for m in (1, 2, 5, 10) if m * magnitude >= raw)
    first = math.ceil(lo / step) * step
    return [float(v) for v in np.arange(first, hi + step * 1e-9, step)]


class SvgCanvas:
    def __init__(self, bounds: Tuple[float, float, float, float], title: str = "", equal_aspect: bool = False):
        x_lo, x_hi, y_lo, y_hi = bounds
        if x_hi <= x_lo:
            x_lo, x_hi = x_lo - 1.0, x_hi + 1.0
        if y_hi <= y_lo:
            y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
        if equal_aspect:
            span = max(x_hi - x_lo, (y_hi - y_lo) * (WIDTH - 2 * MARGIN) / (HEIGHT - 2 * MARGIN))
            cx, cy = (x_lo + x_hi) / 2, (y_lo + y_hi) / 2
            x_lo, x_hi = cx - span / 2, cx + span / 2
            y_span = span * (HEIGHT - 2 * MARGIN) / (WIDTH - 2 * MARGIN)
            y_lo, y_hi = cy - y_span / 2, cy + y_span / 2

        self.bounds = (x_lo, x_hi, y_lo, y_hi)
        self.title = title
        self.elements: List[str] = []

    def px(self, x: float, y: float) -> Pair:
        x_lo, x_hi, y_lo, y_hi = self.bounds
        u = MARGIN + (x - x_lo) / (x_hi - x_lo) * (WIDTH - 2 * MARGIN)
        v = HEIGHT - MARGIN - (y - y_lo) / (y_hi - y_lo) * (HEIGHT - 2 * MARGIN)
        return round(u, 2), round(v, 2)

    def _coords(self, points: Sequence[Pair]) -> str:
        return " ".join("%g,%g" % self.px(x, y) for x, y in points)

    def polyline(self, points: Sequence[Pair], css: str, stroke: str, element_id: Optional[str] = None) -> None:
        if not points:
            return
        ident = f' id="{element_id}"' if element_id else ""
        self.elements.append(
            f'<polyline{ident} class="{css}" fill="none" stroke="{stroke}" stroke-width="1" '
            f'points="{self._coords(points)}"/>'
        )

    def polygon(self, points: Sequence[Pair], css: str, stroke: str, element_id: Optional[str] = None) -> None:
        if not points:
            return
        ident = f' id="{element_id}"' if element_id else ""
        self.elements.append(
            f'<polygon{ident} class="{css}" fill="{stroke}" fill-opacity="0.08" stroke="{stroke}" '
            f'stroke-width="1.5" points="{self._coords(points)}"/>'
        )

    def dots(self, points: Sequence[Pair], css: str, fill: str) -> None:
        for x, y in points:
            u, v = self.px(x, y)
            self.elements.append(f'<circle class="{css}" cx="{u:g}" cy="{v:g}" r="2.5" fill="{fill}"/>')

    def segment(self, start: Pair, end: Pair, css: str, stroke: str, element_id: str, data: str = "") -> None:
        (u1, v1), (u2, v2) = self.px(*start), self.px(*end)
        self.elements.append(
            f'<line id="{element_id}" class="{css}" x1="{u1:g}" y1="{v1:g}" x2="{u2:g}" y2="{v2:g}" '
            f'stroke="{stroke}" stroke-width="1.5"{data}/>'
        )

    def axes(self, x_label: str, y_label: str, log_labels: bool = False) -> None:
        x_lo, x_hi, y_lo, y_hi = self.bounds
        left, bottom = MARGIN, HEIGHT - MARGIN
        self.elements.append(
            f'<g class="axes" stroke="black" stroke-width="1">'
            f'<line x1="{left}" y1="{bottom}" x2="{WIDTH - MARGIN}" y2="{bottom}"/>'
            f'<line x1="{left}" y1="{bottom}" x2="{left}" y2="{MARGIN}"/></g>'
        )

        def label(value: float) -> str:
            return f"1e{value:g}" if log_labels else f"{value:g}"

        for tick in nice_ticks(x_lo, x_hi):
            u, _ = self.px(tick, y_lo)
            self.elements.append(
                f'<g class="tick"><line x1="{u:g}" y1="{bottom}" x2="{u:g}" y2="{bottom + 5}" stroke="black"/>'
                f'<text x="{u:g}" y="{bottom + 18}" font-size="11" text-anchor="middle">{label(tick)}</text></g>'
            )
        for tick in nice_ticks(y_lo, y_hi):
            _, v = self.px(x_lo, tick)
            self.elements.append(
                f'<g class="tick"><line x1="{left - 5}" y1="{v:g}" x2="{left}" y2="{v:g}" stroke="black"/>'
                f'<text x="{left - 8}" y="{v + 4:g}" font-size="11" text-anchor="end">{label(tick)}</text></g>'
            )
        self.elements.append(
            f'<text x="{WIDTH / 2:g}" y="{HEIGHT - 15}" font-size="12" text-anchor="middle">{escape(x_label)}</text>'
        )
        self.elements.append(
            f'<text x="15" y="{HEIGHT / 2:g}" font-size="12" text-anchor="middle" '
            f'transform="rotate(-90 15 {HEIGHT / 2:g})">{escape(y_label)}</text>'
        )

    def render(self) -> str:
        title = f'<text x="{WIDTH / 2:g}" y="25" font-size="14" text-anchor="middle">{escape(self.title)}</text>'
        body = "\n".join(self.elements)
        return (
            f'<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}">\n'
            f'<rect width="100%" height="100%" fill="white"/>\n{title}\n{body}\n</svg>\n'
        )


def _bounds(points: Sequence[Pair]) -> Tuple[float, float, float, float]:
    finite = [(x, y) for x, y in points if math.isfinite(x) and math.isfinite(y)]
    if not finite:
        return 0.0, 1.0, 0.0, 1.0
    xs, ys = [p[0] for p in finite], [p[1] for p in finite]
    return min(xs), max(xs), min(ys), max(ys)


def walk_svg(path: Sequence[Pair], hull: Sequence[Pair], title: str = "Rancher walk") -> str:
    """Path polyline with the hull polygon overlaid"""
    canvas = SvgCanvas(_bounds(list(path) + list(hull)), title, equal_aspect=True)
    canvas.axes("x", "y")
    canvas.polygon(hull, "hull", "#1f77b4", element_id="hull")
    canvas.polyline(path, "path", "#d62728", element_id="path")
    return canvas.render()


def investor_svg(
        graph: Sequence[Pair],
        upper: Sequence[Pair],
        lower: Sequence[Pair],
        title: str = "Extremal investor"
) -> str:
    """Log-price graph with the upper and lower chains of its hull"""
    canvas = SvgCanvas(_bounds(graph), title)
    canvas.axes("n", "log price")
    canvas.polyline(upper, "upper-chain", "#2ca02c", element_id="upper-chain")
    canvas.polyline(lower, "lower-chain", "#9467bd", element_id="lower-chain")
    canvas.polyline(graph, "path", "#d62728", element_id="path")
    return canvas.render()


def loglog_svg(points: Sequence[Pair], slope: float, intercept: float, title: str = "Width scaling") -> str:
    """log10 scatter of (n, w) with the fitted regression line"""
    logged = [(math.log10(n), math.log10(w)) for n, w in points if n > 0 and w > 0]
    canvas = SvgCanvas(_bounds(logged), title)
    canvas.axes("n", "width", log_labels=True)
    canvas.dots(logged, "point", "#1f77b4")
    if logged:
        x1, x2 = min(p[0] for p in logged), max(p[0] for p in logged)
        y1, y2 = intercept + slope * x1, intercept + slope * x2
        data = f' data-x1="{x1!r}" data-y1="{y1!r}" data-x2="{x2!r}" data-y2="{y2!r}" data-slope="{slope!r}"'
        canvas.segment((x1, y1), (x2, y2), "fit", "#d62728", "fit", data)
    return canvas.render()
