import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from loguru import logger

from config import app_settings
from services.errors import NoPastError
from services.geometry_service import ORIGIN, ConvexPolygon, Point2
from services.rancher_service import checkpoint_set
from services.records import SampleRecord
from services.rng_service import RandomStream, derive


@dataclass
class InvestorState:
    graph_hull: ConvexPolygon
    alpha: float = 0.0
    n: int = 0
    x: float = 0.0
    blown_up: bool = False
    path: Optional[List[float]] = None

    @classmethod
    def start(cls, alpha: float, keep_path: bool = False) -> "InvestorState":
        if alpha < 0:
            raise ValueError(f"Influence parameter must be nonnegative, got {alpha}")
        return cls(graph_hull=ConvexPolygon(ORIGIN), alpha=alpha, path=[0.0] if keep_path else None)


class InvestorService:
    """
    Log-price walk with Gaussian noise and drift alpha * (r_max + r_min) / 2.

    The graph points (m, x_m) are kept in a ConvexPolygon whose cursor is the
    present point. A new point always has the largest abscissa, so it is
    reachable from the cursor and insert_adjacent applies unchanged.
    """

    def __init__(self, keep_path: bool = False, blowup_limit: Optional[float] = None):
        self.keep_path = keep_path
        self.blowup_limit = blowup_limit or app_settings.RANCHER_BLOWUP_LIMIT
        self.last_state: Optional[InvestorState] = None

    def extremal_rates(self, state: InvestorState) -> Tuple[float, float]:
        """Extreme slopes from past graph points to the present one, scanned over hull vertices"""
        if state.n == 0:
            raise NoPastError("Extremal rates need at least one past point")

        present = state.graph_hull.cursor
        slopes = [
            (present.y - v.y) / (present.x - v.x)
            for v in state.graph_hull.vertices()[1:]
        ]
        return max(slopes), min(slopes)

    def width(self, state: InvestorState) -> float:
        """Largest deviation of the graph from the chord (0, 0) -> (n, x_n)"""
        if state.n == 0:
            raise NoPastError("Width needs at least one past point")

        n, xn = float(state.n), state.x
        return max(abs(v.y - v.x / n * xn) for v in state.graph_hull.vertices())

    def step(self, state: InvestorState, stream: RandomStream) -> InvestorState:
        drift = 0.0
        if state.n >= 1 and state.alpha != 0.0:
            rmax, rmin = self.extremal_rates(state)
            drift = state.alpha * (rmax + rmin) / 2.0

        x_next = state.x + drift + stream.gaussian()
        state.n += 1
        state.x = x_next

        if not math.isfinite(x_next) or abs(x_next) > self.blowup_limit:
            state.blown_up = True
            return state

        state.graph_hull.insert_adjacent(Point2(float(state.n), x_next))
        if state.path is not None:
            state.path.append(x_next)
        return state

    def record(self, state: InvestorState) -> SampleRecord:
        if state.blown_up:
            return SampleRecord(
                n=state.n,
                norm=abs(state.x) if math.isfinite(state.x) else math.inf,
                extras={"x": state.x if math.isfinite(state.x) else None, "rmax": None, "rmin": None, "ratio": None},
                status="blowup",
            )
        if state.n == 0:
            return SampleRecord(n=0, norm=0.0, width=None, extras={"x": 0.0, "rmax": None, "rmin": None, "ratio": None})

        rmax, rmin = self.extremal_rates(state)
        return SampleRecord(
            n=state.n,
            norm=abs(state.x),
            width=self.width(state),
            extras={"x": state.x, "rmax": rmax, "rmin": rmin, "ratio": state.x / state.n},
        )

    def run(
            self,
            steps: int,
            alpha: float,
            seed: int,
            checkpoints: Optional[Sequence[int]] = None,
            index: int = 0
    ) -> List[SampleRecord]:
        """Run one walk; a blow-up ends it early with a marker record"""
        marks = checkpoint_set(steps, checkpoints)
        stream = derive(seed, index)
        state = InvestorState.start(alpha, keep_path=self.keep_path)

        records: List[SampleRecord] = []
        if 0 in marks:
            records.append(self.record(state))
        for _ in range(steps):
            self.step(state, stream)
            if state.blown_up:
                logger.info(f"Investor walk alpha={alpha} seed={seed} index={index} blew up at n={state.n}")
                records.append(self.record(state))
                break
            if state.n in marks:
                records.append(self.record(state))

        self.last_state = state
        return records

    def walk(self, steps: int, alpha: float, seed: int, index: int = 0) -> InvestorState:
        """Run a walk without recording; stops at a blow-up"""
        stream = derive(seed, index)
        state = InvestorState.start(alpha, keep_path=self.keep_path)
        for _ in range(steps):
            self.step(state, stream)
            if state.blown_up:
                break
        return state
