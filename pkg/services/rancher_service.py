import math
from dataclasses import dataclass
from typing import FrozenSet, List, Optional, Sequence, Tuple

from loguru import logger

from services.errors import DegenerateHullError, RancherError, UsageError
from services.geometry_service import (
    ORIGIN,
    TWO_PI,
    ConvexPolygon,
    HullDiagnostics,
    Point2,
    diagnostics,
    farthest_from_line,
    interior_angle_at_cursor,
)
from services.records import SampleRecord
from services.rng_service import RandomStream, derive


@dataclass
class RancherState:
    hull: ConvexPolygon
    n: int = 0
    beta: Optional[float] = None
    gain: Optional[float] = None
    big_r: float = 0.0
    path: Optional[List[Point2]] = None

    @classmethod
    def start(cls, keep_path: bool = False) -> "RancherState":
        return cls(hull=ConvexPolygon(ORIGIN), path=[ORIGIN] if keep_path else None)

    @property
    def position(self) -> Point2:
        return self.hull.cursor

    @property
    def norm(self) -> float:
        p = self.hull.cursor
        return math.hypot(p.x, p.y)

    def diagnostics(self) -> Optional[HullDiagnostics]:
        """Diagnostics about the origin, or None while the hull has no interior"""
        if self.hull.is_degenerate() or self.position == ORIGIN:
            return None
        # a state built around an existing hull has no running maximum yet
        big_r = self.big_r if self.big_r >= self.norm else None
        try:
            return diagnostics(self.hull, ORIGIN, big_r=big_r)
        except DegenerateHullError:
            return None


def _wrap(angle: float) -> float:
    """Map an angle to (-pi, pi]"""
    wrapped = math.remainder(angle, TWO_PI)
    return math.pi if wrapped == -math.pi else wrapped


class RancherService:
    """Walk conditioned so that no unit step enters the interior of the hull of its past"""

    def __init__(self, keep_path: bool = False):
        self.keep_path = keep_path
        self.last_state: Optional[RancherState] = None

    def allowed_arc(self, state: RancherState) -> Tuple[float, float]:
        """
        (start angle, measure) of the legal step directions, counterclockwise from start.

        The hull lies inside the cone at the cursor spanned by the directions to its two
        neighbours, so a unit step outside that cone never meets the interior, while any
        direction strictly inside it enters the interior at once.
        """
        hull = state.hull
        if hull.is_degenerate():
            return 0.0, TWO_PI
        try:
            interior = interior_angle_at_cursor(hull)
        except DegenerateHullError:
            return 0.0, TWO_PI

        x = hull.cursor
        cw, _ = hull.neighbors()
        start = math.atan2(cw.y - x.y, cw.x - x.x)
        return start, TWO_PI - interior

    def step(self, state: RancherState, stream: RandomStream) -> RancherState:
        start, measure = self.allowed_arc(state)
        theta = start + stream.uniform(0.0, measure)

        here = state.position
        norm_before = math.hypot(here.x, here.y)
        there = Point2(here.x + math.cos(theta), here.y + math.sin(theta))

        state.hull.insert_adjacent(there)
        state.n += 1

        # beta is measured from the outward direction, positive counterclockwise
        state.beta = None if norm_before == 0.0 else _wrap(theta - math.atan2(here.y, here.x))
        norm_after = math.hypot(there.x, there.y)
        state.gain = norm_after - norm_before
        if norm_after > state.big_r:
            state.big_r = norm_after
        if state.path is not None:
            state.path.append(there)
        return state

    def record(self, state: RancherState, record_beta: bool = False) -> SampleRecord:
        position = state.position
        at_origin = position == ORIGIN

        width = None if at_origin else farthest_from_line(state.hull, ORIGIN, position)
        diag = state.diagnostics()
        extras = {
            "x": position.x,
            "y": position.y,
            "alpha": diag.alpha if diag else None,
            "alpha_prime": diag.alpha_prime if diag else None,
            "d": diag.d if diag else None,
            "hull_size": float(state.hull.size),
        }
        if record_beta:
            extras["beta"] = state.beta

        return SampleRecord(
            n=state.n,
            norm=state.norm,
            width=width,
            direction=None if at_origin else math.atan2(position.y, position.x),
            extras=extras,
        )

    def run(
            self,
            steps: int,
            seed: int,
            checkpoints: Optional[Sequence[int]] = None,
            record_beta: bool = False,
            index: int = 0
    ) -> List[SampleRecord]:
        """Run one walk and record observables at the given step counts (every step by default)"""
        marks = checkpoint_set(steps, checkpoints)
        stream = derive(seed, index)
        state = RancherState.start(keep_path=self.keep_path)

        records: List[SampleRecord] = []
        try:
            if 0 in marks:
                records.append(self.record(state, record_beta))
            for _ in range(steps):
                self.step(state, stream)
                if state.n in marks:
                    records.append(self.record(state, record_beta))
        except RancherError as e:
            logger.error(f"Rancher walk (seed={seed}, index={index}) failed at step {state.n}: {e}")
            raise

        logger.debug(
            f"Rancher walk seed={seed} index={index}: {steps} steps, hull size {state.hull.size}, "
            f"{state.hull.removals} removals"
        )
        self.last_state = state
        return records

    def walk(self, steps: int, seed: int, index: int = 0) -> RancherState:
        """Run a walk without recording and return the final state"""
        stream = derive(seed, index)
        state = RancherState.start(keep_path=self.keep_path)
        for _ in range(steps):
            self.step(state, stream)
        return state


def checkpoint_set(steps: int, checkpoints: Optional[Sequence[int]]) -> FrozenSet[int]:
    if checkpoints is None:
        return frozenset(range(steps + 1))
    marks = list(checkpoints)
    if any(b <= a for a, b in zip(marks, marks[1:])):
        raise UsageError("Checkpoints must be strictly increasing")
    if marks and (marks[0] < 0 or marks[-1] > steps):
        raise UsageError(f"Checkpoints must lie in [0, {steps}]")
    return frozenset(marks)
