"""
Empirical checks of the drift argument behind the rancher's positive speed.

The potential f(d, alpha, alpha') = d^{3/2} - min(c d^{1/2}, alpha d) - min(c d^{1/2}, alpha' d)
should drift down by a bounded-away-from-zero amount off A = {d < d_star} and rise
by at most a bounded amount on A. Conditional expectations given the past are
estimated by binning on observable state (d decade x angle band).
"""
import math
from collections import deque
from typing import Deque, Dict, Iterator, List, NamedTuple, Optional, Tuple

from loguru import logger
from pydantic import BaseModel, Field, field_validator

from config import app_settings
from services.ensemble_service import EnsembleRunner
from services.errors import DomainError
from services.geometry_service import HullDiagnostics
from services.rancher_service import RancherService, RancherState
from services.rng_service import derive

UNIT_SLACK = 1e-12

BinKey = Tuple[bool, int, str]


class DriftConfig(BaseModel):
    c: float = Field(default_factory=lambda: app_settings.RANCHER_DRIFT_C, gt=0)
    d_star: float = Field(default_factory=lambda: app_settings.RANCHER_DRIFT_DSTAR, gt=0)
    epsilon: float = Field(default_factory=lambda: app_settings.RANCHER_DRIFT_EPSILON)
    m: int = Field(default_factory=lambda: app_settings.RANCHER_DRIFT_M, ge=1)
    burn_in: int = Field(default_factory=lambda: app_settings.RANCHER_DRIFT_BURN_IN, ge=0)
    min_bin_samples: int = Field(default_factory=lambda: app_settings.RANCHER_DRIFT_MIN_BIN, ge=1)

    @field_validator("epsilon")
    @classmethod
    def epsilon_in_range(cls, value: float) -> float:
        if not 0 < value < math.pi / 2:
            raise ValueError(f"epsilon must lie in (0, pi/2), got {value}")
        return value


class DriftSample(NamedTuple):
    n: int
    d: float
    alpha: float
    alpha_prime: float
    f: float
    delta_f: float
    in_A: bool


def f_value(d: float, alpha: float, alpha_prime: float, cfg: Optional[DriftConfig] = None) -> float:
    if d < 0:
        raise DomainError(f"d must be nonnegative, got {d}")
    c = cfg.c if cfg is not None else app_settings.RANCHER_DRIFT_C
    root = math.sqrt(d)
    return d * root - min(c * root, alpha * d) - min(c * root, alpha_prime * d)


def f_lower_bound(c: float) -> float:
    """Magnitude of min over d of d^{3/2} - 2 c d^{1/2}, attained at d = 2c/3"""
    return 4.0 * c / 3.0 * math.sqrt(2.0 * c / 3.0)


def outward_gain(alpha: float, alpha_prime: float) -> float:
    """E cos(beta) for beta uniform on [-alpha, alpha']"""
    width = alpha + alpha_prime
    if width <= 0.0:
        return 1.0
    return (math.sin(alpha) + math.sin(alpha_prime)) / width


def alpha_band(alpha: float, alpha_prime: float, epsilon: float) -> str:
    low = min(alpha, alpha_prime)
    if low < epsilon:
        return "narrow"
    if low > math.pi - epsilon:
        return "wide"
    return "mid"


def d_decade(d: float) -> int:
    if d <= 0.0:
        return -3
    return max(-3, math.floor(math.log10(d)))


class Tally:
    """Count, sum, sum of squares and extremes; merged by addition"""

    __slots__ = ("count", "total", "total_sq", "peak", "floor")

    def __init__(self) -> None:
        self.count = 0
        self.total = 0.0
        self.total_sq = 0.0
        self.peak = -math.inf
        self.floor = math.inf

    def push(self, value: float) -> None:
        self.count += 1
        self.total += value
        self.total_sq += value * value
        if value > self.peak:
            self.peak = value
        if value < self.floor:
            self.floor = value

    def __add__(self, other: "Tally") -> "Tally":
        merged = Tally()
        merged.count = self.count + other.count
        merged.total = self.total + other.total
        merged.total_sq = self.total_sq + other.total_sq
        merged.peak = max(self.peak, other.peak)
        merged.floor = min(self.floor, other.floor)
        return merged

    def mean(self) -> float:
        return self.total / self.count if self.count else 0.0

    def stderr(self) -> float:
        if self.count < 2:
            return math.inf
        var = (self.total_sq - self.count * self.mean() ** 2) / (self.count - 1)
        return math.sqrt(max(var, 0.0) / self.count)


class SurveyTally:
    """Everything a set of walks contributes to the drift survey and the hypothesis checks"""

    def __init__(self) -> None:
        self.drift_bins: Dict[BinKey, Tally] = {}
        self.increment_bins: Dict[BinKey, Tally] = {}
        self.increments = Tally()
        self.gain_gap = Tally()
        self.lagged_on_A = Tally()
        self.delta_f_on_A = Tally()
        self.f_values = Tally()
        self.unit_violations = 0
        self.max_abs_increment = 0.0
        self.steps = 0
        self.degenerate = 0
        self.burn_in = 0
        self.in_A = 0

    def __add__(self, other: "SurveyTally") -> "SurveyTally":
        merged = SurveyTally()
        for name in ("drift_bins", "increment_bins"):
            left, right = getattr(self, name), getattr(other, name)
            target = getattr(merged, name)
            for key in sorted(set(left) | set(right)):
                target[key] = left.get(key, Tally()) + right.get(key, Tally())
        for name in ("increments", "gain_gap", "lagged_on_A", "delta_f_on_A", "f_values"):
            setattr(merged, name, getattr(self, name) + getattr(other, name))
        for name in ("unit_violations", "steps", "degenerate", "burn_in", "in_A"):
            setattr(merged, name, getattr(self, name) + getattr(other, name))
        merged.max_abs_increment = max(self.max_abs_increment, other.max_abs_increment)
        return merged


class _Step(NamedTuple):
    n: int
    x_now: float
    x_next: float
    gain: float
    diag_now: Optional[HullDiagnostics]
    diag_next: Optional[HullDiagnostics]


def _trace(steps: int, seed: int, index: int) -> Iterator[_Step]:
    service = RancherService()
    stream = derive(seed, index)
    state = RancherState.start()

    x_now, diag_now = 0.0, None
    for _ in range(steps):
        n = state.n
        service.step(state, stream)
        x_next, diag_next = state.norm, state.diagnostics()
        yield _Step(n, x_now, x_next, state.gain, diag_now, diag_next)
        x_now, diag_now = x_next, diag_next


def drift_samples(steps: int, seed: int, index: int = 0, cfg: Optional[DriftConfig] = None) -> Iterator[DriftSample]:
    """One sample per step whose hull is non-degenerate at both ends"""
    cfg = cfg or DriftConfig()
    for step in _trace(steps, seed, index):
        if step.diag_now is None or step.diag_next is None:
            continue
        now, after = step.diag_now, step.diag_next
        f_now = f_value(now.d, now.alpha, now.alpha_prime, cfg)
        f_next = f_value(after.d, after.alpha, after.alpha_prime, cfg)
        yield DriftSample(step.n, now.d, now.alpha, now.alpha_prime, f_now, f_next - f_now, now.d < cfg.d_star)


def survey_walk(steps: int, seed: int, index: int, cfg: DriftConfig) -> SurveyTally:
    """Tally one rancher walk"""
    tally = SurveyTally()
    # (time, X at that time, in_A flag if the time is surveyed)
    history: Deque[Tuple[int, float, Optional[bool]]] = deque()

    for step in _trace(steps, seed, index):
        tally.steps += 1
        dx = step.x_next - step.x_now
        tally.increments.push(dx)
        if abs(dx) > 1.0 + UNIT_SLACK:
            tally.unit_violations += 1
        tally.max_abs_increment = max(tally.max_abs_increment, abs(dx))

        flag: Optional[bool] = None
        now, after = step.diag_now, step.diag_next
        if now is not None:
            tally.f_values.push(f_value(now.d, now.alpha, now.alpha_prime, cfg))

        if now is None or after is None:
            tally.degenerate += 1
        elif step.n < cfg.burn_in:
            tally.burn_in += 1
        else:
            f_now = f_value(now.d, now.alpha, now.alpha_prime, cfg)
            delta_f = f_value(after.d, after.alpha, after.alpha_prime, cfg) - f_now
            flag = now.d < cfg.d_star
            key = (flag, d_decade(now.d), alpha_band(now.alpha, now.alpha_prime, cfg.epsilon))

            tally.drift_bins.setdefault(key, Tally()).push(delta_f)
            tally.increment_bins.setdefault(key, Tally()).push(dx)
            tally.gain_gap.push(step.gain - outward_gain(now.alpha, now.alpha_prime))
            if flag:
                tally.in_A += 1
                tally.delta_f_on_A.push(delta_f)

        history.append((step.n, step.x_now, flag))
        # X at time n + 1 completes the lag-m increment that started at n + 1 - m
        if history[0][0] == step.n + 1 - cfg.m:
            _, x_then, then_flag = history.popleft()
            if then_flag:
                tally.lagged_on_A.push(step.x_next - x_then)

    return tally


def survey(steps: int, reps: int, seed: int, cfg: Optional[DriftConfig] = None, threads: Optional[int] = None) -> SurveyTally:
    """Tally reps independent walks and merge in walk order"""
    cfg = cfg or DriftConfig()
    tasks = [
        (rep, {"steps": steps, "seed": seed, "index": rep, "cfg": cfg})
        for rep in range(reps)
    ]
    logger.info(f"Drift survey: {reps} walk(s) x {steps} steps, c={cfg.c}, d_star={cfg.d_star}, m={cfg.m}")
    merged = SurveyTally()
    for _, tally in EnsembleRunner(threads).map(survey_walk, tasks):
        merged = merged + tally
    logger.info(
        f"Surveyed {merged.steps} steps: {merged.degenerate} degenerate, {merged.burn_in} burn-in, "
        f"{merged.in_A} in A"
    )
    return merged


class DriftBin(BaseModel):
    in_A: bool
    d_decade: int
    alpha_band: str
    count: int
    mean_delta_f: float
    stderr: Optional[float]
    max_delta_f: float
    min_delta_f: float


class DriftReport(BaseModel):
    bins: List[DriftBin]
    samples: int
    degenerate: int
    burn_in: int
    min_f: Optional[float]
    max_delta_f_on_A: Optional[float]
    cap_on_A: float
    estimator: str = "binned empirical means over (in_A, d decade, angle band); not filtration conditioning"


class LemmaCondition(BaseModel):
    name: str
    passed: Optional[bool]
    statistic: Optional[float]
    count: int
    detail: str


class LemmaReport(BaseModel):
    conditions: List[LemmaCondition]
    occupation_A: float
    c2: float
    c3: float
    m: int


def increase_cap(cfg: DriftConfig) -> float:
    """Generous bound on one-step increase of f on A"""
    return f_value(cfg.d_star + 1.0, 0.0, 0.0, cfg) + 10.0


def _finite(value: float) -> Optional[float]:
    return value if math.isfinite(value) else None


def drift_report(tally: SurveyTally, cfg: DriftConfig) -> DriftReport:
    bins = [
        DriftBin(
            in_A=key[0],
            d_decade=key[1],
            alpha_band=key[2],
            count=t.count,
            mean_delta_f=t.mean(),
            stderr=_finite(t.stderr()),
            max_delta_f=t.peak,
            min_delta_f=t.floor,
        )
        for key, t in sorted(tally.drift_bins.items())
    ]
    return DriftReport(
        bins=bins,
        samples=sum(b.count for b in bins),
        degenerate=tally.degenerate,
        burn_in=tally.burn_in,
        min_f=_finite(tally.f_values.floor),
        max_delta_f_on_A=_finite(tally.delta_f_on_A.peak),
        cap_on_A=increase_cap(cfg),
    )


def drift_survey(steps: int, reps: int, seed: int, cfg: Optional[DriftConfig] = None, threads: Optional[int] = None) -> DriftReport:
    cfg = cfg or DriftConfig()
    return drift_report(survey(steps, reps, seed, cfg, threads), cfg)


def lemma_report(tally: SurveyTally, cfg: DriftConfig) -> LemmaReport:
    conditions: List[LemmaCondition] = []

    conditions.append(LemmaCondition(
        name="unit_increment",
        passed=tally.unit_violations == 0,
        statistic=tally.max_abs_increment,
        count=tally.steps,
        detail=f"|dX| <= 1 violated {tally.unit_violations} time(s)",
    ))

    pooled = tally.increments
    low_bins = [
        key for key, t in tally.increment_bins.items()
        if t.count >= cfg.min_bin_samples and t.mean() < -3.0 * t.stderr()
    ]
    conditions.append(LemmaCondition(
        name="nonnegative_drift",
        passed=(pooled.mean() >= -1e-3 and not low_bins) if pooled.count else None,
        statistic=pooled.mean(),
        count=pooled.count,
        detail=f"pooled mean dX; {len(low_bins)} populated bin(s) below zero at 3 SE",
    ))

    gap = tally.gain_gap
    conditions.append(LemmaCondition(
        name="gain_bound",
        passed=(gap.mean() >= -3.0 * gap.stderr()) if gap.count >= 2 else None,
        statistic=gap.mean(),
        count=gap.count,
        detail="mean of s_n minus (sin a + sin a')/(a + a')",
    ))

    lagged = tally.lagged_on_A
    conditions.append(LemmaCondition(
        name="progress_from_A",
        passed=(lagged.mean() > 3.0 * lagged.stderr()) if lagged.count >= 2 else None,
        statistic=lagged.mean() if lagged.count else None,
        count=lagged.count,
        detail=f"mean of X[n+{cfg.m}] - X[n] given d_n < {cfg.d_star}",
    ))

    c2 = f_lower_bound(cfg.c)
    min_f = tally.f_values.floor
    conditions.append(LemmaCondition(
        name="f_bounded_below",
        passed=(min_f >= -c2 - UNIT_SLACK) if tally.f_values.count else None,
        statistic=_finite(min_f),
        count=tally.f_values.count,
        detail=f"min f against -{c2:.6g}",
    ))

    cap = increase_cap(cfg)
    on_A = tally.delta_f_on_A
    conditions.append(LemmaCondition(
        name="bounded_increase_on_A",
        passed=(on_A.peak <= cap) if on_A.count else None,
        statistic=_finite(on_A.peak),
        count=on_A.count,
        detail=f"max df on A against {cap:.6g}",
    ))

    populated = [
        (key, t) for key, t in sorted(tally.drift_bins.items())
        if not key[0] and t.count >= cfg.min_bin_samples
    ]
    failing = [key for key, t in populated if not t.mean() + 3.0 * t.stderr() < 0.0]
    conditions.append(LemmaCondition(
        name="negative_drift_off_A",
        passed=(not failing) if populated else None,
        statistic=max((t.mean() for _, t in populated), default=None),
        count=sum(t.count for _, t in populated),
        detail=f"{len(populated)} populated bin(s) off A, {len(failing)} not negative at 3 SE",
    ))

    surveyed = sum(t.count for t in tally.drift_bins.values())
    return LemmaReport(
        conditions=conditions,
        occupation_A=tally.in_A / surveyed if surveyed else 0.0,
        c2=c2,
        c3=cap,
        m=cfg.m,
    )


def lemma_hypothesis_check(
        steps: int,
        reps: int,
        seed: int,
        cfg: Optional[DriftConfig] = None,
        m: Optional[int] = None,
        threads: Optional[int] = None
) -> LemmaReport:
    cfg = cfg or DriftConfig()
    if m is not None:
        cfg = cfg.model_copy(update={"m": m})
    if cfg.m < 1:
        raise DomainError(f"m must be at least 1, got {cfg.m}")
    return lemma_report(survey(steps, reps, seed, cfg, threads), cfg)
