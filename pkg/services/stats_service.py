import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from scipy import stats

from config import app_settings
from services.ensemble_service import EnsembleRunner
from services.errors import InvalidDatumError, RancherError, RankDeficiencyError, UsageError
from services.records import ExponentResult, RegressionFit, SampleRecord, SpeedSummary, WidthPoint
from services.rng_service import grid_index
from tools.base_tools import WalkProbeTool, run_tool
from tools.walk_probes import InvestorProbeTool, RancherProbeTool

AGGREGATORS = ("per-walk-points", "median", "mean")


def loglog_fit(points: Sequence[Tuple[float, float]]) -> RegressionFit:
    """Ordinary least squares of log10 w on log10 n, with the classical slope standard error"""
    if len(points) < 2:
        raise RankDeficiencyError(f"Need at least 2 points, got {len(points)}")

    ns = np.array([float(n) for n, _ in points])
    ws = np.array([float(w) for _, w in points])
    if np.any(ws <= 0) or np.any(ns <= 0):
        raise InvalidDatumError("Log-log fit needs positive n and w")
    if np.unique(ns).size < 2:
        raise RankDeficiencyError("Log-log fit needs at least 2 distinct abscissas")

    result = stats.linregress(np.log10(ns), np.log10(ws))
    stderr = float(result.stderr) if len(points) > 2 else 0.0
    if not math.isfinite(stderr):
        stderr = 0.0
    return RegressionFit(
        slope=float(result.slope),
        intercept=float(result.intercept),
        stderr_slope=stderr,
        npoints=len(points)
    )


def geometric_checkpoints(lo: int, hi: int, per_decade: Optional[int] = None) -> List[int]:
    """Integer step counts equally spaced on the log scale, always including lo and hi"""
    per_decade = per_decade or app_settings.RANCHER_CHECKPOINTS_PER_DECADE
    if lo < 1 or hi < lo:
        raise UsageError(f"Need 1 <= lo <= hi, got lo={lo}, hi={hi}")

    count = max(2, int(math.ceil(math.log10(hi / lo) * per_decade)) + 1)
    grid = np.unique(np.rint(np.logspace(math.log10(lo), math.log10(hi), count)).astype(np.int64))
    marks = sorted(set(int(v) for v in grid) | {lo, hi})
    return marks


def _aggregate(values: List[float], aggregator: str) -> float:
    if aggregator == "median":
        return float(np.median(values))
    return float(np.mean(values))


def exponent_experiment(
        tool: WalkProbeTool,
        lengths: Sequence[int],
        reps: int,
        seed: int,
        aggregator: str = "median",
        threads: Optional[int] = None
) -> ExponentResult:
    """
    Fit the width exponent of a walk model.

    median/mean: reps independent walks per length, final-time width, one
    aggregated point per length. per-walk-points: reps long walks of the largest
    length, each sampled on a geometric grid, every point fitted.
    """
    lengths = [int(n) for n in lengths]
    if not lengths or any(b <= a for a, b in zip(lengths, lengths[1:])):
        raise UsageError("Lengths must be a nonempty ascending list")
    if reps < 1:
        raise UsageError("reps must be at least 1")
    if aggregator not in AGGREGATORS:
        raise UsageError(f"Unknown aggregator {aggregator!r}; expected one of {AGGREGATORS}")

    runner = EnsembleRunner(threads)
    if aggregator == "per-walk-points":
        grid = geometric_checkpoints(lengths[0], lengths[-1])
        tasks = [
            ((lengths[-1], rep), {
                "tool": tool,
                "input_data": {
                    "steps": lengths[-1], "seed": seed,
                    "index": grid_index(lengths[-1], rep), "checkpoints": grid
                }
            })
            for rep in range(reps)
        ]
        mode = "one walk per replicate, sampled at many n"
    else:
        tasks = [
            ((n, rep), {
                "tool": tool,
                "input_data": {"steps": n, "seed": seed, "index": grid_index(n, rep), "checkpoints": [n]}
            })
            for n in lengths
            for rep in range(reps)
        ]
        mode = "one walk per (n, replicate), final width"

    logger.info(f"Exponent experiment: model={tool.name} lengths={lengths} reps={reps} aggregator={aggregator}")
    results = runner.map(run_tool, tasks)

    dropped = 0
    samples: Dict[int, List[float]] = {}
    for key, result in results:
        if not result.get("success"):
            logger.warning(f"Walk {key} failed: {result.get('error')}")
            dropped += 1
            continue
        for point in result["data"]["points"]:
            width = point.get("width")
            if width is None or not math.isfinite(width) or width <= 0:
                dropped += 1
                continue
            samples.setdefault(int(point["n"]), []).append(float(width))

    if dropped:
        logger.warning(f"Dropped {dropped} point(s) with zero, missing or non-finite width")

    if aggregator == "per-walk-points":
        points = [WidthPoint(n=n, w=w) for n in sorted(samples) for w in samples[n]]
    else:
        points = [WidthPoint(n=n, w=_aggregate(samples[n], aggregator)) for n in sorted(samples)]

    fit = loglog_fit([(p.n, p.w) for p in points])
    logger.info(f"Fitted slope {fit.slope:.4f} (SE {fit.stderr_slope:.4f}) on {fit.npoints} points")
    return ExponentResult(
        model=tool.name,
        aggregator=aggregator,
        mode=mode,
        fit=fit,
        points=points,
        dropped=dropped
    )


def alpha_sweep(
        alphas: Sequence[float],
        lengths: Sequence[int],
        reps: int,
        seed: int,
        aggregator: str = "median",
        threads: Optional[int] = None
) -> List[Tuple[float, ExponentResult]]:
    """Width exponent of the extremal investor for each influence parameter"""
    sweep = []
    for alpha in alphas:
        result = exponent_experiment(InvestorProbeTool(alpha), lengths, reps, seed, aggregator, threads)
        sweep.append((float(alpha), result))
    return sweep


def speed_experiment(
        reps: int,
        steps: int,
        seed: int,
        tool: Optional[WalkProbeTool] = None,
        threads: Optional[int] = None
) -> SpeedSummary:
    """Distribution of the terminal speed ratio |x_steps| / steps over independent walks"""
    if reps < 1 or steps < 1:
        raise UsageError("reps and steps must both be at least 1")

    tool = tool or RancherProbeTool()
    tasks = [
        ((steps, rep), {
            "tool": tool,
            "input_data": {"steps": steps, "seed": seed, "index": grid_index(steps, rep), "checkpoints": [steps]}
        })
        for rep in range(reps)
    ]
    results = EnsembleRunner(threads).map(run_tool, tasks)

    speeds = []
    for key, result in results:
        if not result.get("success"):
            logger.error(f"Walk {key} failed: {result.get('error')}")
            raise RancherError(f"Speed walk {key} failed: {result.get('error')}")
        final = result["data"]["points"][-1]
        speeds.append(final["norm"] / steps)

    values = np.array(speeds)
    summary = SpeedSummary(
        reps=reps,
        steps=steps,
        mean=float(values.mean()),
        sd=float(values.std(ddof=1)) if reps > 1 else 0.0,
        quantiles={
            f"q{int(q * 100):02d}": float(np.quantile(values, q))
            for q in (0.05, 0.25, 0.5, 0.75, 0.95)
        }
    )
    logger.info(f"Speed over {reps} walks of {steps} steps: mean {summary.mean:.4f}, sd {summary.sd:.4f}")
    return summary


def direction_series(records: Sequence[SampleRecord]) -> List[Tuple[int, float]]:
    """Unwrapped arg x_n per checkpoint; records at the origin are skipped"""
    kept = [r for r in records if r.norm > 0 and r.direction is not None]
    if not kept:
        return []
    unwrapped = np.unwrap(np.array([r.direction for r in kept]))
    return [(r.n, float(angle)) for r, angle in zip(kept, unwrapped)]


def angle_range(series: Sequence[Tuple[int, float]], lo: int, hi: int) -> float:
    """Spread of the unwrapped direction over checkpoints with lo <= n <= hi"""
    angles = [angle for n, angle in series if lo <= n <= hi]
    return max(angles) - min(angles) if angles else 0.0


def ratio_spread(final_ratios: Sequence[float]) -> Tuple[float, float]:
    """(mean, sd) of x_n / n over walks"""
    values = np.array([r for r in final_ratios if r is not None and math.isfinite(r)])
    if values.size == 0:
        return 0.0, 0.0
    return float(values.mean()), float(values.std(ddof=1)) if values.size > 1 else 0.0
