import argparse
import json
import sys
import time
from typing import Any, Callable, Dict, List, Optional, Sequence

from loguru import logger
from pydantic import ValidationError

from api.files import (
    INVESTOR_COLUMNS,
    RANCHER_COLUMNS,
    RunManifest,
    parse_csv,
    read_text,
    render_csv,
    render_json,
    write_manifest,
    write_text,
)
from api.plotting import investor_svg, loglog_svg, walk_svg
from config import app_settings
from services.errors import OutputError, RancherError, UsageError
from services.geometry_service import Point2, chains
from services.investor_service import InvestorService
from services.lyapunov_service import DriftConfig, LemmaReport, drift_report, lemma_report, survey
from services.oracle_service import hull_of
from services.rancher_service import RancherService
from services.records import SampleRecord
from services.rng_service import RNG_NAME
from services.stats_service import AGGREGATORS, alpha_sweep, exponent_experiment, geometric_checkpoints, speed_experiment
from tools.stub_probes import PowerLawStubTool
from tools.validator import OracleValidatorTool
from tools.walk_probes import InvestorProbeTool, RancherProbeTool

EXIT_OK, EXIT_USAGE, EXIT_IO = 0, 1, 2


class CommandParser(argparse.ArgumentParser):
    """argparse that reports usage problems as UsageError (exit 1) instead of exiting 2"""

    def error(self, message: str) -> None:
        raise UsageError(f"{self.prog}: {message}")


def configure_logging(level: Optional[str] = None, log_file: Optional[str] = None) -> None:
    logger.remove()
    logger.add(sys.stderr, level=(level or app_settings.RANCHER_LOG_LEVEL).upper())
    log_file = log_file or app_settings.RANCHER_LOG_FILE
    if log_file:
        logger.add(log_file, level="DEBUG", rotation="10 MB")


def parse_counts(text: str) -> List[int]:
    """Comma separated counts; scientific notation such as 1e5 is accepted"""
    try:
        values = [int(round(float(item))) for item in text.split(",") if item.strip()]
    except ValueError:
        raise UsageError(f"Cannot parse count list {text!r}")
    if any(v < 0 for v in values):
        raise UsageError(f"Counts must be nonnegative: {text!r}")
    return values


def parse_reals(text: str) -> List[float]:
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise UsageError(f"Cannot parse number list {text!r}")


def resolve_checkpoints(value: Optional[str], steps: int) -> Optional[List[int]]:
    """None means every step"""
    if value is None:
        value = "all" if steps <= app_settings.RANCHER_FULL_RECORD_LIMIT else "geometric"
    if value == "all":
        return None
    if value == "geometric":
        return [0] + geometric_checkpoints(1, steps) if steps >= 1 else [0]
    marks = sorted(set(parse_counts(value)))
    if marks and marks[-1] > steps:
        raise UsageError(f"Checkpoint {marks[-1]} exceeds --steps {steps}")
    return marks


def _parameters(args: argparse.Namespace) -> Dict[str, Any]:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("handler", "log_level")}


def _manifest(args: argparse.Namespace, started: float) -> RunManifest:
    return RunManifest(
        command=args.command,
        parameters=_parameters(args),
        seed=getattr(args, "seed", None),
        duration_seconds=time.monotonic() - started,
    )


def _validate(args: argparse.Namespace, model: str) -> Dict[str, Any]:
    result = OracleValidatorTool().execute({
        "model": model,
        "steps": args.steps,
        "seed": args.seed,
        "alpha": getattr(args, "alpha", 1.0),
        "stride": max(1, args.steps // 200),
    })
    if not result["success"]:
        raise RancherError(f"Validation could not run: {result['error']}")
    if not result["data"]["passed"]:
        raise RancherError(f"Validation failed: {result['data']['mismatches']}")
    logger.info(f"Validation passed: {result['data']}")
    return result["data"]


def _rancher_row(record: SampleRecord) -> Dict[str, Any]:
    return {
        "n": record.n,
        "norm": record.norm,
        "width": record.width,
        "direction": record.direction,
        **record.extras,
    }


def cmd_simulate_rancher(args: argparse.Namespace) -> int:
    started = time.monotonic()
    if args.steps < 0:
        raise UsageError("--steps must be nonnegative")
    checkpoints = resolve_checkpoints(args.checkpoints, args.steps)

    service = RancherService(keep_path=args.plot is not None)
    records = service.run(steps=args.steps, seed=args.seed, checkpoints=checkpoints)
    validation = _validate(args, "rancher") if args.validate else None

    write_text(args.out, render_csv(RANCHER_COLUMNS, (_rancher_row(r) for r in records)))
    if args.plot:
        state = service.last_state
        hull = state.hull.vertices()
        write_text(args.plot, walk_svg(state.path, hull, title=f"Rancher, {args.steps} steps"))

    manifest = _manifest(args, started)
    if validation is not None:
        manifest.parameters["validation"] = validation
    write_manifest(args.out, manifest)
    return EXIT_OK


def cmd_simulate_investor(args: argparse.Namespace) -> int:
    started = time.monotonic()
    if args.steps < 0:
        raise UsageError("--steps must be nonnegative")
    if args.alpha < 0:
        raise UsageError("--alpha must be nonnegative")
    checkpoints = resolve_checkpoints(args.checkpoints, args.steps)

    service = InvestorService(keep_path=args.plot is not None)
    records = service.run(steps=args.steps, alpha=args.alpha, seed=args.seed, checkpoints=checkpoints)
    validation = _validate(args, "investor") if args.validate else None

    rows = (
        {"n": r.n, "width": r.width, "status": r.status, **r.extras}
        for r in records
    )
    write_text(args.out, render_csv(INVESTOR_COLUMNS, rows))
    if args.plot:
        state = service.last_state
        graph = list(enumerate(state.path))
        upper, lower = chains(state.graph_hull)
        write_text(args.plot, investor_svg(graph, upper, lower, title=f"Extremal investor, alpha={args.alpha:g}"))

    manifest = _manifest(args, started)
    if validation is not None:
        manifest.parameters["validation"] = validation
    write_manifest(args.out, manifest)
    return EXIT_OK


def _exponent_payload(result, manifest: RunManifest) -> Dict[str, Any]:
    return {
        "model": result.model,
        "slope": result.fit.slope,
        "stderr": result.fit.stderr_slope,
        "intercept": result.fit.intercept,
        "npoints": result.fit.npoints,
        "aggregator": result.aggregator,
        "mode": result.mode,
        "points": [p.model_dump() for p in result.points],
        "dropped": result.dropped,
        "rng": RNG_NAME,
        "manifest": manifest.model_dump(),
    }


def cmd_estimate_exponent(args: argparse.Namespace) -> int:
    started = time.monotonic()
    if args.model == "rancher":
        tool = RancherProbeTool()
    elif args.model == "investor":
        tool = InvestorProbeTool(args.alpha)
    elif args.model == "stub":
        tool = PowerLawStubTool(args.stub_exponent)
    else:
        raise UsageError(f"Invalid model {args.model!r}")

    result = exponent_experiment(
        tool,
        lengths=parse_counts(args.lengths),
        reps=args.reps,
        seed=args.seed,
        aggregator=args.aggregator,
        threads=args.threads
    )
    payload = _exponent_payload(result, _manifest(args, started))
    write_text(args.out, render_json(payload))
    if args.plot:
        write_text(args.plot, loglog_svg([(p.n, p.w) for p in result.points], result.fit.slope, result.fit.intercept))
    return EXIT_OK


def cmd_sweep_investor(args: argparse.Namespace) -> int:
    started = time.monotonic()
    sweep = alpha_sweep(
        parse_reals(args.alphas),
        lengths=parse_counts(args.lengths),
        reps=args.reps,
        seed=args.seed,
        aggregator=args.aggregator,
        threads=args.threads
    )
    payload = {
        "sweep": [
            {"alpha": alpha, "slope": r.fit.slope, "stderr": r.fit.stderr_slope,
             "intercept": r.fit.intercept, "dropped": r.dropped}
            for alpha, r in sweep
        ],
        "rng": RNG_NAME,
        "manifest": _manifest(args, started).model_dump(),
    }
    write_text(args.out, render_json(payload))
    return EXIT_OK


def cmd_speed(args: argparse.Namespace) -> int:
    started = time.monotonic()
    summary = speed_experiment(args.reps, args.steps, args.seed, threads=args.threads)
    payload = {**summary.model_dump(), "rng": RNG_NAME, "manifest": _manifest(args, started).model_dump()}
    write_text(args.out, render_json(payload))
    return EXIT_OK


def overall_verdict(lemma: LemmaReport) -> Optional[bool]:
    """False if any condition failed, None if any lacked data, True otherwise"""
    if any(c.passed is False for c in lemma.conditions):
        return False
    unchecked = [c.name for c in lemma.conditions if c.passed is None]
    if unchecked:
        logger.warning(f"Not enough data to check: {', '.join(unchecked)}")
        return None
    return True


def cmd_drift_check(args: argparse.Namespace) -> int:
    started = time.monotonic()
    overrides = {
        "c": args.c, "d_star": args.dstar, "m": args.m, "epsilon": args.epsilon,
        "burn_in": args.burn_in, "min_bin_samples": args.min_bin,
    }
    cfg = DriftConfig(**{k: v for k, v in overrides.items() if v is not None})

    tally = survey(args.steps, args.reps, args.seed, cfg, threads=args.threads)
    drift = drift_report(tally, cfg)
    lemma = lemma_report(tally, cfg)

    manifest = _manifest(args, started)
    manifest.parameters["config"] = cfg.model_dump()
    payload = {
        "drift": drift.model_dump(),
        "lemma": lemma.model_dump(),
        "passed": overall_verdict(lemma),
        "rng": RNG_NAME,
        "manifest": manifest.model_dump(),
    }
    write_text(args.out, render_json(payload))
    return EXIT_OK


def cmd_plot(args: argparse.Namespace) -> int:
    text = read_text(args.input)

    if args.input.endswith(".json") or text.lstrip().startswith("{"):
        try:
            payload = json.loads(text)
            points = [(float(p["n"]), float(p["w"])) for p in payload["points"]]
            slope, intercept = float(payload["slope"]), float(payload["intercept"])
        except (ValueError, KeyError, TypeError) as e:
            raise UsageError(f"Malformed exponent JSON: {e}")
        write_text(args.out, loglog_svg(points, slope, intercept))
        return EXIT_OK

    header, rows = parse_csv(text)
    if header[:3] == ["n", "x", "y"]:
        path = [(r["x"], r["y"]) for r in rows if r["x"] is not None and r["y"] is not None]
        hull = hull_of([Point2(*p) for p in path]).vertices() if path else []
        write_text(args.out, walk_svg(path, hull))
    elif header[:3] == ["n", "x", "rmax"]:
        graph = [(r["n"], r["x"]) for r in rows if r.get("status", "ok") == "ok" and r["x"] is not None]
        upper, lower = chains(hull_of([Point2(*p) for p in graph])) if graph else ([], [])
        write_text(args.out, investor_svg(graph, upper, lower))
    else:
        raise UsageError(f"Unrecognised CSV header: {','.join(header)}")
    return EXIT_OK


def build_parser() -> CommandParser:
    parser = CommandParser(prog="rancher", description="Rancher walk and extremal investor simulations")
    parser.add_argument("--log-level", default=None, help="loguru level for stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=CommandParser)

    def common(p: CommandParser, seeded: bool = True, threaded: bool = False) -> None:
        if seeded:
            p.add_argument("--seed", type=int, default=app_settings.RANCHER_SEED, help="decimal u64 seed")
        if threaded:
            p.add_argument("--threads", type=int, default=app_settings.RANCHER_THREADS)
        p.add_argument("--out", default="-", help="output path ('-' for stdout)")

    p = sub.add_parser("simulate-rancher", help="run one rancher walk to CSV")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--checkpoints", default=None, help="'all', 'geometric' or a comma list")
    p.add_argument("--validate", action="store_true", help="replay the walk against the oracles")
    p.add_argument("--plot", default=None, help="also write an SVG of path and hull")
    common(p)
    p.set_defaults(handler=cmd_simulate_rancher)

    p = sub.add_parser("simulate-investor", help="run one extremal investor walk to CSV")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--checkpoints", default=None)
    p.add_argument("--validate", action="store_true")
    p.add_argument("--plot", default=None)
    common(p)
    p.set_defaults(handler=cmd_simulate_investor)

    p = sub.add_parser("estimate-exponent", help="fit the width exponent")
    p.add_argument("--model", required=True)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--stub-exponent", type=float, default=0.6)
    p.add_argument("--lengths", default="1e3,1e4,1e5")
    p.add_argument("--reps", type=int, default=50)
    p.add_argument("--aggregator", choices=AGGREGATORS, default="median")
    p.add_argument("--plot", default=None)
    common(p, threaded=True)
    p.set_defaults(handler=cmd_estimate_exponent)

    p = sub.add_parser("sweep-investor", help="width exponent across influence parameters")
    p.add_argument("--alphas", default="0,0.5,0.9,1")
    p.add_argument("--lengths", default="1e3,1e4,1e5")
    p.add_argument("--reps", type=int, default=50)
    p.add_argument("--aggregator", choices=AGGREGATORS, default="median")
    common(p, threaded=True)
    p.set_defaults(handler=cmd_sweep_investor)

    p = sub.add_parser("speed", help="terminal speed distribution of the rancher")
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--steps", type=int, default=100_000)
    common(p, threaded=True)
    p.set_defaults(handler=cmd_speed)

    p = sub.add_parser("drift-check", help="drift survey and hypothesis checks")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--dstar", type=float, default=None)
    p.add_argument("--c", type=float, default=None)
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--burn-in", type=int, default=None)
    p.add_argument("--min-bin", type=int, default=None)
    common(p, threaded=True)
    p.set_defaults(handler=cmd_drift_check)

    p = sub.add_parser("plot", help="render a CSV or exponent JSON as SVG")
    p.add_argument("--in", dest="input", required=True)
    common(p, seeded=False)
    p.set_defaults(handler=cmd_plot)

    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse argv, dispatch, and map failures to exit codes"""
    configure_logging()
    try:
        args = build_parser().parse_args(argv)
        if args.log_level:
            configure_logging(args.log_level)
        handler: Callable[[argparse.Namespace], int] = args.handler
        return handler(args)
    except (OutputError, OSError) as e:
        logger.error(f"I/O error: {e}")
        return EXIT_IO
    except (UsageError, ValidationError) as e:
        logger.error(f"Usage error: {e}")
        return EXIT_USAGE
    except RancherError as e:
        logger.error(f"Error: {e}")
        return EXIT_USAGE
