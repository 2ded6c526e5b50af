"""
``millrun`` command line.

    millrun analyze  --input demand.csv [--threshold KG ...] [--out report.json]
    millrun forecast --input demand.csv (--grid | --model KIND ...) [--report f.json] [--fitted f.csv]
    millrun capacity --plant plant.csv --config plant.cfg [--demand demand.csv] [--n-max N]
                     [--out capacity.csv] [--report capacity.json]
    millrun schedule --orders orders.csv --plant plant.csv --config plant.cfg
                     [--method oracle|greedy|local] [--seed N] [--budget K]
                     [--format json|csv] [--out schedule.json] [--require-full-service]
    millrun scenario --spec scenario.json --plant plant.csv --config plant.cfg
                     [--seed N] [--out sweep.csv] [--report scenario.json] [--critical]

Exit codes: 0 success, 1 usage or input error (one ``<module>: <message>``
line on stderr), 2 when the model itself says the request cannot be met
(``--require-full-service`` with unserved orders).

``MILLRUN_SEED`` supplies the seed when ``--seed`` is absent.  Reports go to
``--out`` / ``--report`` atomically, or to stdout.
"""

from __future__ import annotations

import argparse
import contextlib
import logging
import os
import sys
from collections.abc import Sequence
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, NoReturn

import pandas as pd

from . import io
from .capacity import capacity_report
from .constants import CRITICAL_BRACKET, CRITICAL_TOLERANCE, DEMAND_2013_KG, LOCAL_SEARCH_BUDGET
from .demand import DemandSeries, demand_report, descriptive_stats
from .errors import MillrunError, UsageError
from .forecasting import (
    ForecastModelSpec,
    ModelKind,
    best_per_kind,
    fit_forecast,
    grid_search,
)
from .plant import PlantConfig
from .scenario import critical_demand, shelving_summary, warehouse_sweep
from .solvers import METHODS, solve

logger = logging.getLogger("millrun")

EXIT_OK: int = 0
EXIT_ERROR: int = 1
EXIT_INFEASIBLE: int = 2

SEED_ENV: str = "MILLRUN_SEED"
COMMANDS: tuple[str, ...] = ("analyze", "forecast", "capacity", "schedule", "scenario")

# Which flags name input files that must exist at parse time.
_INPUT_FLAGS: dict[str, tuple[str, ...]] = {
    "analyze": ("input",),
    "forecast": ("input",),
    "capacity": ("plant", "config", "demand"),
    "schedule": ("orders", "plant", "config"),
    "scenario": ("spec", "plant", "config"),
}


@dataclass(frozen=True)
class RunConfig:
    """A parsed, validated invocation."""

    command: str
    inputs: dict[str, Path]
    out: Path | None = None
    report: Path | None = None
    seed: int | None = None
    fmt: str = "json"
    slack_epsilon: float | None = None
    verbose: bool = False
    seed_repeats: int = 0
    options: dict[str, Any] = field(default_factory=dict)


# --------------------------------------------------------------------------- #
# Parsing
# --------------------------------------------------------------------------- #


class _Parser(argparse.ArgumentParser):
    """Usage errors exit 1 with the usage block and a single diagnostic line."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"usage: {message}\n")


class _SeedAction(argparse.Action):
    """``--seed`` may repeat: the last value wins and the repeat is remembered."""

    def __call__(self, parser, namespace, values, option_string=None):
        repeats = getattr(namespace, "seed_repeats", 0)
        if getattr(namespace, self.dest, None) is not None:
            repeats += 1
        namespace.seed_repeats = repeats
        setattr(namespace, self.dest, values)


def _nonneg_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from exc
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected an integer >= 0, got {value}")
    return value


def _build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--verbose", action="store_true", help="log progress to stderr")

    p = _Parser(prog="millrun", description="Production planning for a pasta plant")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("analyze", parents=[common], help="demand statistics and tail risk")
    sp.add_argument("--input", required=True, help="demand CSV (period,demand_kg[,sales_kg])")
    sp.add_argument(
        "--threshold", type=float, action="append", default=[], help="tail threshold, kg"
    )
    sp.add_argument("--out", help="JSON report path (default: stdout)")

    sp = sub.add_parser("forecast", parents=[common], help="forecast model backtests")
    sp.add_argument("--input", required=True, help="demand CSV")
    mode = sp.add_mutually_exclusive_group(required=True)
    mode.add_argument("--grid", action="store_true", help="grid-search every model family")
    mode.add_argument("--model", choices=[k.value for k in ModelKind], help="fit one model")
    sp.add_argument("--window", type=int, help="moving-average window")
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--gamma", type=float)
    sp.add_argument("--delta", type=float)
    sp.add_argument("--season-length", type=int)
    sp.add_argument("--top", type=_nonneg_int, default=10, help="ranked rows to report")
    sp.add_argument("--report", help="JSON report path (default: stdout)")
    sp.add_argument("--fitted", help="CSV of per-period forecasts of the best model")

    sp = sub.add_parser("capacity", parents=[common], help="capacity versus startups")
    sp.add_argument("--plant", required=True, help="plant CSV (id,t_kg_h,e,m,s_h)")
    sp.add_argument("--config", required=True, help="plant.cfg")
    sp.add_argument("--demand", help="demand CSV (default: the 2013 monthly demands)")
    sp.add_argument("--n-max", type=_nonneg_int, default=120, help="largest startup count")
    sp.add_argument("--out", help="CSV path (n,available_kg,required_max_kg)")
    sp.add_argument("--report", help="JSON summary path")

    sp = sub.add_parser("schedule", parents=[common], help="assign orders to machines")
    sp.add_argument("--orders", required=True, help="orders CSV (id,q_kg,due_days)")
    sp.add_argument("--plant", required=True)
    sp.add_argument("--config", required=True)
    sp.add_argument("--method", choices=METHODS, default="local")
    sp.add_argument("--seed", type=_nonneg_int, action=_SeedAction, default=None)
    sp.add_argument("--budget", type=int, default=LOCAL_SEARCH_BUDGET)
    sp.add_argument("--slack-epsilon", type=float, help="override plant.cfg slack_epsilon")
    sp.add_argument("--format", choices=("json", "csv"), default=None, dest="fmt")
    sp.add_argument("--out", help="schedule path (default: stdout)")
    sp.add_argument(
        "--require-full-service", action="store_true", help="exit 2 when any order is unserved"
    )

    sp = sub.add_parser("scenario", parents=[common], help="warehouse capacity sweep")
    sp.add_argument("--spec", required=True, help="scenario JSON")
    sp.add_argument("--plant", required=True)
    sp.add_argument("--config", required=True)
    sp.add_argument("--seed", type=_nonneg_int, action=_SeedAction, default=None)
    sp.add_argument("--slack-epsilon", type=float, help="override plant.cfg slack_epsilon")
    sp.add_argument("--out", help="CSV path (month,A_kg,demand_kg,unserved,Z_kg,status)")
    sp.add_argument("--report", help="JSON summary path")
    sp.add_argument(
        "--critical", action="store_true", help="also bisect the critical demand per capacity"
    )
    sp.add_argument(
        "--require-full-service", action="store_true", help="exit 2 when any cell has unserved orders"
    )
    return p


def _format_of(path: str | None, fmt: str | None) -> str:
    suffix = Path(path).suffix.lower().lstrip(".") if path else ""
    if fmt and suffix in ("json", "csv") and suffix != fmt:
        raise UsageError(f"--format {fmt} conflicts with output file {path}")
    return fmt or (suffix if suffix in ("json", "csv") else "json")


def parse_cli(argv: Sequence[str] | None = None) -> RunConfig:
    """Parse *argv* into a :class:`RunConfig`; input files must already exist."""
    args = _build_parser().parse_args(argv)
    inputs: dict[str, Path] = {}
    for flag in _INPUT_FLAGS[args.command]:
        value = getattr(args, flag, None)
        if value is None:
            continue
        path = Path(value)
        if not path.is_file():
            raise UsageError(f"--{flag}: file not found: {value}")
        inputs[flag] = path

    seed = getattr(args, "seed", None)
    if seed is None and args.command in ("schedule", "scenario"):
        env = os.environ.get(SEED_ENV)
        if env is not None:
            try:
                seed = _nonneg_int(env)
            except argparse.ArgumentTypeError as exc:
                raise UsageError(f"{SEED_ENV}: {exc}") from exc

    fmt = "json"
    if args.command == "schedule":
        fmt = _format_of(args.out, args.fmt)

    known = {"command", "verbose", "seed", "seed_repeats", "out", "report", "fmt", "slack_epsilon"}
    options = {
        k: v
        for k, v in vars(args).items()
        if k not in known and k not in _INPUT_FLAGS[args.command]
    }
    return RunConfig(
        command=args.command,
        inputs=inputs,
        out=Path(args.out) if getattr(args, "out", None) else None,
        report=Path(args.report) if getattr(args, "report", None) else None,
        seed=seed,
        fmt=fmt,
        slack_epsilon=getattr(args, "slack_epsilon", None),
        verbose=args.verbose,
        seed_repeats=getattr(args, "seed_repeats", 0),
        options=options,
    )


# --------------------------------------------------------------------------- #
# Commands
# --------------------------------------------------------------------------- #


def _emit_json(obj: Any, path: Path | None) -> None:
    if path is None:
        sys.stdout.write(io.dumps_json(obj))
    else:
        io.write_json(obj, path)


def _emit_csv(frame: pd.DataFrame, path: Path | None) -> None:
    if path is None:
        sys.stdout.write(frame.to_csv(index=False, lineterminator="\n"))
    else:
        io.write_csv(frame, path)


def _plant(cfg: RunConfig) -> PlantConfig:
    plant = io.load_plant(cfg.inputs["plant"], cfg.inputs["config"])
    if cfg.slack_epsilon is not None:
        plant = replace(plant, slack_epsilon=cfg.slack_epsilon)
    return plant


def _run_analyze(cfg: RunConfig) -> int:
    series = io.read_demand_csv(cfg.inputs["input"])
    _emit_json(demand_report(series, cfg.options["threshold"]), cfg.out)
    return EXIT_OK


def _model_spec(opts: dict[str, Any]) -> ForecastModelSpec:
    return ForecastModelSpec(
        kind=ModelKind(opts["model"]),
        window=opts["window"],
        alpha=opts["alpha"],
        gamma=opts["gamma"],
        delta=opts["delta"],
        season_length=opts["season_length"],
    )


def _run_forecast(cfg: RunConfig) -> int:
    opts = cfg.options
    values = list(io.read_demand_csv(cfg.inputs["input"]).demand)
    if opts["grid"]:
        ranked = grid_search(values)
        best = ranked[0]
        report: dict[str, Any] = {
            "n": len(values),
            "evaluated": len(ranked),
            "best": best.to_dict(),
            "by_model": [r.to_dict() for r in best_per_kind(ranked)],
            "top": [r.to_dict() for r in ranked[: opts["top"]]],
        }
    else:
        best = fit_forecast(values, _model_spec(opts))
        report = {"n": len(values), "evaluated": 1, "best": best.to_dict()}
    report["warnings"] = list(best.warnings)
    _emit_json(report, cfg.report)
    if opts["fitted"]:
        io.write_csv(io.fitted_frame(values, best.fitted), Path(opts["fitted"]))
    return EXIT_OK


def _run_capacity(cfg: RunConfig) -> int:
    plant = _plant(cfg)
    if "demand" in cfg.inputs:
        series = io.read_demand_csv(cfg.inputs["demand"])
    else:
        series = DemandSeries.from_values(DEMAND_2013_KG)
    rep = capacity_report(plant, series, range(cfg.options["n_max"] + 1))
    if cfg.out is not None:
        io.write_csv(rep.table[["n", "available_kg", "required_max_kg"]], cfg.out)
    summary = rep.summary()
    summary["periods"] = rep.periods.to_dict(orient="records")
    if cfg.report is not None or cfg.out is None:
        _emit_json(summary, cfg.report)
    return EXIT_OK


def _run_schedule(cfg: RunConfig) -> int:
    plant = _plant(cfg)
    orders = io.read_orders_csv(cfg.inputs["orders"])
    opts = cfg.options
    result = solve(opts["method"], orders, plant, seed=cfg.seed or 0, budget=opts["budget"])
    payload = result.to_dict()
    if cfg.fmt == "csv":
        _emit_csv(pd.DataFrame(payload["orders"]), cfg.out)
    else:
        payload["evaluation"] = result.best_eval.to_dict()
        _emit_json(payload, cfg.out)
    if opts["require_full_service"] and result.unserved:
        logger.warning("unserved orders: %s", list(result.unserved))
        return EXIT_INFEASIBLE
    return EXIT_OK


def _run_scenario(cfg: RunConfig) -> int:
    plant = _plant(cfg)
    spec = io.read_scenario_json(cfg.inputs["spec"])
    if cfg.seed is not None:
        spec = replace(spec, seed=cfg.seed)
    table = warehouse_sweep(spec, plant)
    frame = table.to_frame()
    _emit_csv(frame, cfg.out)

    if cfg.report is not None or cfg.options["critical"]:
        summary: dict[str, Any] = {
            "seed": spec.seed,
            "method": spec.method,
            "unserved": {
                str(month): {str(k): (None if pd.isna(v) else int(v)) for k, v in row.items()}
                for month, row in table.unserved_grid().iterrows()
            },
        }
        if cfg.options["critical"]:
            capacities = sorted({opt.to_kg(plant) for opt in spec.warehouse_options})
            criticals = [
                critical_demand(
                    plant,
                    a,
                    spec.order_gen,
                    spec.seed,
                    method=spec.method,
                    budget=spec.budget,
                    bracket=CRITICAL_BRACKET,
                    tol=CRITICAL_TOLERANCE,
                )
                for a in capacities
            ]
            fit = descriptive_stats(DemandSeries.from_values(spec.monthly_demands))
            summary["critical"] = shelving_summary(fit, capacities, criticals)
        if cfg.report is not None:
            _emit_json(summary, cfg.report)
        else:
            logger.warning("critical demands (no --report given): %s", summary.get("critical"))

    failed = int((frame["status"] == "failed").sum())
    if failed:
        logger.warning("%d sweep cell(s) failed", failed)
    if cfg.options["require_full_service"] and (frame["unserved"].fillna(1) > 0).any():
        return EXIT_INFEASIBLE
    return EXIT_OK


_COMMANDS = {
    "analyze": _run_analyze,
    "forecast": _run_forecast,
    "capacity": _run_capacity,
    "schedule": _run_schedule,
    "scenario": _run_scenario,
}


def run(cfg: RunConfig) -> int:
    """Execute *cfg*; returns the process exit code."""
    if cfg.seed_repeats:
        logger.warning(
            "--seed given %d times; using the last value %s", cfg.seed_repeats + 1, cfg.seed
        )
    return _COMMANDS[cfg.command](cfg)


def _configure_logging(verbose: bool) -> None:
    logging.basicConfig(
        level=logging.INFO if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def main(argv: Sequence[str] | None = None) -> int:
    # UTF-8 stdout so unit symbols survive on consoles with legacy encodings
    if hasattr(sys.stdout, "reconfigure"):
        with contextlib.suppress(Exception):
            sys.stdout.reconfigure(encoding="utf-8")
    try:
        cfg = parse_cli(argv)
        _configure_logging(cfg.verbose)
        return run(cfg)
    except MillrunError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"io: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
