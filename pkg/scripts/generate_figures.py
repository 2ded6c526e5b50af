#!/usr/bin/env python3
"""
Charts from the CSVs the ``millrun`` CLI writes.

Inputs (any subset):
- ``--capacity``  n,available_kg,required_max_kg   (millrun capacity --out)
- ``--fitted``    period,actual_kg,forecast_kg     (millrun forecast --fitted)
- ``--sweep``     month,A_kg,demand_kg,unserved,Z_kg,status   (millrun scenario --out)

Outputs:
- capacity_vs_startups.{png|pdf|svg}
- forecast_fit.{png|pdf|svg}
- unserved_by_capacity.{png|pdf|svg}
"""

from __future__ import annotations

import argparse
from collections.abc import Sequence
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

COLORS_LIGHT = ["#444444", "#008000", "#FFA500", "#1E90FF"]
COLORS_DARK = ["#888888", "#00FF00", "#FFA500", "#1E90FF"]


def apply_theme(theme: str) -> list[str]:
    if theme == "dark":
        plt.style.use("dark_background")
        return COLORS_DARK
    plt.style.use("default")
    return COLORS_LIGHT


def save(fig: plt.Figure, outdir: Path, name: str, fmt: str) -> Path:
    outdir.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    path = outdir / f"{name}.{fmt}"
    fig.savefig(path, dpi=300 if fmt == "png" else None)
    plt.close(fig)
    return path


def fig_capacity(table: pd.DataFrame, outdir: Path, fmt: str, colors: list[str]) -> Path:
    fig = plt.figure(figsize=(7, 5))
    ax = fig.add_subplot(111)
    ax.plot(table["n"], table["available_kg"], color=colors[1], label="Available capacity")
    ax.plot(
        table["n"],
        table["required_max_kg"],
        color=colors[2],
        linestyle="--",
        label="Peak monthly demand",
    )
    short = table[table["available_kg"] < table["required_max_kg"]]
    if not short.empty:
        first = short.iloc[0]
        ax.annotate(
            f"short from n={int(first['n'])}",
            xy=(first["n"], first["available_kg"]),
            xytext=(first["n"], first["available_kg"] * 1.05),
            arrowprops={"arrowstyle": "->", "lw": 1.5},
        )
    ax.set_xlabel("Startups per month")
    ax.set_ylabel("kg / month")
    ax.set_title("Capacity vs startups")
    ax.grid(alpha=0.6, linestyle="--")
    ax.legend()
    return save(fig, outdir, "capacity_vs_startups", fmt)


def fig_forecast(frame: pd.DataFrame, outdir: Path, fmt: str, colors: list[str]) -> Path:
    fig = plt.figure(figsize=(7, 5))
    ax = fig.add_subplot(111)
    ax.plot(frame["period"], frame["actual_kg"], marker="o", color=colors[0], label="Actual")
    ax.plot(frame["period"], frame["forecast_kg"], marker="s", color=colors[3], label="Forecast")
    ax.set_xlabel("Period")
    ax.set_ylabel("kg")
    ax.set_title("One-step-ahead forecast")
    ax.grid(alpha=0.6, linestyle="--")
    ax.legend()
    return save(fig, outdir, "forecast_fit", fmt)


def fig_sweep(frame: pd.DataFrame, outdir: Path, fmt: str, colors: list[str]) -> Path:
    ok = frame[frame["status"] == "ok"]
    grid = ok.pivot(index="month", columns="A_kg", values="unserved").sort_index(axis=1)
    fig = plt.figure(figsize=(8, 5))
    ax = fig.add_subplot(111)
    width = 0.8 / max(len(grid.columns), 1)
    x = np.arange(len(grid.index))
    for k, cap in enumerate(grid.columns):
        label = "unbounded" if np.isinf(cap) else f"{cap:,.0f} kg"
        ax.bar(x + k * width, grid[cap], width=width, color=colors[k % len(colors)], label=label)
    ax.set_xticks(x + width * (len(grid.columns) - 1) / 2)
    ax.set_xticklabels([str(m) for m in grid.index])
    ax.set_xlabel("Month")
    ax.set_ylabel("Unserved orders")
    ax.set_title("Unserved orders by warehouse capacity")
    ax.grid(alpha=0.3, linestyle="--", axis="y")
    ax.legend()
    return save(fig, outdir, "unserved_by_capacity", fmt)


def parse_args(argv: Sequence[str] | None = None) -> argparse.Namespace:
    p = argparse.ArgumentParser()
    p.add_argument("--capacity", type=Path, help="capacity CSV")
    p.add_argument("--fitted", type=Path, help="forecast fitted CSV")
    p.add_argument("--sweep", type=Path, help="scenario sweep CSV")
    p.add_argument("--theme", choices=["dark", "light"], default="light")
    p.add_argument("--format", choices=["png", "pdf", "svg"], default="png")
    p.add_argument("--outdir", type=Path, default=Path("figures"))
    return p.parse_args(argv)


def main(argv: Sequence[str] | None = None) -> list[Path]:
    args = parse_args(argv)
    colors = apply_theme(args.theme)
    written = []
    if args.capacity:
        written.append(fig_capacity(pd.read_csv(args.capacity), args.outdir, args.format, colors))
    if args.fitted:
        written.append(fig_forecast(pd.read_csv(args.fitted), args.outdir, args.format, colors))
    if args.sweep:
        written.append(fig_sweep(pd.read_csv(args.sweep), args.outdir, args.format, colors))
    print(f"Generated {len(written)} figure(s) in {args.outdir} as .{args.format} (theme={args.theme})")
    return written


if __name__ == "__main__":
    main()
