"""Render the report CSVs to PNG figures alongside the delimited output.

Each function takes a CSV produced by the harness and writes one figure,
returning the output path.  Rendering is entirely derived from the CSVs, so
figures can be regenerated without re-running any experiment.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

__all__ = ["plot_error_rates", "plot_leakage", "plot_bounds", "plot_rates", "plot_trace"]

plt.rcParams["figure.figsize"] = (6.4, 4.2)
plt.rcParams["font.size"] = 9
plt.rcParams["axes.grid"] = True
plt.rcParams["grid.alpha"] = 0.3
plt.rcParams["savefig.dpi"] = 150

_MARKERS = ("o", "s", "^", "v", "D", "x", "*", "P")


def _read_csv(path: Path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _series_key(row: dict, fields: tuple[str, ...]) -> str:
    return ", ".join(f"{f}={row[f]}" for f in fields if row.get(f, "") != "")


def _grouped_plot(
    rows: list[dict],
    x_field: str,
    y_field: str,
    group_fields: tuple[str, ...],
    ax,
) -> None:
    groups: dict[str, list[tuple[float, float]]] = {}
    for row in rows:
        if row.get(y_field, "") == "":
            continue
        key = _series_key(row, group_fields)
        groups.setdefault(key, []).append((float(row[x_field]), float(row[y_field])))
    for i, (key, pts) in enumerate(sorted(groups.items())):
        pts.sort()
        xs, ys = zip(*pts)
        ax.plot(xs, ys, marker=_MARKERS[i % len(_MARKERS)], label=key or None)
    if groups and any(groups):
        ax.legend(fontsize=7)


def plot_error_rates(csv_path: Path, out_path: Path) -> Path:
    rows = _read_csv(csv_path)
    fig, ax = plt.subplots()
    _grouped_plot(rows, "n", "estimate", ("metric", "k", "snr_db"), ax)
    ax.set_yscale("log")
    ax.set_xlabel("blocklength n")
    ax.set_ylabel("average probability of error")
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return out_path


def plot_leakage(csv_path: Path, out_path: Path) -> Path:
    rows = _read_csv(csv_path)
    fig, ax = plt.subplots()
    _grouped_plot(rows, "n", "leakage_bits", ("k", "snr_e_db", "schedule"), ax)
    ax.set_xlabel("blocklength n")
    ax.set_ylabel("estimated leakage (bits)")
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return out_path


def plot_bounds(csv_path: Path, out_path: Path) -> Path:
    rows = _read_csv(csv_path)
    fig, ax = plt.subplots()
    lines = [r for r in rows if r["bound_type"] != "measured"]
    points = [r for r in rows if r["bound_type"] == "measured"]
    _grouped_plot(lines, "n", "value_bits_per_use", ("bound_type",), ax)
    if points:
        xs = [float(r["n"]) for r in points]
        ys = [float(r["value_bits_per_use"]) for r in points]
        ax.scatter(xs, ys, marker="*", s=80, zorder=3, label="measured k/n")
        ax.legend(fontsize=7)
    ax.set_xlabel("blocklength n")
    ax.set_ylabel("secrecy rate (bits/use)")
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return out_path


def plot_rates(csv_path: Path, out_path: Path) -> Path:
    rows = _read_csv(csv_path)
    fig, ax = plt.subplots()
    xs = [float(r["n"]) for r in rows]
    ax.plot(xs, [float(r["rate_bits_per_use"]) for r in rows], marker="o",
            label="learned code q/n")
    ax.plot(xs, [float(r["normal_approx_rate"]) for r in rows], marker="s",
            label="normal approximation")
    ax.set_xlabel("blocklength n")
    ax.set_ylabel("rate (bits/use)")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return out_path


def plot_trace(csv_path: Path, out_path: Path) -> Path:
    rows = _read_csv(csv_path)
    epochs = [int(r["epoch"]) for r in rows]
    raw = [float(r["raw_estimate_nats"]) for r in rows]
    fig, ax = plt.subplots()
    ax.plot(epochs, raw, color="0.7", linewidth=0.6, label="per-epoch estimate")
    smoothed = [
        (int(r["epoch"]), float(r["smoothed_nats"]))
        for r in rows
        if r["smoothed_nats"] != ""
    ]
    if smoothed:
        xs, ys = zip(*smoothed)
        ax.plot(xs, ys, color="tab:orange", linewidth=1.4, label="moving average")
    ax.set_xlabel("epoch")
    ax.set_ylabel("estimate (nats)")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    return out_path
