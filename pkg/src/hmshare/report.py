"""Figure rendering for sweep results.

Reads the sweep CSV (the machine contract) and renders summary figures to
files: spectral efficiency, gain over the reference scheme, and link
unavailability, each against the beam-centre SNR.
"""

import csv
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

from .sim import CSV_HEADER, SCHEMES  # noqa: E402

_COLORS = {"reference": "tab:gray", "pairing": "tab:blue", "optimal": "tab:red"}
_MARKERS = {"reference": "s", "pairing": "o", "optimal": "^"}


def load_sweep_csv(path) -> list[dict]:
    """Parse sweep CSV rows; empty numeric fields become None."""
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != list(CSV_HEADER):
            raise ValueError(f"unexpected CSV header in {path}: {reader.fieldnames}")
        for rec in reader:
            rows.append({
                "snr_max_db": float(rec["snr_max_db"]),
                "trial": int(rec["trial"]),
                "scheme": rec["scheme"],
                "rate": float(rec["rate_bits_per_symbol"])
                        if rec["rate_bits_per_symbol"] else None,
                "gain_pct": float(rec["gain_pct"]) if rec["gain_pct"] else None,
                "unavailability_pct": float(rec["unavailability_pct"]),
            })
    return rows


def _aggregate(rows, scheme, field):
    """Mean and std of a field per grid point, skipping missing values."""
    grid = sorted({r["snr_max_db"] for r in rows})
    means, stds = [], []
    for snr in grid:
        vals = [r[field] for r in rows
                if r["snr_max_db"] == snr and r["scheme"] == scheme
                and r[field] is not None]
        means.append(sum(vals) / len(vals) if vals else math.nan)
        stds.append(math.sqrt(sum((v - means[-1]) ** 2 for v in vals) / len(vals))
                    if vals else math.nan)
    return grid, means, stds


def _plot_with_band(ax, grid, mean, std, scheme):
    ax.plot(grid, mean, marker=_MARKERS[scheme], markersize=4,
            color=_COLORS[scheme], label=scheme)
    lo = [m - s for m, s in zip(mean, std)]
    hi = [m + s for m, s in zip(mean, std)]
    ax.fill_between(grid, lo, hi, alpha=0.15, color=_COLORS[scheme])


def render_sweep_figures(rows, outdir) -> list[Path]:
    """Render the three summary figures into outdir; returns written paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for scheme in SCHEMES:
        grid, mean, std = _aggregate(rows, scheme, "rate")
        _plot_with_band(ax, grid, mean, std, scheme)
    ax.set_xlabel("beam-centre SNR (dB)")
    ax.set_ylabel("spectral efficiency (bits/symbol)")
    ax.grid(alpha=0.3)
    ax.legend()
    fig.tight_layout()
    path = outdir / "rate_vs_snr_max.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for scheme in ("pairing", "optimal"):
        grid, mean, std = _aggregate(rows, scheme, "gain_pct")
        _plot_with_band(ax, grid, mean, std, scheme)
    for level in (5.0, 10.0):
        ax.axhline(level, color="k", linewidth=0.6, linestyle=":")
    ax.set_xlabel("beam-centre SNR (dB)")
    ax.set_ylabel("gain over reference (%)")
    ax.grid(alpha=0.3)
    ax.legend()
    fig.tight_layout()
    path = outdir / "gain_vs_snr_max.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(7, 4.5))
    grid = sorted({r["snr_max_db"] for r in rows})
    unav = []
    for snr in grid:
        vals = [r["unavailability_pct"] for r in rows if r["snr_max_db"] == snr]
        unav.append(sum(vals) / len(vals))
    ax.plot(grid, unav, marker="d", markersize=4, color="tab:green")
    ax.set_xlabel("beam-centre SNR (dB)")
    ax.set_ylabel("link unavailability (%)")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    path = outdir / "unavailability_vs_snr_max.png"
    fig.savefig(path, dpi=150)
    plt.close(fig)
    written.append(path)

    return written
