"""Render run figures from exported data files.

The report path reads the delimited tables back in (never the in-memory
series), so figures can be regenerated for any archived run directory.
All figures are written as PNG next to the data.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .seriesio import import_table, read_metadata, read_report

__all__ = ["render_run"]


def _time_axis(outdir: Path, times: np.ndarray) -> tuple[np.ndarray, str]:
    meta_path = outdir / "populations.tsv.meta"
    if meta_path.exists():
        meta = read_metadata(meta_path)
        unit = float(meta.get("time_unit", 1.0))
        name = meta.get("time_unit_name", "time")
        label = "t" if name == "time" else f"t / {name}"
        return times / unit, label
    return times, "t"


def _heatmap(ax, times, y, grid, ylabel, title):
    pcm = ax.pcolormesh(times, y, grid.T, shading="auto", cmap="viridis", rasterized=True)
    ax.set_ylabel(ylabel)
    ax.set_title(title, fontsize=10)
    return pcm


def _render_carpet(outdir: Path) -> Path | None:
    pop_path = outdir / "populations.tsv"
    if not pop_path.exists():
        return None
    times, P = import_table(pop_path)
    if times.size < 2:
        return None
    tax, tlabel = _time_axis(outdir, times)
    L = P.shape[1]
    sites = np.arange(-(L // 2), L // 2)

    spec_path = outdir / "spectrum.tsv"
    two = spec_path.exists()
    fig, axes = plt.subplots(2 if two else 1, 1, figsize=(7, 6 if two else 3.5), sharex=True, squeeze=False)
    _heatmap(axes[0, 0], tax, sites, P, "site l", "site populations")
    if two:
        _, bk2 = import_table(spec_path)
        kappa = 2 * np.pi * np.arange(-(L // 2), L // 2) / L
        _heatmap(axes[1, 0], tax, kappa, bk2, r"quasimomentum $\kappa$", "quasimomentum distribution")
    axes[-1, 0].set_xlabel(tlabel)
    fig.tight_layout()
    out = outdir / "carpet.png"
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def _render_scalars(outdir: Path) -> Path | None:
    path = outdir / "scalars.tsv"
    if not path.exists():
        return None
    meta = read_metadata(outdir / "scalars.tsv.meta")
    cols = {meta[k]: int(k.split("_")[1]) - 1 for k in meta if k.startswith("column_") and meta[k] != "time"}
    times, vals = import_table(path)
    if times.size < 2:
        return None
    tax, tlabel = _time_axis(outdir, times)

    report = read_report(outdir / "report.txt") if (outdir / "report.txt").exists() else {}
    panels = [name for name in ("M", "C", "lambda", "radius") if name in cols]
    if not panels:
        return None
    fig, axes = plt.subplots(1, len(panels), figsize=(4 * len(panels), 3.2))
    axes = np.atleast_1d(axes)
    for ax, name in zip(axes, panels):
        y = vals[:, cols[name]]
        ax.plot(tax, y, lw=1)
        ax.set_xlabel(tlabel)
        ax.set_ylabel(name)
        if name in ("M", "radius") and np.all(y[times > 0] > 0):
            ax.set_xscale("log")
            ax.set_yscale("log")
            fit = report.get("fit_M" if name == "M" else "fit_radius")
            if fit:
                expo, pref = float(fit["exponent"]), float(fit["prefactor"])
                lo, hi = (float(x) for x in fit["window"].split(","))
                unit = times[-1] / tax[-1] if tax[-1] else 1.0
                tt = np.geomspace(lo, hi, 50)  # fit window is in raw time units
                ax.plot(tt / unit, pref * tt**expo, "k--", lw=1, label=f"$t^{{{expo:.2f}}}$")
                ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    out = outdir / "scalars.png"
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def _render_profiles(outdir: Path) -> Path | None:
    """Initial vs final (or snapshot) profiles on linear and log scales."""
    avg_path = outdir / "profile_average.tsv"
    pop_path = outdir / "populations.tsv"
    if avg_path.exists():
        times, rows = import_table(avg_path)
        labels = ["initial", "trailing average"]
    elif pop_path.exists():
        times, P = import_table(pop_path)
        if times.size < 2:
            return None
        meta = read_metadata(outdir / "populations.tsv.meta")
        snaps = meta.get("snapshots", "")
        if snaps:
            want = [float(s) for s in snaps.split(",") if s]
            idx = sorted({int(np.argmin(np.abs(times - w))) for w in want})
        else:
            idx = [0, times.size - 1]
        rows = P[idx]
        unit = float(meta.get("time_unit", 1.0))
        name = meta.get("time_unit_name", "time")
        labels = [f"t = {times[i] / unit:g} {name if name != 'time' else ''}".strip() for i in idx]
        times = times[idx]
    else:
        return None
    L = rows.shape[1]
    sites = np.arange(-(L // 2), L // 2)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(8, 3.2), sharex=True)
    for row, lab in zip(rows, labels):
        ax1.plot(sites, row, lw=1, label=lab)
        ax2.semilogy(sites, np.where(row > 0, row, np.nan), lw=1, label=lab)
    ax1.set_xlabel("site l")
    ax2.set_xlabel("site l")
    ax1.set_ylabel("P")
    ax1.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    out = outdir / "profiles.png"
    fig.savefig(out, dpi=150)
    plt.close(fig)
    return out


def render_run(outdir: str | Path) -> list[Path]:
    """Render every figure supported by the data present in a run directory."""
    outdir = Path(outdir)
    if not outdir.is_dir():
        raise FileNotFoundError(f"run directory {outdir} does not exist")
    written = []
    for renderer in (_render_carpet, _render_scalars, _render_profiles):
        out = renderer(outdir)
        if out is not None:
            written.append(out)
    return written
