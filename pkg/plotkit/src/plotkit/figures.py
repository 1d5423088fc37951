"""Figure builders: conservation panels, snapshot sheets, convergence overlays.

Every figure is accompanied by a .sha256 sidecar hashing the numeric values
that were plotted, for provenance. All data comes from the CSV artifacts.
"""

from __future__ import annotations

import hashlib
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .artifacts import ArtifactError, load_run, load_sweep

__all__ = ["conservation_series", "plot_conservation", "plot_snapshots",
           "plot_convergence", "snapshot_grid_shape", "snapshot_boundary"]

SNAPSHOT_FIELDS = ("flowmap", "pressure", "mach")


def _write_checksum(fig_path: Path, arrays):
    digest = hashlib.sha256()
    for arr in arrays:
        digest.update(np.ascontiguousarray(arr, dtype=float).tobytes())
    sidecar = fig_path.with_suffix(fig_path.suffix + ".sha256")
    sidecar.write_text(digest.hexdigest() + "\n")
    return sidecar


def conservation_series(run) -> dict:
    """The five plotted series keyed by panel label; energy as a change."""
    inv = run.invariants
    return {
        "px": inv["px"],
        "py": inv["py"],
        "L": inv["L"],
        "mass": inv["mass"],
        "dE_tot": inv["E_tot"] - inv["E_tot"][0],
    }


def plot_conservation(run_dir, out_prefix, fmt: str = "png") -> Path:
    """Five-panel conservation figure (px, py, L, mass, change in E_tot)."""
    run = load_run(run_dir)
    series = conservation_series(run)
    t = run.invariants["t"]

    fig, axes = plt.subplots(2, 3, figsize=(13, 7), constrained_layout=True)
    axes = axes.ravel()
    labels = {
        "px": "total linear momentum x",
        "py": "total linear momentum y",
        "L": "total angular momentum",
        "mass": "total mass",
        "dE_tot": "change in total energy",
    }
    for ax, (key, values) in zip(axes, series.items()):
        ax.plot(t, values, lw=1.0)
        ax.set_title(labels[key])
        ax.set_xlabel("t [s]")
        ax.ticklabel_format(axis="y", style="sci", scilimits=(0, 0), useOffset=False)
        ax.grid(alpha=0.3)
    axes[-1].set_axis_off()
    fig.suptitle(f"conservation series ({run.path.name})")

    out = Path(f"{out_prefix}_conservation.{fmt}")
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out)
    plt.close(fig)
    _write_checksum(out, [t, *series.values()])
    return out


def snapshot_grid_shape(table) -> int:
    """Side length of the uniform sample grid of a snapshot table."""
    m = int(round(np.sqrt(table["X"].size)))
    if m * m != table["X"].size:
        raise ArtifactError("snapshot table is not a square sample grid")
    return m


def snapshot_boundary(table):
    """Deformed boundary polyline of a snapshot, ordered around the perimeter."""
    m = snapshot_grid_shape(table)
    x = table["x"].reshape(m, m)
    y = table["y"].reshape(m, m)
    idx_b = [(i, 0) for i in range(m)]
    idx_r = [(m - 1, j) for j in range(1, m)]
    idx_t = [(i, m - 1) for i in range(m - 2, -1, -1)]
    idx_l = [(0, j) for j in range(m - 2, 0, -1)]
    ring = idx_b + idx_r + idx_t + idx_l + [idx_b[0]]
    bx = np.array([x[i, j] for i, j in ring])
    by = np.array([y[i, j] for i, j in ring])
    return bx, by


def _snapshot_axes(n_panels):
    cols = min(n_panels, 4)
    rows = (n_panels + cols - 1) // cols
    fig, axes = plt.subplots(rows, cols, figsize=(4.0 * cols, 3.6 * rows),
                             constrained_layout=True, squeeze=False)
    return fig, axes.ravel()


def plot_snapshots(run_dir, field: str, out_prefix, fmt: str = "png") -> Path:
    """One panel per snapshot time: deformed grid, or contours on it."""
    if field not in SNAPSHOT_FIELDS:
        raise ArtifactError(
            f"unknown snapshot field {field!r}, expected one of {SNAPSHOT_FIELDS}"
        )
    run = load_run(run_dir)
    if not run.snapshots:
        expected = run.path / "snap_<t>.csv"
        raise ArtifactError(f"no snapshot files in {run.path}, expected {expected}")

    fig, axes = _snapshot_axes(len(run.snapshots))
    consumed = []
    if field == "flowmap":
        for ax, (t, table) in zip(axes, run.snapshots):
            m = snapshot_grid_shape(table)
            x = table["x"].reshape(m, m)
            y = table["y"].reshape(m, m)
            for k in range(m):
                ax.plot(x[k, :], y[k, :], color="tab:blue", lw=0.5)
                ax.plot(x[:, k], y[:, k], color="tab:blue", lw=0.5)
            ax.set_title(f"t = {t:g} s")
            ax.set_aspect("equal")
            consumed.extend([x, y])
    else:
        vals = [table[field] for _, table in run.snapshots]
        vmin = min(np.nanmin(v) for v in vals)
        vmax = max(np.nanmax(v) for v in vals)
        if vmax <= vmin:
            pad = max(abs(vmin), 1.0) * 1e-9  # constant field, e.g. at rest
            vmin, vmax = vmin - pad, vmax + pad
        levels = np.linspace(vmin, vmax, 21)
        contour = None
        for ax, (t, table) in zip(axes, run.snapshots):
            good = ~np.isnan(table[field])
            contour = ax.tricontourf(table["x"][good], table["y"][good],
                                     table[field][good], levels=levels, cmap="viridis")
            ax.set_title(f"t = {t:g} s")
            ax.set_aspect("equal")
            consumed.extend([table["x"], table["y"], table[field]])
        fig.colorbar(contour, ax=list(axes[: len(run.snapshots)]), label=field)
    for ax in axes[len(run.snapshots):]:
        ax.set_axis_off()
    fig.suptitle(f"{field} snapshots ({run.path.name})")

    out = Path(f"{out_prefix}_{field}.{fmt}")
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out)
    plt.close(fig)
    _write_checksum(out, consumed)
    return out


def plot_convergence(sweep_dir, out_prefix, fmt: str = "png") -> Path:
    """Overlaid deformed boundaries per order at each shared snapshot time."""
    sweep = load_sweep(sweep_dir)
    times = None
    for order in sweep.orders:
        ts = tuple(sweep.runs[order].snapshot_times)
        if times is None:
            times = ts
        elif ts != times:
            raise ArtifactError(
                f"snapshot times differ across orders: order {order} has {ts}, "
                f"expected {times}"
            )
    if not times:
        raise ArtifactError(f"no snapshots found under {sweep.path}/order_*")

    fig, axes = _snapshot_axes(len(times))
    consumed = []
    for k, (ax, t) in enumerate(zip(axes, times)):
        for order in sweep.orders:
            table = dict(sweep.runs[order].snapshots[k][1])
            bx, by = snapshot_boundary(table)
            ax.plot(bx, by, lw=1.0, label=f"N = {order}")
            consumed.extend([bx, by])
        ax.set_title(f"t = {t:g} s")
        ax.set_aspect("equal")
    axes[0].legend(fontsize=8)
    for ax in axes[len(times):]:
        ax.set_axis_off()
    if len(sweep.orders) == 1:
        fig.suptitle(f"deformed boundary, single order N = {sweep.orders[0]} "
                     "(no comparison pairs)")
    else:
        fig.suptitle(f"deformed boundary vs polynomial order ({sweep.path.name})")

    out = Path(f"{out_prefix}_convergence.{fmt}")
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out)
    plt.close(fig)
    _write_checksum(out, consumed)
    return out
