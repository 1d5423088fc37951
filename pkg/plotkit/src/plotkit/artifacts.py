"""Loading and validation of solver run directories.

A run directory holds invariants.csv, zero or more snap_<t>.csv files and
run.meta; a sweep directory holds order_<N> subdirectories plus
convergence.csv and sweep.meta. Headers must match the documented
contracts exactly and every data cell must parse; failures name the file
and line.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

INVARIANTS_HEADER = "t,px,py,L,mass,E_kin,E_int,E_tot,picard_iters"
SNAPSHOT_HEADER = "X,Y,x,y,pressure,density,mach"
CONVERGENCE_HEADER = "t,order_lo,order_hi,max_boundary_diff"

__all__ = ["ArtifactError", "RunArtifacts", "SweepArtifacts", "load_run", "load_sweep",
           "INVARIANTS_HEADER", "SNAPSHOT_HEADER", "CONVERGENCE_HEADER"]


class ArtifactError(ValueError):
    """A run artifact is missing, truncated, or off-contract."""


def _read_csv(path: Path, header: str):
    """Columns of a contract CSV as a dict of float arrays."""
    if not path.exists():
        raise ArtifactError(f"missing artifact: expected {path}")
    names = header.split(",")
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline().rstrip("\n")
        if first != header:
            raise ArtifactError(
                f"{path}:1: header mismatch: expected {header!r}, found {first!r}"
            )
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != len(names):
                raise ArtifactError(
                    f"{path}:{lineno}: expected {len(names)} fields, found {len(parts)}"
                )
            try:
                rows.append([float(tok) for tok in parts])
            except ValueError as err:
                raise ArtifactError(f"{path}:{lineno}: unparsable value ({err})") from err
    if not rows:
        raise ArtifactError(f"{path}: no data rows")
    data = np.asarray(rows, dtype=float)
    return {name: data[:, k] for k, name in enumerate(names)}


def _read_meta(path: Path) -> dict:
    if not path.exists():
        raise ArtifactError(f"missing artifact: expected {path}")
    meta = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if "=" not in line:
                raise ArtifactError(f"{path}:{lineno}: expected key=value, found {line!r}")
            key, val = line.split("=", 1)
            meta[key.strip()] = val.strip()
    return meta


@dataclass
class RunArtifacts:
    """Parsed contents of one run directory."""

    path: Path
    meta: dict
    invariants: dict
    snapshots: list = field(default_factory=list)  # (time, column dict), ascending

    @property
    def snapshot_times(self):
        return [t for t, _ in self.snapshots]


def load_run(path) -> RunArtifacts:
    """Parse and validate one run directory."""
    path = Path(path)
    meta = _read_meta(path / "run.meta")
    invariants = _read_csv(path / "invariants.csv", INVARIANTS_HEADER)

    try:
        n_slabs = int(meta["n_slabs"])
    except (KeyError, ValueError) as err:
        raise ArtifactError(f"{path / 'run.meta'}: missing or bad n_slabs ({err})") from err
    n_rows = invariants["t"].size
    if meta.get("status", "ok") == "ok" and n_rows != n_slabs + 1:
        raise ArtifactError(
            f"{path / 'invariants.csv'}: {n_rows} rows, expected {n_slabs + 1} "
            f"(one per slab end plus the initial level)"
        )

    snapshots = []
    for snap in sorted(path.glob("snap_*.csv")):
        stem = snap.stem[len("snap_"):]
        try:
            t = float(stem)
        except ValueError as err:
            raise ArtifactError(f"{snap}: cannot parse snapshot time from name") from err
        snapshots.append((t, _read_csv(snap, SNAPSHOT_HEADER)))
    snapshots.sort(key=lambda item: item[0])
    return RunArtifacts(path=path, meta=meta, invariants=invariants, snapshots=snapshots)


@dataclass
class SweepArtifacts:
    """Parsed contents of a sweep directory: per-order runs plus summary."""

    path: Path
    orders: list
    runs: dict
    convergence: dict


def load_sweep(path) -> SweepArtifacts:
    path = Path(path)
    convergence = _read_csv(path / "convergence.csv", CONVERGENCE_HEADER) \
        if (path / "convergence.csv").exists() else {}
    order_dirs = sorted(path.glob("order_*"))
    if not order_dirs:
        raise ArtifactError(f"missing artifacts: expected {path}/order_<N> directories")
    orders, runs = [], {}
    for d in order_dirs:
        try:
            order = int(d.name.split("_", 1)[1])
        except ValueError as err:
            raise ArtifactError(f"{d}: cannot parse order from directory name") from err
        orders.append(order)
        runs[order] = load_run(d)
    orders.sort()
    return SweepArtifacts(path=path, orders=orders, runs=runs, convergence=convergence)
