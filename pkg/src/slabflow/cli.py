"""Command-line driver: run experiments, write diagnostics and snapshots.

Subcommands:

    slabflow solve --config FILE [--alpha A] [--order N] [--t-order NT]
                   [--dt DT] [--t-final T] [--tol TOL] [--out DIR]
                   [--snapshots t1,t2,...] [--resolution M]
    slabflow sweep --config FILE --orders 2,3,4,5 [...same overrides]

Artifacts per run directory: invariants.csv (one row per slab end, 17
significant digits), snap_<t>.csv field snapshots, run.meta with the
resolved configuration. Exit codes: 0 success, 2 config error, 3 solver
non-convergence, 4 inverted element, 5 I/O error.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .assembly import SlabOperators, SolverConfig, initial_conditions, time_stack
from .config import RunConfig, config_items, load_config
from .constitutive import MaterialLaw
from .diagnostics import InvariantRecord, InvariantTracker, boundary_positions, point_fields
from .errors import ConfigError, InvertedElementError, PicardConvergenceError, SingularSystemError
from .fields import LevelState, SampleGrid, SlabSpace

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NO_CONVERGENCE = 3
EXIT_INVERTED = 4
EXIT_IO = 5

__all__ = ["main", "run", "sweep"]


def _snapshot_schedule(cfg: RunConfig):
    """Map slab index -> snapped snapshot time for the requested times."""
    sched = {}
    for t in cfg.snapshots:
        k = int(round(t / cfg.dt))
        k = min(max(k, 0), cfg.n_slabs)
        sched[k] = k * cfg.dt
    return sched


def _write_snapshot(path: Path, table):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("X,Y,x,y,pressure,density,mach\n")
        cols = [table[k] for k in ("X", "Y", "x", "y", "pressure", "density", "mach")]
        for row in zip(*cols):
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def _write_meta(path: Path, cfg: RunConfig, wall_s: float, status: str = "ok"):
    with open(path, "w", encoding="utf-8") as fh:
        for key, val in config_items(cfg):
            fh.write(f"{key}={val}\n")
        fh.write(f"n_slabs={cfg.n_slabs}\n")
        fh.write(f"status={status}\n")
        fh.write(f"wall_clock_s={wall_s:.6g}\n")
        fh.write(f"version={__version__}\n")


def run(cfg: RunConfig, boundary_collector: dict | None = None) -> None:
    """Execute one run and write its artifacts; raises on solver errors.

    If boundary_collector is a dict, the deformed boundary positions at
    every snapshot time are stored into it (used by sweep).
    """
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    t_begin = time.perf_counter()

    space = SlabSpace(cfg.order, cfg.t_order, dt=cfg.dt)
    law = MaterialLaw(rho0=cfg.rho0, gamma=cfg.gamma, p_ref=cfg.p_ref, p_env=cfg.p_env)
    ops = SlabOperators(space, law)
    solver_cfg = SolverConfig(tol=cfg.tol, max_picard=cfg.max_picard,
                              relaxation=cfg.relaxation)
    grid = SampleGrid(cfg.resolution)
    schedule = _snapshot_schedule(cfg)

    phi_x, phi_y, pi_x, pi_y = initial_conditions(space)
    tracker = InvariantTracker(space, law, phi_x, phi_y, pi_x, pi_y, t0=0.0)

    def snapshot(level: LevelState, t_label: float):
        table = point_fields(space, law, level, grid)
        _write_snapshot(out / f"snap_{t_label:g}.csv", table)
        if boundary_collector is not None:
            boundary_collector[round(t_label, 12)] = boundary_positions(space, level, grid)

    status = "ok"
    try:
        with open(out / "invariants.csv", "w", encoding="utf-8") as inv:
            inv.write(InvariantRecord.HEADER + "\n")
            inv.write(tracker.records[0].as_row() + "\n")
            inv.flush()
            if 0 in schedule:
                snapshot(tracker.level0, 0.0)
            for result in time_stack(ops, solver_cfg, cfg.n_slabs,
                                     state0=(phi_x, phi_y, pi_x, pi_y)):
                rec = tracker.push(result)
                inv.write(rec.as_row() + "\n")
                inv.flush()
                k = result.index + 1
                if k in schedule:
                    snapshot(result.level_end, schedule[k])
    except Exception:
        status = "failed"
        raise
    finally:
        _write_meta(out / "run.meta", cfg, time.perf_counter() - t_begin, status=status)


def sweep(cfg: RunConfig, orders) -> None:
    """Run each order into its own directory, then summarize boundary gaps.

    convergence.csv holds, for each consecutive order pair and shared
    snapshot time, the max deformed-boundary position difference. A failed
    order is recorded in sweep.meta and skipped in the pairing; the sweep
    itself continues.
    """
    if not orders:
        raise ConfigError("sweep needs a non-empty list of orders")
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    times = cfg.snapshots if cfg.snapshots else (cfg.t_final,)

    boundaries = {}
    statuses = {}
    for order in orders:
        sub = replace(cfg, order=order, snapshots=tuple(times),
                      out_dir=str(out / f"order_{order}"))
        collector = {}
        try:
            run(sub, boundary_collector=collector)
            boundaries[order] = collector
            statuses[order] = "ok"
        except (InvertedElementError, PicardConvergenceError, SingularSystemError) as err:
            statuses[order] = f"failed: {err}"

    with open(out / "sweep.meta", "w", encoding="utf-8") as fh:
        for order in orders:
            fh.write(f"order_{order}={statuses[order]}\n")

    with open(out / "convergence.csv", "w", encoding="utf-8") as fh:
        fh.write("t,order_lo,order_hi,max_boundary_diff\n")
        for lo, hi in zip(orders[:-1], orders[1:]):
            if statuses.get(lo) != "ok" or statuses.get(hi) != "ok":
                continue
            shared = sorted(set(boundaries[lo]) & set(boundaries[hi]))
            for t in shared:
                xl, yl = boundaries[lo][t]
                xh, yh = boundaries[hi][t]
                diff = float(np.max(np.hypot(xl - xh, yl - yh)))
                fh.write(f"{t:.17g},{lo},{hi},{diff:.17g}\n")


def _add_common_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", required=True, help="flat key=value config file")
    p.add_argument("--alpha", type=float)
    p.add_argument("--order", type=int)
    p.add_argument("--t-order", dest="t_order", type=int)
    p.add_argument("--dt", type=float)
    p.add_argument("--t-final", dest="t_final", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--out", dest="out_dir")
    p.add_argument("--snapshots", help="comma-separated snapshot times in seconds")
    p.add_argument("--resolution", type=int)


def _overrides_from(args) -> dict:
    keys = ("alpha", "order", "t_order", "dt", "t_final", "tol", "out_dir",
            "snapshots", "resolution")
    return {k: getattr(args, k) for k in keys if getattr(args, k, None) is not None}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="slabflow",
        description="Space-time spectral element solver for 2D Lagrangian barotropic flow",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    p_solve = sub.add_parser("solve", help="run one experiment")
    _add_common_flags(p_solve)
    p_sweep = sub.add_parser("sweep", help="run a polynomial-order sweep")
    _add_common_flags(p_sweep)
    p_sweep.add_argument("--orders", required=True,
                         help="comma-separated spatial orders, e.g. 2,3,4,5")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config, _overrides_from(args))
        if args.command == "solve":
            run(cfg)
        else:
            orders = [int(tok) for tok in args.orders.split(",") if tok.strip()]
            sweep(cfg, orders)
    except ConfigError as err:
        print(f"slabflow: config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except PicardConvergenceError as err:
        print(f"slabflow: solver did not converge: {err}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except (InvertedElementError, SingularSystemError) as err:
        code = EXIT_INVERTED if isinstance(err, InvertedElementError) else EXIT_NO_CONVERGENCE
        print(f"slabflow: solver error: {err}", file=sys.stderr)
        return code
    except OSError as err:
        print(f"slabflow: i/o error: {err}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
