"""Shared fixtures: synthetic run directories conforming to the CSV contracts."""

import numpy as np
import pytest

from plotkit.artifacts import INVARIANTS_HEADER, SNAPSHOT_HEADER


def fmt_row(values):
    return ",".join(f"{v:.17g}" for v in values)


def write_invariants(path, n_slabs, dt=0.01, equilibrium=True, seed=0):
    rng = np.random.default_rng(seed)
    lines = [INVARIANTS_HEADER]
    e_kin0, e_int0 = 0.0, 2.5
    for k in range(n_slabs + 1):
        t = k * dt
        if equilibrium or k == 0:
            px = py = ang = e_kin = 0.0
            e_int = e_int0
        else:
            px = py = 1e-16 * rng.standard_normal()
            ang = 1e-16 * rng.standard_normal()
            e_kin = 1e-3 * np.sin(3 * t) ** 2
            e_int = e_int0 - e_kin
        row = [t, px, py, ang, 1.25, e_kin, e_int, e_kin + e_int]
        lines.append(fmt_row(row) + f",{0 if k == 0 else 4}")
    (path / "invariants.csv").write_text("\n".join(lines) + "\n")


def write_snapshot(path, t, m=6, scale=1.0):
    u = np.linspace(0.0, 1.0, m)
    gx, gy = np.meshgrid(u, u, indexing="ij")
    x = scale * gx.ravel()
    y = scale * gy.ravel()
    lines = [SNAPSHOT_HEADER]
    for k in range(m * m):
        lines.append(fmt_row([gx.ravel()[k], gy.ravel()[k], x[k], y[k],
                              1.0, 1.25, 0.0]))
    (path / f"snap_{t:g}.csv").write_text("\n".join(lines) + "\n")


def write_meta(path, n_slabs, dt=0.01, status="ok", **extra):
    lines = [f"n_slabs={n_slabs}", f"dt={dt}", f"status={status}"]
    lines += [f"{k}={v}" for k, v in extra.items()]
    (path / "run.meta").write_text("\n".join(lines) + "\n")


@pytest.fixture
def equilibrium_run(tmp_path):
    run = tmp_path / "eq"
    run.mkdir()
    write_invariants(run, n_slabs=5)
    write_snapshot(run, 0.0)
    write_snapshot(run, 0.05)
    write_meta(run, n_slabs=5)
    return run


@pytest.fixture
def sweep_dir(tmp_path):
    sweep = tmp_path / "sweep"
    for order, scale in ((2, 1.02), (3, 1.01)):
        sub = sweep / f"order_{order}"
        sub.mkdir(parents=True)
        write_invariants(sub, n_slabs=3, equilibrium=False, seed=order)
        write_snapshot(sub, 0.03, scale=scale)
        write_meta(sub, n_slabs=3)
    (sweep / "convergence.csv").write_text(
        "t,order_lo,order_hi,max_boundary_diff\n0.03,2,3,0.01\n"
    )
    return sweep
